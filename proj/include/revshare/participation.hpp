#pragma once

#include <span>
#include <string>
#include <vector>

#include "revshare/best_response.hpp"
#include "revshare/model.hpp"

namespace revshare {

/// Developers who enter at a given commission, in ascending id order.
struct ParticipationResult {
    std::vector<std::string> entrants;
    std::size_t count = 0;
    std::vector<double> entry_profits;  // parallel to `entrants`
};

/// A developer enters iff its best-response profit is at least its
/// reservation profit (indifferent developers enter).
bool enters(const DeveloperProfile& dev, const BestResponse& response);

ParticipationResult participate(std::span<const DeveloperProfile> population, double rate,
                                SolveMethod method = SolveMethod::Auto);
ParticipationResult participate(std::span<const DeveloperProfile> population, const CommissionPolicy& policy,
                                SolveMethod method = SolveMethod::Auto);

struct ParticipationPoint {
    double rate = 0.0;
    std::size_t count = 0;
    bool operator==(const ParticipationPoint&) const = default;
};

/// N(alpha) on an ascending grid. Throws DomainError for an unsorted grid or a
/// rate outside [0, 1], and std::logic_error if the curve is not
/// non-increasing.
std::vector<ParticipationPoint> participation_curve(std::span<const DeveloperProfile> population,
                                                    std::span<const double> rates,
                                                    SolveMethod method = SolveMethod::Auto);

}  // namespace revshare
