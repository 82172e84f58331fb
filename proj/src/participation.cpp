#include "revshare/participation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "revshare/error.hpp"

namespace revshare {

namespace {

constexpr const char* kModule = "participation";

std::vector<std::size_t> by_id(std::span<const DeveloperProfile> population) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return population[a].id < population[b].id; });
    return order;
}

void check_rate(double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError(kModule, fmt::format("rate out of [0,1] ({})", rate));
}

}  // namespace

bool enters(const DeveloperProfile& dev, const BestResponse& response) {
    return response.net_profit >= dev.reservation_profit;
}

ParticipationResult participate(std::span<const DeveloperProfile> population, double rate, SolveMethod method) {
    check_rate(rate);
    return participate(population, CommissionPolicy::flat(rate), method);
}

ParticipationResult participate(std::span<const DeveloperProfile> population, const CommissionPolicy& policy,
                                SolveMethod method) {
    ParticipationResult out;
    for (std::size_t i : by_id(population)) {
        const auto& dev = population[i];
        const auto br = best_response(dev, policy, method);
        if (enters(dev, br)) {
            out.entrants.push_back(dev.id);
            out.entry_profits.push_back(br.net_profit);
        }
    }
    out.count = out.entrants.size();
    return out;
}

std::vector<ParticipationPoint> participation_curve(std::span<const DeveloperProfile> population,
                                                    std::span<const double> rates, SolveMethod method) {
    for (std::size_t j = 0; j < rates.size(); ++j) {
        check_rate(rates[j]);
        if (j > 0 && rates[j] < rates[j - 1])
            throw DomainError(kModule, fmt::format("rate grid not sorted at index {} ({} after {})", j, rates[j],
                                                   rates[j - 1]));
    }
    std::vector<ParticipationPoint> curve;
    curve.reserve(rates.size());
    for (double rate : rates) {
        curve.push_back({rate, participate(population, rate, method).count});
        if (curve.size() > 1 && curve.back().count > curve[curve.size() - 2].count)
            throw std::logic_error(fmt::format("participation increased between rates {} and {}",
                                               curve[curve.size() - 2].rate, rate));
    }
    return curve;
}

}  // namespace revshare
