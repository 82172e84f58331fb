#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace revshare {

/// Seeded random stream. Every (seed, stream, substream) triple yields an
/// independent, fully reproducible sequence; the uniform and normal transforms
/// are written out here so the draws do not depend on the standard library's
/// unspecified distribution algorithms.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double normal();
    bool bernoulli(double p);

private:
    std::mt19937_64 engine_;
};

/// Parametric distribution used for heterogeneous populations and for the
/// reservation-profit smoothing of N(alpha).
struct Distribution {
    enum class Kind { Uniform, LogNormal };

    Kind kind = Kind::Uniform;
    double first = 0.0;   // Uniform: lo, LogNormal: mu of log
    double second = 0.0;  // Uniform: hi, LogNormal: sigma of log

    static Distribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    static Distribution lognormal(double mu, double sigma) { return {Kind::LogNormal, mu, sigma}; }

    double sample(RandomStream& rng) const;
    double cdf(double x) const;
    double mean() const;

    std::vector<std::string> diagnostics() const;
    void validate(const std::string& module) const;

    /// "uniform(lo, hi)" / "lognormal(mu, sigma)"; `parse` accepts exactly this form.
    std::string to_string() const;
    static Distribution parse(std::string_view text);

    bool operator==(const Distribution&) const = default;
};

}  // namespace revshare
