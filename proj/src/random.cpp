#include "revshare/random.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "revshare/error.hpp"
#include "text.hpp"

namespace revshare {

namespace {

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    return std::seed_seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(substream), hi(substream)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
    auto seq = make_seed(seed, stream, substream);
    engine_.seed(seq);
}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool RandomStream::bernoulli(double p) {
    return uniform() < p;
}

double Distribution::sample(RandomStream& rng) const {
    switch (kind) {
        case Kind::Uniform:
            return first + (second - first) * rng.uniform();
        case Kind::LogNormal:
            return std::exp(first + second * rng.normal());
    }
    return 0.0;
}

double Distribution::cdf(double x) const {
    switch (kind) {
        case Kind::Uniform:
            if (x < first) return 0.0;
            if (x >= second) return 1.0;
            return (x - first) / (second - first);
        case Kind::LogNormal:
            if (x <= 0.0) return 0.0;
            if (second == 0.0) return std::log(x) >= first ? 1.0 : 0.0;
            return 0.5 * std::erfc(-(std::log(x) - first) / (second * std::numbers::sqrt2));
    }
    return 0.0;
}

double Distribution::mean() const {
    switch (kind) {
        case Kind::Uniform:
            return 0.5 * (first + second);
        case Kind::LogNormal:
            return std::exp(first + 0.5 * second * second);
    }
    return 0.0;
}

std::vector<std::string> Distribution::diagnostics() const {
    std::vector<std::string> out;
    if (!std::isfinite(first) || !std::isfinite(second)) {
        out.push_back("distribution parameters must be finite");
        return out;
    }
    if (kind == Kind::Uniform && first > second)
        out.push_back(fmt::format("uniform bounds out of order ({} > {})", first, second));
    if (kind == Kind::LogNormal && second < 0.0)
        out.push_back(fmt::format("lognormal sigma must be non-negative (got {})", second));
    return out;
}

void Distribution::validate(const std::string& module) const {
    if (auto d = diagnostics(); !d.empty()) throw DomainError(module, d.front());
}

std::string Distribution::to_string() const {
    return fmt::format("{}({}, {})", kind == Kind::Uniform ? "uniform" : "lognormal", first, second);
}

Distribution Distribution::parse(std::string_view text) {
    const auto body = detail::trim(text);
    const auto open = body.find('(');
    if (open == std::string_view::npos || body.back() != ')')
        throw std::invalid_argument("expected uniform(lo, hi) or lognormal(mu, sigma)");
    const auto name = detail::trim(body.substr(0, open));
    const auto args = detail::split(body.substr(open + 1, body.size() - open - 2), ',');
    if (args.size() != 2) throw std::invalid_argument("distribution takes exactly two parameters");
    const auto a = detail::parse_double(args[0]);
    const auto b = detail::parse_double(args[1]);
    if (!a || !b) throw std::invalid_argument("distribution parameters must be numbers");
    if (name == "uniform") return uniform(*a, *b);
    if (name == "lognormal") return lognormal(*a, *b);
    throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

}  // namespace revshare
