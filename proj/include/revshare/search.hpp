#pragma once

// One-dimensional search routines used by the developer and platform solvers.

#include <cmath>
#include <utility>

namespace revshare::search {

struct Maximum {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than `tolerance` or after `max_iter`.
template <typename F>
Maximum golden_section_maximize(F&& f, double lo, double hi, double tolerance, int max_iter = 500) {
    constexpr double inv_phi = 0.6180339887498948482;  // 1/phi
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    int it = 0;
    while (b - a > tolerance && it < max_iter) {
        ++it;
        // Ties move the upper end down so flat plateaus resolve toward lo.
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x), it};
}

/// Ternary search for the maximum of a unimodal function on [lo, hi].
template <typename F>
Maximum ternary_maximize(F&& f, double lo, double hi, double tolerance, int max_iter = 500) {
    double a = lo, b = hi;
    int it = 0;
    while (b - a > tolerance && it < max_iter) {
        ++it;
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (f(m1) >= f(m2))
            b = m2;
        else
            a = m1;
    }
    const double x = 0.5 * (a + b);
    return {x, f(x), it};
}

/// For a predicate that is true on [lo, t] and false on (t, hi], returns the
/// bracket {last true, first false} after bisecting to adjacent doubles or
/// `max_iter` halvings. Requires pred(lo) true and pred(hi) false.
template <typename P>
std::pair<double, double> bisect_boundary(P&& pred, double lo, double hi, int max_iter = 200) {
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid))
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi};
}

}  // namespace revshare::search
