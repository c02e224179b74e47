#pragma once

#include "premia/errors.hpp"

#include <cmath>
#include <string>

namespace premia::detail {

constexpr double kBisectTol = 1e-12;
constexpr int kBisectMaxIter = 200;

/// Bisection for an increasing sign change: f < 0 near lo, f > 0 near hi.
///
/// The endpoint signs are taken as given, so f is only evaluated strictly
/// inside the bracket. Useful when f is singular or undefined at an end.
template <class F>
double bisect_increasing(F&& f, double lo, double hi, const char* what) {
    for (int it = 0; it < kBisectMaxIter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= kBisectTol || mid <= lo || mid >= hi) return mid;
        const double v = f(mid);
        if (v == 0.0) return mid;
        if (v < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw ConvergenceError(std::string(what) + ": bisection did not reach tolerance");
}

}  // namespace premia::detail
