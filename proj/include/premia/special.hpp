#pragma once

#include <cmath>

namespace premia {

/// (1 - e^{-x}) / x, equal to 1 at x = 0 and accurate for small |x|.
inline double exprel_decay(double x) {
    if (std::abs(x) < 1e-300) return 1.0;
    return -std::expm1(-x) / x;
}

/// e^{-rho t} (1 - e^{-(2 alpha - rho) t}) / (2 (2 alpha - rho)).
///
/// The Psi_1 solution of the Riccati system under P. Written through
/// exprel_decay so that 2 alpha = rho needs no separate branch.
inline double upsilon(double alpha, double rho, double t) {
    const double x = (2.0 * alpha - rho) * t;
    if (x >= 0.0) return std::exp(-rho * t) * 0.5 * t * exprel_decay(x);
    return std::exp(-2.0 * alpha * t) * 0.5 * t * exprel_decay(-x);
}

}  // namespace premia
