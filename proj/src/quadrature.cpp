#include "premia/quadrature.hpp"

#include "premia/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace premia {

namespace {

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0;
    const double v = GK::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
    if (a == b) return {0.0, 0.0, 0};
    if (b < a) {
        QuadratureResult r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }

    std::priority_queue<Panel> panels;
    Panel first = evaluate_panel(f, a, b);
    double total = first.value;
    double total_err = first.error;
    panels.push(first);

    int count = 1;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (count >= opts.max_intervals) {
            throw ConvergenceError("adaptive quadrature on [" + std::to_string(a) + ", " +
                                   std::to_string(b) + "] stalled with error estimate " +
                                   std::to_string(total_err));
        }
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw ConvergenceError("adaptive quadrature: panel width underflow near " +
                                   std::to_string(worst.a));
        }
        Panel left = evaluate_panel(f, worst.a, mid);
        Panel right = evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }

    // Re-sum from the panels to shed the drift of the running update.
    double value = 0.0;
    double error = 0.0;
    while (!panels.empty()) {
        value += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    if (!std::isfinite(value)) throw ConvergenceError("adaptive quadrature: non-finite integrand");
    return {value, error, count};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureOptions& opts) {
    auto mapped = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double one_minus = 1.0 - u;
        const double x = a + u / one_minus;
        const double jac = 1.0 / (one_minus * one_minus);
        const double v = f(x) * jac;
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace premia
