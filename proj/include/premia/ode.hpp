#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with FSAL, elementary step
// size control and Hairer's 4th order continuous extension.

#include "premia/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace premia::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h_init = 0.0;  // 0 selects the starting step automatically
    double h_max = 0.0;   // 0 means no limit
    long max_steps = 2'000'000;
};

/// One accepted step with its dense-output coefficients.
template <std::size_t N>
struct Segment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State<N>, 5> rc{};

    double t1() const { return t0 + h; }

    State<N> eval(double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        State<N> y{};
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = rc[0][i] + s * (rc[1][i] + s1 * (rc[2][i] + s * (rc[3][i] + s1 * rc[4][i])));
        }
        return y;
    }
};

enum class Status { completed, guard_stop };

template <std::size_t N>
struct Result {
    std::vector<Segment<N>> segments;
    Status status = Status::completed;
    double stop_time = 0.0;  // time of the step end that tripped the guard
    long rejected = 0;

    double t_begin() const { return segments.empty() ? stop_time : segments.front().t0; }
    double t_end() const { return segments.empty() ? stop_time : segments.back().t1(); }

    /// Index of the segment containing t (t in [t_begin, t_end]).
    std::size_t locate(double t) const {
        auto it = std::upper_bound(segments.begin(), segments.end(), t,
                                   [](double v, const Segment<N>& s) { return v < s.t0; });
        std::size_t i = it == segments.begin() ? 0 : static_cast<std::size_t>(it - segments.begin()) - 1;
        return std::min(i, segments.size() - 1);
    }

    State<N> eval(double t) const { return segments[locate(t)].eval(t); }
};

namespace detail {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th and 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

template <std::size_t N>
bool all_finite(const State<N>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
double scaled_norm(const State<N>& v, const State<N>& y, const Options& o) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = o.atol + o.rtol * std::abs(y[i]);
        s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / N);
}

}  // namespace detail

/// Integrates y' = f(t, y) from (t0, y0) to t_end.
///
/// A right-hand side that returns non-finite values rejects the step and
/// shrinks it. After every accepted step guard(t, y) is consulted; if it
/// returns true the step is discarded and integration stops with
/// Status::guard_stop. Throws ConvergenceError when the step size underflows
/// or max_steps is exhausted.
template <std::size_t N, class F>
Result<N> integrate(
    F&& f, double t0, State<N> y0, double t_end, const Options& opts = {},
    const std::function<bool(double, const State<N>&)>& guard = {}) {
    using namespace detail;
    Result<N> res;
    res.stop_time = t0;
    const double span = t_end - t0;
    if (!(span > 0.0)) return res;

    auto axpy = [](const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
        State<N> out = y;
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (const auto& [c, k] : terms) acc += c * (*k)[i];
            out[i] += h * acc;
        }
        return out;
    };

    State<N> k1 = f(t0, y0);
    if (!all_finite(k1)) throw ConvergenceError("ode: non-finite right-hand side at the initial point");

    double h = opts.h_init;
    if (h <= 0.0) {
        const double d0 = scaled_norm(y0, y0, opts);
        const double d1n = scaled_norm(k1, y0, opts);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, span);
        const State<N> y1 = axpy(y0, h0, {{1.0, &k1}});
        const State<N> f1 = f(t0 + h0, y1);
        State<N> df{};
        for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - k1[i];
        const double d2 = all_finite(f1) ? scaled_norm(df, y0, opts) / h0 : 1e300;
        const double dm = std::max(d1n, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min(100.0 * h0, h1);
    }
    if (opts.h_max > 0.0) h = std::min(h, opts.h_max);

    double t = t0;
    State<N> y = y0;
    long steps = 0;
    bool last_rejected = false;
    while (t < t_end) {
        if (++steps > opts.max_steps) throw ConvergenceError("ode: maximum number of steps exceeded");
        bool final_step = false;
        if (t + h >= t_end || t + 1.01 * h >= t_end) {
            h = t_end - t;
            final_step = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw ConvergenceError("ode: step size underflow at t=" + std::to_string(t));
        }

        const State<N> k2 = f(t + c2 * h, axpy(y, h, {{a21, &k1}}));
        const State<N> k3 = f(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const State<N> k4 = f(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State<N> k5 = f(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State<N> k6 =
            f(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State<N> y_new = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State<N> k7 = f(t + h, y_new);

        State<N> err_vec{};
        for (std::size_t i = 0; i < N; ++i) {
            err_vec[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        }
        bool finite = all_finite(k2) && all_finite(k3) && all_finite(k4) && all_finite(k5) &&
                      all_finite(k6) && all_finite(k7) && all_finite(y_new);
        State<N> ymax{};
        for (std::size_t i = 0; i < N; ++i) ymax[i] = std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double err = finite ? scaled_norm(err_vec, ymax, opts) : 1e300;

        if (!(err <= 1.0)) {
            ++res.rejected;
            last_rejected = true;
            const double fac = finite ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.2;
            h *= fac;
            continue;
        }

        if (guard && guard(t + h, y_new)) {
            res.status = Status::guard_stop;
            res.stop_time = t + h;
            return res;
        }

        Segment<N> seg;
        seg.t0 = t;
        seg.h = h;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = y_new[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            seg.rc[0][i] = y[i];
            seg.rc[1][i] = ydiff;
            seg.rc[2][i] = bspl;
            seg.rc[3][i] = ydiff - h * k7[i] - bspl;
            seg.rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                               d7 * k7[i]);
        }
        res.segments.push_back(seg);

        t = final_step ? t_end : t + h;
        y = y_new;
        k1 = k7;
        res.stop_time = t;

        double fac = err == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
        if (last_rejected) fac = std::min(fac, 1.0);
        last_rejected = false;
        h *= fac;
        if (opts.h_max > 0.0) h = std::min(h, opts.h_max);
    }
    return res;
}

}  // namespace premia::ode
