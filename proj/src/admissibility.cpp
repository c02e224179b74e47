#include "premia/admissibility.hpp"

#include "premia/errors.hpp"
#include "premia/special.hpp"
#include "roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace premia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

void check_theta(const SubordinatorSpec& sub, double theta, const char* what) {
    if (!in_DL(sub, theta)) {
        std::ostringstream os;
        os << what << ": theta=" << theta << " not in D_L = (-inf, " << esscher_bound(sub) << ")";
        throw DomainError(os.str());
    }
}

// kappa''(theta + u) / kappa''(theta); free of the scale c.
double curvature_ratio(const SubordinatorSpec& sub, double theta, double u) {
    if (const auto* d = std::get_if<DiracJump>(&sub.family())) return std::exp(d->a * u);
    const double m = theta_max(sub) - theta;
    const double power =
        sub.is_cp_exp() ? 3.0 : 2.0 - std::get<TemperedStable>(sub.family()).alpha_ts;
    return std::exp(-power * std::log1p(-u / m));
}

double u_min_bisection(const SubordinatorSpec& sub, double theta, double beta) {
    const double target = -std::log(beta);
    auto f = [&](double u) { return std::log(curvature_ratio(sub, theta, u)) - target; };
    double hi = theta_max(sub) - theta;
    if (!std::isfinite(hi)) {
        hi = 1.0;
        while (f(hi) <= 0.0) {
            hi *= 2.0;
            if (hi > 1e300) throw ConvergenceError("u_min: cannot bracket the minimum");
        }
    }
    return detail::bisect_increasing(f, 0.0, hi, "u_min");
}

// Unique zero in (0, 1) of z^3 - 3z + A for A in (0, 2).
double cubic_root_unit(double A) {
    const double phi = std::acos(std::clamp(-0.5 * A, -1.0, 1.0));
    return 2.0 * std::cos(phi / 3.0 - 2.0 * std::numbers::pi / 3.0);
}

// Smallest root above 1 of beta y^3 - (A + beta) y + 2.
double cubic_root_p3(double beta, double A) {
    const double p = -(A + beta) / beta;
    const double q = 2.0 / beta;
    auto P = [&](double y) { return ((y * y) + p) * y + q; };
    auto dP = [&](double y) { return 3.0 * y * y + p; };

    double best = kInf;
    if (p < 0.0) {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k) {
            const double y = r * std::cos(phi / 3.0 - 2.0 * std::numbers::pi * k / 3.0);
            if (y > 1.0 && y < best) best = y;
        }
    }
    if (!std::isfinite(best)) throw NotInDbError("u_zero: cubic has no root above 1");
    // Polish away the rounding of the trigonometric form.
    for (int it = 0; it < 3; ++it) {
        const double d = dP(best);
        if (std::abs(d) < 1e-8) break;
        const double next = best - P(best) / d;
        if (!(next > 1.0)) break;
        best = next;
    }
    return best;
}

}  // namespace

double Seasonal::operator()(double t) const {
    if (kind == Kind::constant) return value;
    return level + amplitude * std::sin(2.0 * std::numbers::pi * t / period_days);
}

double Seasonal::lower_bound() const {
    if (kind == Kind::constant) return value;
    return level - std::abs(amplitude);
}

void validate(const ModelParams& params) {
    if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
        throw ValidationError("alpha must be finite and > 0");
    }
    if (!(params.rho > 0.0) || !std::isfinite(params.rho)) {
        throw ValidationError("rho must be finite and > 0");
    }
    for (const Seasonal* s : {&params.seasonal_a, &params.seasonal_g}) {
        check_finite(s->value, "seasonal value");
        check_finite(s->level, "seasonal level");
        check_finite(s->amplitude, "seasonal amplitude");
        if (s->kind == Seasonal::Kind::sin && !(s->period_days > 0.0)) {
            throw ValidationError("seasonal period_days must be > 0");
        }
    }
    if (!(params.seasonal_g.lower_bound() > 0.0)) {
        throw ValidationError("seasonal_g must be strictly positive");
    }
}

void validate(const MarketState& state) {
    if (!(state.t >= 0.0) || !std::isfinite(state.t)) throw ValidationError("t must be >= 0");
    check_finite(state.x, "x");
    if (!(state.sigma2 >= 0.0) || !std::isfinite(state.sigma2)) {
        throw ValidationError("sigma2 must be finite and >= 0");
    }
}

void validate(const MeasureChange& mc, const SubordinatorSpec& sub, bool geometric) {
    check_finite(mc.theta1, "theta1");
    if (!in_DL(sub, mc.theta2)) {
        std::ostringstream os;
        os << "theta2 not in D_L: theta2=" << mc.theta2 << " must be < Theta_L/2 = "
           << esscher_bound(sub);
        throw ValidationError(os.str());
    }
    if (!(mc.beta1 >= 0.0 && mc.beta1 <= 1.0)) throw ValidationError("beta1 must lie in [0, 1]");
    if (!(mc.beta2 >= 0.0 && mc.beta2 <= 1.0)) throw ValidationError("beta2 must lie in [0, 1]");
    if (geometric && !(mc.beta1 < 1.0)) {
        throw ValidationError("beta1 must be < 1 for the geometric model");
    }
}

double lambda_fn(const SubordinatorSpec& sub, double theta, double beta, double a, double rho,
                 double u) {
    if (!(u < theta_max(sub) - theta)) {
        throw DomainError("lambda_fn: u must be < Theta_L - theta");
    }
    const double tilt = beta == 0.0 ? 0.0 : beta * tilt_ratio(sub, theta, u);
    return -rho * u + a + rho * tilt;
}

double u_min(const SubordinatorSpec& sub, double theta, double beta, RootMethod method) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("u_min: beta must lie in (0, 1)");
    check_theta(sub, theta, "u_min");
    if (method == RootMethod::bisection) return u_min_bisection(sub, theta, beta);

    if (const auto* d = std::get_if<DiracJump>(&sub.family())) return -std::log(beta) / d->a;
    const double m = theta_max(sub) - theta;
    if (sub.is_cp_exp()) return -m * std::expm1(std::log(beta) / 3.0);
    const double alpha_ts = std::get<TemperedStable>(sub.family()).alpha_ts;
    return -m * std::expm1(std::log(beta) / (2.0 - alpha_ts));
}

std::optional<double> beta_max(const SubordinatorSpec& sub, double theta, double a, double rho,
                               RootMethod method) {
    check_theta(sub, theta, "beta_max");
    if (!(a > 0.0)) throw DomainError("beta_max: a must be > 0");
    if (!(rho > 0.0)) throw DomainError("beta_max: rho must be > 0");
    if (theta >= theta_max(sub) - a / rho) return std::nullopt;

    if (method == RootMethod::closed_form) {
        if (const auto* d = std::get_if<DiracJump>(&sub.family())) {
            const double A = a * d->a / rho;
            return -lambert_w0(-std::exp(-(1.0 + A)));
        }
        if (sub.is_cp_exp()) {
            const double m = theta_max(sub) - theta;
            const double z = cubic_root_unit(2.0 - 2.0 * a / (rho * m));
            return z * z * z;
        }
    }

    // beta -> Lambda(u^m(beta)) increases from a - rho (Theta_L - theta) < 0 to a > 0.
    auto g = [&](double beta) {
        return lambda_fn(sub, theta, beta, a, rho, u_min(sub, theta, beta, method));
    };
    return detail::bisect_increasing(g, 0.0, 1.0, "beta_max");
}

DbReport in_Db(const SubordinatorSpec& sub, double theta, double beta, double a, double rho) {
    check_theta(sub, theta, "in_Db");
    if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("in_Db: beta must lie in [0, 1)");
    DbReport r;
    if (beta == 0.0) {
        const double width = theta_max(sub) - theta;
        r.u_min = width;
        r.min_value = std::isfinite(width) ? a - rho * width : -kInf;
        r.member = a / rho < width;
        return r;
    }
    r.u_min = u_min(sub, theta, beta);
    r.min_value = lambda_fn(sub, theta, beta, a, rho, r.u_min);
    r.member = r.min_value <= 0.0;
    return r;
}

double u_zero(const SubordinatorSpec& sub, double theta, double beta, double a, double rho,
              RootMethod method) {
    if (!(a >= 0.0)) throw DomainError("u_zero: a must be >= 0");
    const DbReport db = in_Db(sub, theta, beta, a, rho);
    // At beta = beta_m the minimum touches zero; accept rounding above it.
    const double touch_tol = 1e-12 * (1.0 + a);
    if (!db.member && db.min_value <= touch_tol) return db.u_min;
    if (!db.member) {
        std::ostringstream os;
        os << "u_zero: (theta=" << theta << ", beta=" << beta << ") not in D_b(" << a
           << "), min Lambda = " << db.min_value;
        throw NotInDbError(os.str());
    }
    if (a == 0.0) return 0.0;
    if (beta == 0.0) return a / rho;

    if (method == RootMethod::closed_form) {
        if (const auto* d = std::get_if<DiracJump>(&sub.family())) {
            const double A = a * d->a / rho;
            const double arg = std::max(-beta * std::exp(A - beta), -1.0 / std::numbers::e);
            return (A - beta - lambert_w0(arg)) / d->a;
        }
        if (sub.is_cp_exp()) {
            const double m = theta_max(sub) - theta;
            const double y = cubic_root_p3(beta, 2.0 - 2.0 * a / (rho * m));
            return m * (1.0 - 1.0 / y);
        }
    }

    // Lambda decreases from a > 0 at u = 0 to min_value <= 0 at u^m.
    if (db.min_value >= -touch_tol) return db.u_min;
    auto neg = [&](double u) { return -lambda_fn(sub, theta, beta, a, rho, u); };
    return detail::bisect_increasing(neg, 0.0, db.u_min, "u_zero");
}

AssumptionPReport check_assumption_P(const ModelParams& params) {
    const double alpha = params.alpha;
    const double rho = params.rho;
    // With r = rho / (2 alpha) and d = 1 - r: max = r^{1/d} / (2 rho), t* = -log(r) / (2 alpha d).
    const double d = 1.0 - rho / (2.0 * alpha);
    const double log_ratio = std::abs(d) < 1e-8 ? -1.0 - 0.5 * d : std::log1p(-d) / d;

    AssumptionPReport r;
    r.max_upsilon = std::exp(log_ratio) / (2.0 * rho);
    r.t_star = -log_ratio / (2.0 * alpha);
    const double theta_l = theta_max(params.sub);
    r.margin = theta_l - r.max_upsilon;
    r.holds = r.max_upsilon < theta_l;
    return r;
}

}  // namespace premia
