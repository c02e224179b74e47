#include "premia/subordinators.hpp"

#include "premia/errors.hpp"
#include "premia/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace premia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_below_theta_max(const SubordinatorSpec& spec, double theta, const char* what) {
    if (!(theta < theta_max(spec))) {
        std::ostringstream os;
        os << what << ": theta=" << theta << " outside (-inf, Theta_L=" << theta_max(spec) << ")";
        throw DomainError(os.str());
    }
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(name) + " must be finite and > 0");
    }
}

void check_scale(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("c must be finite and >= 0");
}

void check_theta_max(double lambda, Strictness mode) {
    check_positive(lambda, "lambda");
    if (mode == Strictness::strict && !(lambda > 1.0)) {
        throw ValidationError("lambda must exceed 1 (Theta_L > 1) in strict mode");
    }
}

// n! as double for small n.
double factorial(int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

}  // namespace

SubordinatorSpec SubordinatorSpec::dirac(double a) {
    check_positive(a, "a");
    return SubordinatorSpec(DiracJump{a});
}

SubordinatorSpec SubordinatorSpec::cp_exp(double c, double lambda, Strictness mode) {
    check_scale(c);
    check_theta_max(lambda, mode);
    return SubordinatorSpec(CompoundPoissonExp{c, lambda});
}

SubordinatorSpec SubordinatorSpec::tempered_stable(double c, double lambda, double alpha_ts,
                                                   Strictness mode) {
    check_scale(c);
    check_theta_max(lambda, mode);
    if (!(alpha_ts >= 0.0 && alpha_ts < 1.0)) throw ValidationError("alpha_ts must lie in [0, 1)");
    return SubordinatorSpec(TemperedStable{c, lambda, alpha_ts});
}

SubordinatorSpec SubordinatorSpec::from_family(const Family& family, Strictness mode) {
    return std::visit(overloaded{
                          [](const DiracJump& d) { return dirac(d.a); },
                          [mode](const CompoundPoissonExp& p) { return cp_exp(p.c, p.lambda, mode); },
                          [mode](const TemperedStable& t) {
                              return tempered_stable(t.c, t.lambda, t.alpha_ts, mode);
                          },
                      },
                      family);
}

bool SubordinatorSpec::is_null() const {
    return std::visit(overloaded{
                          [](const DiracJump&) { return false; },
                          [](const CompoundPoissonExp& p) { return p.c == 0.0; },
                          [](const TemperedStable& t) { return t.c == 0.0; },
                      },
                      family_);
}

std::string SubordinatorSpec::kind() const {
    return std::visit(overloaded{
                          [](const DiracJump&) { return std::string("dirac"); },
                          [](const CompoundPoissonExp&) { return std::string("cp_exp"); },
                          [](const TemperedStable&) { return std::string("tempered_stable"); },
                      },
                      family_);
}

bool operator==(const SubordinatorSpec& lhs, const SubordinatorSpec& rhs) {
    return std::visit(overloaded{
                          [](const DiracJump& x, const DiracJump& y) { return x.a == y.a; },
                          [](const CompoundPoissonExp& x, const CompoundPoissonExp& y) {
                              return x.c == y.c && x.lambda == y.lambda;
                          },
                          [](const TemperedStable& x, const TemperedStable& y) {
                              return x.c == y.c && x.lambda == y.lambda && x.alpha_ts == y.alpha_ts;
                          },
                          [](const auto&, const auto&) { return false; },
                      },
                      lhs.family_, rhs.family_);
}

double theta_max(const SubordinatorSpec& spec) {
    return std::visit(overloaded{
                          [](const DiracJump&) { return kInf; },
                          [](const CompoundPoissonExp& p) { return p.lambda; },
                          [](const TemperedStable& t) { return t.lambda; },
                      },
                      spec.family());
}

double esscher_bound(const SubordinatorSpec& spec) { return 0.5 * theta_max(spec); }

bool in_DL(const SubordinatorSpec& spec, double theta) {
    return std::isfinite(theta) && theta < esscher_bound(spec);
}

double cumulant(const SubordinatorSpec& spec, double theta) {
    require_below_theta_max(spec, theta, "cumulant");
    return cumulant_increment(spec, 0.0, theta);
}

double cumulant_deriv(const SubordinatorSpec& spec, double theta, int n) {
    if (n < 1 || n > 3) throw DomainError("cumulant_deriv: order must be 1, 2 or 3");
    require_below_theta_max(spec, theta, "cumulant_deriv");
    return std::visit(overloaded{
                          [&](const DiracJump& d) { return std::pow(d.a, n) * std::exp(theta * d.a); },
                          [&](const CompoundPoissonExp& p) {
                              return p.c * factorial(n) / std::pow(p.lambda - theta, n + 1);
                          },
                          [&](const TemperedStable& t) {
                              return t.c * std::tgamma(n - t.alpha_ts) *
                                     std::pow(t.lambda - theta, t.alpha_ts - n);
                          },
                      },
                      spec.family());
}

double cumulant_increment(const SubordinatorSpec& spec, double theta, double u) {
    require_below_theta_max(spec, theta, "cumulant_increment");
    require_below_theta_max(spec, theta + u, "cumulant_increment");
    return std::visit(overloaded{
                          [&](const DiracJump& d) {
                              return std::exp(d.a * theta) * std::expm1(d.a * u);
                          },
                          [&](const CompoundPoissonExp& p) {
                              const double m = p.lambda - theta;
                              return p.c * u / (m * (m - u));
                          },
                          [&](const TemperedStable& t) {
                              const double m = t.lambda - theta;
                              const double log_ratio = std::log1p(-u / m);
                              if (t.alpha_ts == 0.0) return -t.c * log_ratio;
                              // c Gamma(-a) ((m - u)^a - m^a)
                              return t.c * std::tgamma(-t.alpha_ts) * std::pow(m, t.alpha_ts) *
                                     std::expm1(t.alpha_ts * log_ratio);
                          },
                      },
                      spec.family());
}

double tilt_ratio(const SubordinatorSpec& spec, double theta, double u) {
    require_below_theta_max(spec, theta, "tilt_ratio");
    require_below_theta_max(spec, theta + u, "tilt_ratio");
    return std::visit(overloaded{
                          [&](const DiracJump& d) { return std::expm1(d.a * u) / d.a; },
                          [&](const CompoundPoissonExp& p) {
                              const double m = p.lambda - theta;
                              return 0.5 * m * std::expm1(-2.0 * std::log1p(-u / m));
                          },
                          [&](const TemperedStable& t) {
                              const double m = t.lambda - theta;
                              return m / (1.0 - t.alpha_ts) *
                                     std::expm1((t.alpha_ts - 1.0) * std::log1p(-u / m));
                          },
                      },
                      spec.family());
}

double first_over_second(const SubordinatorSpec& spec, double theta) {
    require_below_theta_max(spec, theta, "first_over_second");
    return std::visit(overloaded{
                          [](const DiracJump& d) { return 1.0 / d.a; },
                          [&](const CompoundPoissonExp& p) { return 0.5 * (p.lambda - theta); },
                          [&](const TemperedStable& t) {
                              return (t.lambda - theta) / (1.0 - t.alpha_ts);
                          },
                      },
                      spec.family());
}

double tilted_mass(const SubordinatorSpec& spec, double theta) {
    require_below_theta_max(spec, theta, "tilted_mass");
    return std::visit(overloaded{
                          [&](const DiracJump& d) { return std::exp(theta * d.a); },
                          [&](const CompoundPoissonExp& p) { return p.c / (p.lambda - theta); },
                          [](const TemperedStable& t) { return t.c == 0.0 ? 0.0 : kInf; },
                      },
                      spec.family());
}

double levy_quadrature_oracle(const SubordinatorSpec& spec,
                              const std::function<double(double)>& weight, double theta) {
    require_below_theta_max(spec, theta, "levy_quadrature_oracle");
    const QuadratureOptions opts{1e-11, 1e-10, 4000};

    return std::visit(
        overloaded{
            [&](const DiracJump& d) { return weight(d.a) * std::exp(theta * d.a); },
            [&](const CompoundPoissonExp& p) {
                if (p.c == 0.0) return 0.0;
                auto density = [&](double z) {
                    return weight(z) * p.c * std::exp((theta - p.lambda) * z);
                };
                const double head = integrate(density, 0.0, 1.0, opts).value;
                const double tail = integrate_to_infinity(density, 1.0, opts).value;
                return head + tail;
            },
            [&](const TemperedStable& t) {
                if (t.c == 0.0) return 0.0;
                const double k = 1.0 / (1.0 - t.alpha_ts);
                // z = s^k on (0, 1): dz = k s^{k-1} ds and z^{-1-alpha} dz = k s^{-1} ... ds
                auto head_integrand = [&](double s) {
                    if (s <= 0.0) return 0.0;
                    const double z = std::pow(s, k);
                    return k * weight(z) * t.c * std::exp((theta - t.lambda) * z) /
                           (std::pow(z, t.alpha_ts) * s);
                };
                auto tail_integrand = [&](double z) {
                    return weight(z) * t.c * std::pow(z, -1.0 - t.alpha_ts) *
                           std::exp((theta - t.lambda) * z);
                };
                const double head = integrate(head_integrand, 0.0, 1.0, opts).value;
                const double tail = integrate_to_infinity(tail_integrand, 1.0, opts).value;
                return head + tail;
            },
        },
        spec.family());
}

double lambert_w0(double x) {
    constexpr double inv_e = 1.0 / std::numbers::e;
    if (!(x >= -inv_e)) {
        // Allow the rounding of -1/e itself.
        if (x >= -inv_e - 4.0 * std::numeric_limits<double>::epsilon()) return -1.0;
        throw DomainError("lambert_w0: argument below -1/e");
    }
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;

    double w;
    const double q = x + inv_e;
    if (q < 1e-3) {
        // Series about the branch point in p = sqrt(2 (e x + 1)).
        const double p = std::sqrt(2.0 * std::numbers::e * q);
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
        if (q < 1e-12) return w;
    } else if (x < 1.0) {
        w = x < 0.0 ? x * (1.0 - x) : std::log1p(x);
        if (x < -0.25) {
            const double p = std::sqrt(2.0 * std::numbers::e * q);
            w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
        }
    } else {
        const double l = std::log(x);
        w = l - std::log(l > 1.0 ? l : 1.0);
        if (w < 0.5) w = 0.5;
    }

    // Halley iteration on f(w) = w e^w - x.
    for (int it = 0; it < 64; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    return w < -1.0 ? -1.0 : w;
}

}  // namespace premia
