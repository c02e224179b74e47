#include "premia/pricing.hpp"

#include "premia/csv.hpp"
#include "premia/errors.hpp"
#include "premia/quadrature.hpp"
#include "premia/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace premia {

namespace {

double time_to_maturity(const MarketState& state, double T) {
    if (!std::isfinite(T)) throw ValidationError("maturity T must be finite");
    if (!(T >= state.t)) {
        std::ostringstream os;
        os << "maturity T=" << T << " precedes the current time t=" << state.t;
        throw ValidationError(os.str());
    }
    return T - state.t;
}

void require_tau(double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be finite and >= 0");
}

void require_matching(const ModelParams& params, const MeasureChange& mc, const RiccatiSolution& r) {
    if (!(r.mc == mc) || r.params.alpha != params.alpha || r.params.rho != params.rho ||
        !(r.params.sub == params.sub)) {
        throw ValidationError("Riccati solution was computed for different parameters");
    }
    if (r.blow_up) {
        std::ostringstream os;
        os << "Riccati solution blew up at t=" << *r.blow_up;
        throw BlowUpUpstreamError(os.str());
    }
}

void require_finite_P(const ModelParams& params, double tau) {
    if (!check_finiteness_P(params, tau)) {
        std::ostringstream os;
        os << "E_P[exp(X(T))] is infinite: upsilon reaches Theta_L=" << theta_max(params.sub)
           << " within tau=" << tau;
        throw NotFiniteError(os.str());
    }
}

double abar(const ModelParams& params, const MeasureChange& mc) { return params.alpha * (1.0 - mc.beta1); }

}  // namespace

std::string to_string(SpotModel model) {
    return model == SpotModel::arithmetic ? "arithmetic" : "geometric";
}

SpotModel parse_spot_model(const std::string& name) {
    if (name == "arithmetic") return SpotModel::arithmetic;
    if (name == "geometric") return SpotModel::geometric;
    throw ValidationError("model must be 'arithmetic' or 'geometric', got '" + name + "'");
}

double forward_arithmetic(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                          double T) {
    validate(params);
    validate(state);
    validate(mc, params.sub, false);
    const double tau = time_to_maturity(state, T);
    const double ab = abar(params, mc);
    double f = params.seasonal_a(T) + state.x * std::exp(-ab * tau);
    if (mc.theta1 != 0.0) f += mc.theta1 * tau * exprel_decay(ab * tau);
    return f;
}

ArithmeticPremium premium_arithmetic(const ModelParams& params, const MeasureChange& mc,
                                     const MarketState& state, double tau) {
    validate(params);
    validate(state);
    validate(mc, params.sub, false);
    require_tau(tau);
    const double ab = abar(params, mc);
    ArithmeticPremium r;
    // X (e^{-abar tau} - e^{-alpha tau}) + theta1 int_0^tau e^{-abar s} ds
    r.value = -state.x * std::exp(-ab * tau) * std::expm1(-params.alpha * mc.beta1 * tau);
    if (mc.theta1 != 0.0) r.value += mc.theta1 * tau * exprel_decay(ab * tau);
    if (mc.theta1 == 0.0) {
        r.limit_infinity = mc.beta1 < 1.0 ? 0.0 : state.x;
    } else if (ab > 0.0) {
        r.limit_infinity = mc.theta1 / ab;
    } else {
        r.limit_infinity = std::copysign(std::numeric_limits<double>::infinity(), mc.theta1);
    }
    r.slope_zero = state.x * params.alpha * mc.beta1 + mc.theta1;
    return r;
}

bool check_finiteness_P(const ModelParams& params, double horizon) {
    const double theta_l = theta_max(params.sub);
    if (std::isinf(theta_l)) return true;
    const auto rep = check_assumption_P(params);
    const double t = std::min(std::max(horizon, 0.0), rep.t_star);
    return upsilon(params.alpha, params.rho, t) < theta_l;
}

double psi0_P(const ModelParams& params, double tau) {
    require_tau(tau);
    require_finite_P(params, tau);
    if (params.sub.is_null() || tau == 0.0) return 0.0;
    auto f = [&](double s) { return cumulant(params.sub, upsilon(params.alpha, params.rho, s)); };
    return integrate(f, 0.0, tau).value;
}

double psi0_P_infinity(const ModelParams& params) {
    if (!check_assumption_P(params).holds) {
        throw NotFiniteError("E_P[exp(X(T))] is infinite for large tau: Assumption P fails");
    }
    if (params.sub.is_null()) return 0.0;
    auto f = [&](double s) { return cumulant(params.sub, upsilon(params.alpha, params.rho, s)); };
    return integrate_to_infinity(f, 0.0).value;
}

double forward_geometric_P(const ModelParams& params, const MarketState& state, double T) {
    validate(params);
    validate(state);
    const double tau = time_to_maturity(state, T);
    const double e = state.x * std::exp(-params.alpha * tau) +
                     state.sigma2 * upsilon(params.alpha, params.rho, tau) + psi0_P(params, tau);
    return params.seasonal_g(T) * std::exp(e);
}

double forward_geometric(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                         double T, const RiccatiSolution& riccati) {
    validate(params);
    validate(state);
    validate(mc, params.sub, true);
    require_matching(params, mc, riccati);
    const double tau = time_to_maturity(state, T);
    const double e =
        riccati.psi0_at(tau) + riccati.psi1_at(tau) * state.sigma2 + riccati.psi2_at(tau) * state.x;
    return params.seasonal_g(T) * std::exp(e);
}

double sigma_value(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                   double tau, const RiccatiSolution& riccati) {
    validate(params);
    validate(state);
    validate(mc, params.sub, true);
    require_matching(params, mc, riccati);
    require_tau(tau);
    const double d0 = riccati.psi0_at(tau) - psi0_P(params, tau);
    const double d1 = riccati.psi1_at(tau) - upsilon(params.alpha, params.rho, tau);
    const double d2 = riccati.psi2_at(tau) - std::exp(-params.alpha * tau);
    return d0 + d1 * state.sigma2 + d2 * state.x;
}

SigmaDiagnostics sigma_diagnostics(const ModelParams& params, const MeasureChange& mc,
                                   const MarketState& state, double tau, const RiccatiSolution& riccati) {
    SigmaDiagnostics d;
    d.value = sigma_value(params, mc, state, tau, riccati);
    const LongRun lr = riccati.long_run ? *riccati.long_run : long_run(params, mc);
    d.limit_infinity = lr.psi0_infinity - psi0_P_infinity(params);
    d.slope_zero = mc.theta1 + params.alpha * mc.beta1 * state.x;
    return d;
}

double premium_geometric(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                         double tau, const RiccatiSolution& riccati) {
    const double sigma = sigma_value(params, mc, state, tau, riccati);
    return forward_geometric_P(params, state, state.t + tau) * std::expm1(sigma);
}

double swap_price(const ModelParams& params, const MeasureChange& mc, const MarketState& state, double T1,
                  double T2, SpotModel model, const RiccatiSolution* riccati) {
    if (!(state.t <= T1) || !(T1 < T2) || !std::isfinite(T2)) {
        throw ValidationError("swap delivery period must satisfy t <= T1 < T2");
    }
    std::function<double(double)> f;
    if (model == SpotModel::arithmetic) {
        f = [&](double T) { return forward_arithmetic(params, mc, state, T); };
    } else if (riccati != nullptr) {
        f = [&](double T) { return forward_geometric(params, mc, state, T, *riccati); };
    } else if (mc.is_identity()) {
        f = [&](double T) { return forward_geometric_P(params, state, T); };
    } else {
        throw ValidationError("geometric swap under a measure change needs a Riccati solution");
    }
    return integrate(f, T1, T2).value / (T2 - T1);
}

std::vector<double> default_tau_grid() {
    std::vector<double> taus(361);
    for (int i = 0; i <= 360; ++i) taus[i] = i;
    return taus;
}

PremiumCurve premium_curve(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                           const std::vector<double>& taus, SpotModel model, Execution exec, bool long_end) {
    validate(params);
    validate(state);
    validate(mc, params.sub, model == SpotModel::geometric);
    for (double tau : taus) require_tau(tau);

    PremiumCurve c;
    c.model = model;
    c.taus = taus;
    const std::size_t n = taus.size();
    c.forward_q.resize(n);
    c.forward_p.resize(n);
    c.premium.resize(n);
    c.sigma.resize(n);

    if (model == SpotModel::arithmetic) {
        const MeasureChange identity{};
        for_each_index(
            n,
            [&](std::size_t i) {
                const double T = state.t + taus[i];
                c.forward_q[i] = forward_arithmetic(params, mc, state, T);
                c.forward_p[i] = forward_arithmetic(params, identity, state, T);
                c.premium[i] = premium_arithmetic(params, mc, state, taus[i]).value;
                c.sigma[i] = c.premium[i];
            },
            exec);
        const auto lim = premium_arithmetic(params, mc, state, 0.0);
        c.slope_zero = lim.slope_zero;
        c.limit_infinity = lim.limit_infinity;
        return c;
    }

    const double horizon = n ? *std::max_element(taus.begin(), taus.end()) : 0.0;
    RiccatiSolution sol = solve_riccati(params, mc, horizon);
    if (long_end && !sol.blow_up) sol.long_run = long_run(params, mc);
    for_each_index(
        n,
        [&](std::size_t i) {
            const double T = state.t + taus[i];
            const double fp = forward_geometric_P(params, state, T);
            const double s = sigma_value(params, mc, state, taus[i], sol);
            c.forward_p[i] = fp;
            c.forward_q[i] = forward_geometric(params, mc, state, T, sol);
            c.sigma[i] = s;
            c.premium[i] = fp * std::expm1(s);
        },
        exec);
    c.slope_zero = mc.theta1 + params.alpha * mc.beta1 * state.x;
    c.limit_infinity = sol.long_run ? sol.long_run->psi0_infinity - psi0_P_infinity(params)
                                    : std::numeric_limits<double>::quiet_NaN();
    return c;
}

std::string premium_curve_csv(const PremiumCurve& curve) {
    std::string out = "tau_days,forward_q,forward_p,premium,sigma\n";
    for (std::size_t i = 0; i < curve.taus.size(); ++i) {
        out += csv_row({curve.taus[i], curve.forward_q[i], curve.forward_p[i], curve.premium[i], curve.sigma[i]});
    }
    return out;
}

}  // namespace premia
