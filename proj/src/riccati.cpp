#include "premia/riccati.hpp"

#include "premia/csv.hpp"
#include "premia/errors.hpp"
#include "premia/special.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace premia {

namespace {

using GL7 = boost::math::quadrature::gauss<double, 7>;

// Below this Psi_1 is dominated by integration error and unusable for the rate fit.
constexpr double kFitFloor = 1e-8;

double abar(const ModelParams& params, const MeasureChange& mc) {
    return params.alpha * (1.0 - mc.beta1);
}

// kappa(Psi_1 + theta2) - kappa(theta2) along a segment of the dense output.
double segment_kappa_integral(const SubordinatorSpec& sub, double theta2,
                              const ode::Segment<1>& seg, double a, double b) {
    if (sub.is_null() || b <= a) return 0.0;
    auto g = [&](double s) { return cumulant_increment(sub, theta2, seg.eval(s)[0]); };
    return GL7::integrate(g, a, b);
}

}  // namespace

double psi2_closed(const ModelParams& params, const MeasureChange& mc, double t) {
    return std::exp(-abar(params, mc) * t);
}

double psi1_closed_esscher(const ModelParams& params, double t) {
    return upsilon(params.alpha, params.rho, t);
}

double psi0_level_term(const ModelParams& params, const MeasureChange& mc, double t) {
    if (mc.theta1 == 0.0) return 0.0;
    return mc.theta1 * t * exprel_decay(abar(params, mc) * t);
}

Psi1Solution solve_psi1(const ModelParams& params, const MeasureChange& mc, double horizon,
                        const RiccatiOptions& opts) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be >= 0");
    const SubordinatorSpec& sub = params.sub;
    const double theta2 = mc.theta2;
    const double top = theta_max(sub) - theta2;
    const double rho = params.rho;
    const double two_abar = 2.0 * abar(params, mc);
    const double beta2 = mc.beta2;

    auto rhs = [&](double t, const ode::State<1>& y) -> ode::State<1> {
        const double u = y[0];
        if (!(u < top)) return {std::numeric_limits<double>::quiet_NaN()};
        double v = -rho * u + 0.5 * std::exp(-two_abar * t);
        if (beta2 != 0.0) v += rho * beta2 * tilt_ratio(sub, theta2, u);
        return {v};
    };
    // Finite-time blow-up drives the step size below rounding before Psi_1
    // gets within guard_gap of the boundary, so the slope is watched too.
    auto guard = [&](double t, const ode::State<1>& y) {
        if (!(y[0] + theta2 < theta_max(sub) - opts.guard_gap) || y[0] > opts.psi1_cap) return true;
        const double slope = rhs(t, y)[0];
        return !(std::abs(slope) <= opts.slope_cap * (1.0 + std::abs(y[0])));
    };

    ode::Options o;
    o.rtol = opts.tol;
    o.atol = 1e-2 * opts.tol;

    Psi1Solution sol;
    sol.ode = ode::integrate<1>(rhs, 0.0, {0.0}, horizon, o, guard);
    if (sol.ode.status == ode::Status::guard_stop) sol.blow_up = sol.ode.stop_time;
    sol.grid.push_back(0.0);
    sol.values.push_back(0.0);
    for (const auto& seg : sol.ode.segments) {
        sol.grid.push_back(seg.t1());
        sol.values.push_back(seg.eval(seg.t1())[0]);
    }
    return sol;
}

std::vector<double> psi0_from_psi1(const ModelParams& params, const MeasureChange& mc,
                                   const Psi1Solution& psi1) {
    std::vector<double> out;
    out.reserve(psi1.grid.size());
    out.push_back(0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < psi1.ode.segments.size(); ++i) {
        const auto& seg = psi1.ode.segments[i];
        acc += segment_kappa_integral(params.sub, mc.theta2, seg, seg.t0, seg.t1());
        out.push_back(psi0_level_term(params, mc, psi1.grid[i + 1]) + acc);
    }
    return out;
}

RiccatiSolution solve_riccati(const ModelParams& params, const MeasureChange& mc, double horizon,
                              const RiccatiOptions& opts) {
    validate(params);
    validate(mc, params.sub, true);

    RiccatiSolution sol;
    sol.params = params;
    sol.mc = mc;
    sol.admissible = mc.beta2 < 1.0 && in_Db(params.sub, mc.theta2, mc.beta2, 0.5, params.rho).member;

    sol.psi1_sol_ = solve_psi1(params, mc, horizon, opts);
    const Psi1Solution& p1 = sol.psi1_sol_;
    sol.blow_up = p1.blow_up;
    sol.horizon_ = p1.blow_up ? p1.grid.back() : horizon;
    sol.grid = p1.grid;
    sol.psi1 = p1.values;
    sol.psi0 = psi0_from_psi1(params, mc, p1);
    sol.psi2.reserve(sol.grid.size());
    for (double t : sol.grid) sol.psi2.push_back(psi2_closed(params, mc, t));

    sol.kappa_int_.reserve(p1.ode.segments.size());
    for (std::size_t i = 0; i < p1.ode.segments.size(); ++i) {
        sol.kappa_int_.push_back(sol.psi0[i] - psi0_level_term(params, mc, sol.grid[i]));
    }
    return sol;
}

void RiccatiSolution::check_time(double t) const {
    if (!(t >= 0.0)) throw DomainError("Riccati solution queried at negative time");
    if (t > horizon_ * (1.0 + 1e-12) + 1e-300) {
        std::ostringstream os;
        os << "t=" << t << " beyond the solved horizon " << horizon_;
        throw HorizonExceededError(os.str());
    }
}

double RiccatiSolution::kappa_integral(std::size_t seg, double t) const {
    const auto& s = psi1_sol_.ode.segments[seg];
    return kappa_int_[seg] + segment_kappa_integral(params.sub, mc.theta2, s, s.t0, std::min(t, s.t1()));
}

double RiccatiSolution::psi1_at(double t) const {
    check_time(t);
    if (psi1_sol_.ode.segments.empty()) return 0.0;
    return psi1_sol_.ode.eval(std::min(t, horizon_))[0];
}

double RiccatiSolution::psi2_at(double t) const {
    check_time(t);
    return psi2_closed(params, mc, t);
}

double RiccatiSolution::psi0_at(double t) const {
    check_time(t);
    if (psi1_sol_.ode.segments.empty()) return 0.0;
    const double tc = std::min(t, horizon_);
    return psi0_level_term(params, mc, tc) + kappa_integral(psi1_sol_.ode.locate(tc), tc);
}

double RiccatiSolution::max_psi1() const {
    double m = 0.0;
    for (const auto& seg : psi1_sol_.ode.segments) {
        // Dense output sampled inside each step catches interior maxima.
        for (int k = 1; k <= 8; ++k) m = std::max(m, seg.eval(seg.t0 + seg.h * k / 8.0)[0]);
    }
    return m;
}

LongRun long_run(const ModelParams& params, const MeasureChange& mc, const LongRunOptions& opts) {
    const double ab = abar(params, mc);
    for (double H = opts.initial_horizon; H <= opts.max_horizon; H *= 2.0) {
        const RiccatiSolution sol = solve_riccati(params, mc, 2.0 * H, opts.riccati);
        if (sol.blow_up) {
            std::ostringstream os;
            os << "Riccati guard fired at t=" << *sol.blow_up;
            throw BlowUpUpstreamError(os.str());
        }
        const double psi1_h = sol.psi1_at(H);
        const double i_h = sol.psi0_at(H) - psi0_level_term(params, mc, H);
        const double i_2h = sol.psi0_at(2.0 * H) - psi0_level_term(params, mc, 2.0 * H);
        const double integrand =
            params.sub.is_null() ? 0.0 : std::abs(cumulant_increment(params.sub, mc.theta2, psi1_h));
        if (!(std::abs(psi1_h) < opts.tol) || !(integrand < opts.integrand_tol * (1.0 + std::abs(i_h)))) {
            continue;
        }

        LongRun lr;
        lr.horizon = H;
        lr.psi0_infinity = (mc.theta1 == 0.0 ? 0.0 : mc.theta1 / ab) + i_2h;
        lr.richardson_gap = std::abs(i_2h - i_h);

        // Least squares slope of log ||(Psi_1, Psi_2)|| on the last tenth of the
        // window in which Psi_1 is still resolved well above the solver atol.
        double t_end = H;
        for (std::size_t i = 1; i < sol.grid.size() && sol.grid[i] <= H; ++i) {
            if (sol.psi1[i] < kFitFloor && sol.grid[i] > 1.0) {
                t_end = sol.grid[i];
                break;
            }
        }
        constexpr int n = 50;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (int k = 0; k < n; ++k) {
            const double t = t_end * (0.9 + 0.1 * k / (n - 1));
            const double p1 = std::max(sol.psi1_at(t), 0.0);
            // log hypot(p1, e^{-abar t}) without underflow of Psi_2
            const double l2 = -ab * t;
            const double l1 = p1 > 0.0 ? std::log(p1) : -std::numeric_limits<double>::infinity();
            const double hi = std::max(l1, l2);
            const double y = hi + 0.5 * std::log1p(std::exp(2.0 * (std::min(l1, l2) - hi)));
            sx += t;
            sy += y;
            sxx += t * t;
            sxy += t * y;
        }
        lr.decay_rate_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double c1 = -ab;
        const double c2 = -params.rho * (1.0 - mc.beta2);
        lr.nearest_candidate =
            std::abs(lr.decay_rate_fit - c1) <= std::abs(lr.decay_rate_fit - c2) ? c1 : c2;
        return lr;
    }
    std::ostringstream os;
    os << "Psi_1 has not decayed below " << opts.tol << " by t=" << opts.max_horizon;
    throw NotConvergedError(os.str());
}

std::pair<double, double> riccati_field(const ModelParams& params, const MeasureChange& mc,
                                        double u1, double u2) {
    const double ab = abar(params, mc);
    double l1 = std::numeric_limits<double>::quiet_NaN();
    if (u1 + mc.theta2 < theta_max(params.sub)) {
        l1 = -params.rho * u1 + 0.5 * u2 * u2;
        if (mc.beta2 != 0.0) l1 += params.rho * mc.beta2 * tilt_ratio(params.sub, mc.theta2, u1);
    }
    return {l1, -ab * u2};
}

std::string riccati_csv(const RiccatiSolution& sol) {
    std::string out = "t,psi0,psi1,psi2\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        out += csv_row({sol.grid[i], sol.psi0[i], sol.psi1[i], sol.psi2[i]});
    }
    return out;
}

}  // namespace premia
