#pragma once

// Generalised Riccati system of the geometric model under Q:
//
//   Psi_2(t) = exp(-alpha (1 - beta1) t)
//   Psi_1'   = -rho Psi_1 + Psi_2(t)^2 / 2 + rho beta2 tilt_ratio(theta2, Psi_1)
//   Psi_0(t) = theta1 int_0^t Psi_2 + int_0^t (kappa(Psi_1 + theta2) - kappa(theta2)) ds
//
// with Psi_0(0) = Psi_1(0) = 0 and Psi_2(0) = 1.

#include "premia/admissibility.hpp"
#include "premia/ode.hpp"

#include <optional>
#include <string>
#include <vector>

namespace premia {

struct RiccatiOptions {
    double tol = 1e-10;        // local tolerance of the embedded pair
    double psi1_cap = 100.0;   // guard: Psi_1 above this counts as blow-up
    double slope_cap = 1e8;    // guard: |Psi_1'| above this counts as blow-up
    double guard_gap = 1e-6;   // guard: Psi_1 + theta2 within this of Theta_L
};

/// Psi_1 on the adaptive grid of accepted steps, with dense output.
struct Psi1Solution {
    ode::Result<1> ode;
    std::vector<double> grid;
    std::vector<double> values;
    std::optional<double> blow_up;  // time at which the guard fired
};

struct LongRun {
    double psi0_infinity = 0.0;
    double decay_rate_fit = 0.0;      // slope of log ||(Psi_1, Psi_2)|| over the tail
    double nearest_candidate = 0.0;   // -alpha (1 - beta1) or -rho (1 - beta2), whichever is closer
    double horizon = 0.0;             // horizon T used for the tail truncation
    double richardson_gap = 0.0;      // |I(2T) - I(T)| of the kappa integral
};

class RiccatiSolution {
public:
    ModelParams params;
    MeasureChange mc;
    std::vector<double> grid;
    std::vector<double> psi0;
    std::vector<double> psi1;
    std::vector<double> psi2;
    bool admissible = false;
    std::optional<double> blow_up;
    std::optional<LongRun> long_run;

    /// End of the solved interval (the requested horizon unless the guard fired).
    double horizon() const { return horizon_; }
    double max_psi1() const;

    /// Values at any t in [0, horizon()] from the dense output.
    /// HorizonExceededError beyond the solved interval.
    double psi0_at(double t) const;
    double psi1_at(double t) const;
    double psi2_at(double t) const;

private:
    friend RiccatiSolution solve_riccati(const ModelParams&, const MeasureChange&, double,
                                         const RiccatiOptions&);
    void check_time(double t) const;
    double kappa_integral(std::size_t seg, double t) const;

    Psi1Solution psi1_sol_;
    std::vector<double> kappa_int_;  // int_0^{t_i} (kappa(Psi_1 + theta2) - kappa(theta2)) at step starts
    double horizon_ = 0.0;
};

/// Closed form Psi_2.
double psi2_closed(const ModelParams& params, const MeasureChange& mc, double t);

/// Closed form Psi_1 for beta1 = beta2 = 0, independent of theta.
double psi1_closed_esscher(const ModelParams& params, double t);

/// theta1 int_0^t Psi_2 = theta1 (1 - e^{-abar t}) / abar, abar = alpha (1 - beta1).
double psi0_level_term(const ModelParams& params, const MeasureChange& mc, double t);

/// Integrates the Psi_1 equation on [0, horizon]. Blow-up is recorded, not thrown.
Psi1Solution solve_psi1(const ModelParams& params, const MeasureChange& mc, double horizon,
                        const RiccatiOptions& opts = {});

/// Psi_0 on the grid of psi1, by 7-point Gauss-Legendre on every step along the dense output.
std::vector<double> psi0_from_psi1(const ModelParams& params, const MeasureChange& mc,
                                   const Psi1Solution& psi1);

/// Full solve. Validates (params, mc) with beta1 < 1 and records membership of
/// (theta2, beta2) in D_b(1/2); the solve runs either way.
RiccatiSolution solve_riccati(const ModelParams& params, const MeasureChange& mc, double horizon,
                              const RiccatiOptions& opts = {});

struct LongRunOptions {
    double tol = 1e-10;            // Psi_1 must fall below this
    double integrand_tol = 1e-10;  // tail truncation, relative to 1 + |integral|
    double initial_horizon = 100.0;
    double max_horizon = 20000.0;
    RiccatiOptions riccati;
};

/// psi0_infinity and the fitted decay rate. NotConvergedError if Psi_1 stays
/// above tol up to max_horizon; BlowUpUpstreamError if the guard fires.
LongRun long_run(const ModelParams& params, const MeasureChange& mc, const LongRunOptions& opts = {});

/// Vector field (Lambda_1, Lambda_2) of the autonomous (Psi_1, Psi_2) system:
/// Lambda_1 = -rho u1 + u2^2 / 2 + rho beta2 tilt_ratio(theta2, u1), Lambda_2 = -alpha (1 - beta1) u2.
std::pair<double, double> riccati_field(const ModelParams& params, const MeasureChange& mc,
                                        double u1, double u2);

/// CSV with header t,psi0,psi1,psi2 and 17 significant digits.
std::string riccati_csv(const RiccatiSolution& sol);

}  // namespace premia
