#pragma once

// Measure-change parameters, model parameters, and the analysis of the
// auxiliary function
//
//   Lambda^{theta,beta,a}(u) = -rho u + a
//       + rho beta (kappa'(theta + u) - kappa'(theta)) / kappa''(theta)
//
// which bounds the Psi_1 component of the Riccati system.

#include "premia/subordinators.hpp"

#include <optional>
#include <string>

namespace premia {

/// Pricing measure Q parameters: level shifts theta1, theta2 and speed
/// reductions beta1, beta2.
struct MeasureChange {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;

    bool is_identity() const {
        return theta1 == 0.0 && theta2 == 0.0 && beta1 == 0.0 && beta2 == 0.0;
    }
    friend bool operator==(const MeasureChange&, const MeasureChange&) = default;
};

/// Deterministic seasonal function, constant or level + amplitude sin(2 pi t / period).
struct Seasonal {
    enum class Kind { constant, sin };
    Kind kind = Kind::constant;
    double value = 0.0;
    double level = 0.0;
    double amplitude = 0.0;
    double period_days = 365.0;

    static Seasonal constant(double v) {
        Seasonal s;
        s.value = v;
        return s;
    }
    static Seasonal sine(double level, double amplitude, double period_days) {
        Seasonal s;
        s.kind = Kind::sin;
        s.level = level;
        s.amplitude = amplitude;
        s.period_days = period_days;
        return s;
    }

    double operator()(double t) const;
    /// Infimum over all t.
    double lower_bound() const;
    friend bool operator==(const Seasonal&, const Seasonal&) = default;
};

struct ModelParams {
    double alpha = 0.127;  // mean reversion of X, per day
    double rho = 1.11;     // mean reversion of sigma^2, per day
    SubordinatorSpec sub = SubordinatorSpec::cp_exp(0.4, 2.0);
    Seasonal seasonal_a = Seasonal::constant(0.0);
    Seasonal seasonal_g = Seasonal::constant(1.0);
};

struct MarketState {
    double t = 0.0;
    double x = 2.5;
    double sigma2 = 0.0625;
};

/// Throws ValidationError naming the violated invariant.
void validate(const ModelParams& params);
void validate(const MarketState& state);
/// theta2 in D_L, beta1, beta2 in [0, 1]; geometric pricing also needs beta1 < 1.
void validate(const MeasureChange& mc, const SubordinatorSpec& sub, bool geometric = false);

/// Closed form per family, or the generic monotone bisection route.
enum class RootMethod { closed_form, bisection };

/// Lambda^{theta,beta,a}(u). DomainError if u >= Theta_L - theta.
double lambda_fn(const SubordinatorSpec& sub, double theta, double beta, double a, double rho,
                 double u);

/// Location u^m of the minimum of Lambda, for beta in (0, 1).
double u_min(const SubordinatorSpec& sub, double theta, double beta,
             RootMethod method = RootMethod::closed_form);

/// The unique beta_m in (0, 1) with min Lambda = 0, or nullopt when no
/// beta in (0, 1) is admissible (theta >= Theta_L - a / rho).
///
/// Closed forms exist for the Dirac family (Lambert W) and the compound
/// Poisson family (trigonometric root of a cubic). For tempered stable the
/// closed_form request falls back to bisection.
std::optional<double> beta_max(const SubordinatorSpec& sub, double theta, double a, double rho,
                               RootMethod method = RootMethod::closed_form);

/// Smallest zero u0 of Lambda, lying in (0, u^m]. NotInDbError unless
/// (theta, beta) is in D_b(a). closed_form uses Lambert W (Dirac) or the
/// cubic P3 (compound Poisson) and falls back to bisection otherwise.
double u_zero(const SubordinatorSpec& sub, double theta, double beta, double a, double rho,
              RootMethod method = RootMethod::bisection);

struct DbReport {
    bool member = false;
    double min_value = 0.0;  // min of Lambda over [0, Theta_L - theta)
    double u_min = 0.0;      // where it is attained (Theta_L - theta for beta = 0)
};

/// Membership of (theta, beta) in D_b(a), i.e. min_u Lambda <= 0.
DbReport in_Db(const SubordinatorSpec& sub, double theta, double beta, double a, double rho);

struct AssumptionPReport {
    bool holds = false;
    double max_upsilon = 0.0;
    double margin = 0.0;  // Theta_L - max_upsilon
    double t_star = 0.0;  // argmax of upsilon
};

/// max_t upsilon(alpha, rho, t) < Theta_L, in closed form.
AssumptionPReport check_assumption_P(const ModelParams& params);

}  // namespace premia
