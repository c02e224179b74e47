#pragma once

// Forward prices, swap prices and risk premia for the two spot models
//
//   arithmetic  S(t) = Lambda_a(t) + X(t)
//   geometric   S(t) = Lambda_g(t) exp(X(t))
//
// under P and under the measure change Q. Times are absolute days; tau = T - t
// is the time to maturity.

#include "premia/admissibility.hpp"
#include "premia/parallel.hpp"
#include "premia/riccati.hpp"

#include <optional>
#include <string>
#include <vector>

namespace premia {

enum class SpotModel { arithmetic, geometric };

/// "arithmetic" or "geometric"; parse_spot_model throws ValidationError otherwise.
std::string to_string(SpotModel model);
SpotModel parse_spot_model(const std::string& name);

/// F_Q(t, T) in the arithmetic model. beta1 = 1 uses the limit
/// Lambda_a(T) + X(t) + theta1 (T - t). ValidationError if T < t.
double forward_arithmetic(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                          double T);

struct ArithmeticPremium {
    double value = 0.0;
    double limit_infinity = 0.0;  // theta1 / (alpha (1 - beta1)); +-inf or 0 at beta1 = 1
    double slope_zero = 0.0;      // X(t) alpha beta1 + theta1
};

/// F_Q - F_P in the arithmetic model at time to maturity tau >= 0.
ArithmeticPremium premium_arithmetic(const ModelParams& params, const MeasureChange& mc,
                                     const MarketState& state, double tau);

/// Whether sup_{s <= horizon} upsilon(s) < Theta_L, i.e. E_P[exp(X(T))] is finite
/// for every T - t <= horizon.
bool check_finiteness_P(const ModelParams& params, double horizon);

/// int_0^tau kappa_L(upsilon(s)) ds. NotFiniteError past the finiteness bound.
double psi0_P(const ModelParams& params, double tau);

/// int_0^inf kappa_L(upsilon(s)) ds. NotFiniteError if Assumption P fails.
double psi0_P_infinity(const ModelParams& params);

/// E_P[S(T) | F_t] in the geometric model, in closed form up to one quadrature.
double forward_geometric_P(const ModelParams& params, const MarketState& state, double T);

/// F_Q(t, T) in the geometric model from a Riccati solution for the same
/// (params, mc). BlowUpUpstreamError if the solve was stopped by the guard,
/// HorizonExceededError if T - t lies beyond it, ValidationError on a
/// mismatched solution.
double forward_geometric(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                         double T, const RiccatiSolution& riccati);

struct SigmaDiagnostics {
    double value = 0.0;           // Sigma(t, tau)
    double limit_infinity = 0.0;  // lim Sigma as tau -> inf
    double slope_zero = 0.0;      // d Sigma / d tau at tau = 0
};

/// Sigma = (Psi_0 - Psi_0^P) + (Psi_1 - Psi_1^P) sigma^2 + (Psi_2 - Psi_2^P) X, whose
/// sign is the sign of the geometric premium. The long-end limit takes the
/// long_run stored on the solution when present and computes it otherwise.
SigmaDiagnostics sigma_diagnostics(const ModelParams& params, const MeasureChange& mc,
                                   const MarketState& state, double tau, const RiccatiSolution& riccati);

/// Value of Sigma alone, without the long-end limit.
double sigma_value(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                   double tau, const RiccatiSolution& riccati);

/// F_Q - F_P in the geometric model as F_P expm1(Sigma).
double premium_geometric(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                         double tau, const RiccatiSolution& riccati);

/// (1 / (T2 - T1)) int_{T1}^{T2} F_Q(t, T) dT. The geometric model needs a
/// Riccati solution covering T2 - t unless mc is the identity.
double swap_price(const ModelParams& params, const MeasureChange& mc, const MarketState& state, double T1,
                  double T2, SpotModel model, const RiccatiSolution* riccati = nullptr);

struct PremiumCurve {
    SpotModel model = SpotModel::arithmetic;
    std::vector<double> taus;  // days
    std::vector<double> forward_q;
    std::vector<double> forward_p;
    std::vector<double> premium;
    std::vector<double> sigma;  // Sigma for the geometric model, the premium itself for the arithmetic one
    double slope_zero = 0.0;
    double limit_infinity = 0.0;
};

/// 0, 1, ..., 360 days.
std::vector<double> default_tau_grid();

/// Premium curve over taus. The geometric model solves the Riccati system
/// once up to max(taus) and shares it across points; long_end controls
/// whether the long-run limit of Sigma is computed.
PremiumCurve premium_curve(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                           const std::vector<double>& taus, SpotModel model,
                           Execution exec = Execution::parallel, bool long_end = true);

/// CSV with header tau_days,forward_q,forward_p,premium,sigma.
std::string premium_curve_csv(const PremiumCurve& curve);

}  // namespace premia
