#pragma once

// Monte Carlo simulation of (X, sigma^2) under P and under Q.
//
// sigma^2 decays at rate rho between jumps. Under P the jumps arrive as a
// Poisson process with rate |l| and sizes l / |l|. Under Q the jump
// compensator is e^{theta2 z} (1 + k z sigma^2(t-)) l(dz) dt with
// k = rho beta2 / kappa''(theta2), simulated by thinning. Given the sigma^2
// path, X is Gaussian over each observation interval with a variance that
// is integrated in closed form piece by piece between jumps.
//
// Tempered stable subordinators have infinitely many small jumps; they are
// simulated only with an explicit threshold eps: jumps above eps are drawn
// exactly and the mean of the smaller ones is added as drift.

#include "premia/admissibility.hpp"
#include "premia/parallel.hpp"
#include "premia/pricing.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace premia {

/// std::nullopt simulates under P; a MeasureChange simulates under Q.
using Measure = std::optional<MeasureChange>;

struct PathConfig {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 42;
    double horizon = 30.0;          // days after state.t
    std::vector<double> obs_grid;   // offsets from state.t in [0, horizon]; empty means {horizon}
    double ts_epsilon = 0.0;        // jump threshold for tempered stable; 0 disables
    Execution exec = Execution::parallel;
};

/// ValidationError unless n_paths >= 1 and obs_grid is sorted inside [0, horizon].
void validate(const PathConfig& config);

struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Mean and standard error of per-path values, reduced by pairwise
/// summation in path order.
SimEstimate summarize(const std::vector<double>& values, std::uint64_t seed);

/// Engine for path `path` and stream `stream` (0 volatility, 1 Brownian
/// increments), seeded by a splitmix64 hash of (seed, path, stream).
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path, std::uint64_t stream);

/// State-dependent jump law of the subordinator under P or Q:
/// intensity I0 + I1 sigma^2 and the matching jump-size distribution.
class JumpLaw {
public:
    /// UnsupportedModelError for tempered stable without eps > 0.
    JumpLaw(const ModelParams& params, const Measure& measure, double ts_epsilon = 0.0);

    double intensity(double sigma2) const { return i0_ + i1_ * sigma2; }
    double i0() const { return i0_; }
    double i1() const { return i1_; }

    /// sigma^2 between jumps relaxes as level + (s - level) e^{-rate dt};
    /// level = 0 and rate = rho except under eps truncation.
    double level() const { return level_; }
    double rate() const { return rate_; }
    double decay(double sigma2, double dt) const;

    /// Draws a jump size given the pre-jump sigma^2.
    double sample_size(double sigma2, std::mt19937_64& rng) const;

    /// Mean jump size given sigma^2, in closed form.
    double mean_size(double sigma2) const;

private:
    enum class Kind { none, dirac, cp_exp, ts };
    Kind kind_ = Kind::none;
    double i0_ = 0.0, i1_ = 0.0;
    double level_ = 0.0, rate_ = 0.0;
    double k_ = 0.0;        // rho beta2 / kappa''(theta2); 0 under P
    double a_ = 0.0;        // Dirac jump size
    double c_ = 0.0, m_ = 0.0, alpha_ts_ = 0.0, eps_ = 0.0;
    double mass1_ = 0.0;    // int_{z > eps} z e^{theta z} l(dz)
    double mass2_ = 0.0;    // int_{z > eps} z^2 e^{theta z} l(dz)
};

struct JumpRecord {
    double time = 0.0;  // offset from state.t
    double size = 0.0;
};

struct VolPath {
    double sigma2_0 = 0.0;
    std::vector<JumpRecord> jumps;
    std::vector<double> sigma2;  // at the obs_grid times (right limits)
    std::size_t proposals = 0;   // thinning candidates, accepted or not
};

/// One sigma^2 path on [0, config.horizon].
VolPath simulate_vol_path(const JumpLaw& law, const MarketState& state, const PathConfig& config,
                          std::uint64_t path);

/// config.n_paths sigma^2 paths.
std::vector<VolPath> simulate_vol(const ModelParams& params, const Measure& measure, const MarketState& state,
                                  const PathConfig& config);

/// X at the obs_grid times given one volatility path.
std::vector<double> simulate_x_given_vol(const ModelParams& params, const Measure& measure,
                                         const MarketState& state, const JumpLaw& law, const VolPath& vol,
                                         const PathConfig& config, std::uint64_t path);

/// E[S(T)] under the measure: Lambda_a(T) + X(T) or Lambda_g(T) e^{X(T)}.
SimEstimate estimate_forward(const ModelParams& params, const Measure& measure, const MarketState& state,
                             double T, SpotModel model, const PathConfig& config);

/// Paired estimate of E_Q[S(T)] - E_P[S(T)] with T = state.t + tau. Both legs
/// of a path share their random streams.
SimEstimate estimate_premium(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                             double tau, SpotModel model, const PathConfig& config);

/// CSV with header path_id,t,x,sigma2 for the first n_dump paths; t is the
/// offset from state.t.
std::string path_dump_csv(const ModelParams& params, const Measure& measure, const MarketState& state,
                          const PathConfig& config, std::size_t n_dump);

}  // namespace premia
