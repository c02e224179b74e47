#include "premia/mc.hpp"

#include "premia/csv.hpp"
#include "premia/errors.hpp"
#include "premia/quadrature.hpp"
#include "premia/special.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace premia {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<double> obs_times(const PathConfig& config) {
    if (config.obs_grid.empty()) return {config.horizon};
    return config.obs_grid;
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double exponential(std::mt19937_64& rng, double rate) {
    return std::exponential_distribution<double>(rate)(rng);
}

// Draws from the density proportional to z^{-p} e^{-m z} on (eps, inf), p >= 0,
// by rejection from a two-piece envelope: z^{-p} e^{-m eps} on (eps, z0) and
// z0^{-p} e^{-m z} beyond z0 = max(eps, 1 / m).
double sample_power_exp(double p, double m, double eps, std::mt19937_64& rng) {
    const double z0 = std::max(eps, 1.0 / m);
    double lower_mass = 0.0;
    if (z0 > eps) {
        const double span = std::abs(p - 1.0) < 1e-12 ? std::log(z0 / eps)
                                                      : (std::pow(z0, 1.0 - p) - std::pow(eps, 1.0 - p)) / (1.0 - p);
        lower_mass = std::exp(-m * eps) * span;
    }
    const double upper_mass = std::pow(z0, -p) * std::exp(-m * z0) / m;
    const double w = lower_mass / (lower_mass + upper_mass);
    for (;;) {
        const double u = uniform01(rng);
        if (uniform01(rng) < w) {
            double z;
            if (std::abs(p - 1.0) < 1e-12) {
                z = eps * std::pow(z0 / eps, u);
            } else {
                const double a = std::pow(eps, 1.0 - p), b = std::pow(z0, 1.0 - p);
                z = std::pow(a + u * (b - a), 1.0 / (1.0 - p));
            }
            if (uniform01(rng) < std::exp(-m * (z - eps))) return z;
        } else {
            const double z = z0 + exponential(rng, m);
            if (uniform01(rng) < std::pow(z0 / z, p)) return z;
        }
    }
}

// int_a^b (level + (s - level) e^{-r (u - a)}) e^{-2 ab (T - u)} du, with T >= b.
double variance_piece(double a, double b, double T, double s, double level, double r, double ab) {
    const double len = b - a;
    if (len <= 0.0) return 0.0;
    const double tail = std::exp(-2.0 * ab * (T - b));
    double v = level * tail * len * exprel_decay(2.0 * ab * len);
    // (s - level) e^{-2 ab (T - a)} (e^{c L} - 1) / c with c = 2 ab - r, kept in decaying form.
    const double c = 2.0 * ab - r;
    if (c >= 0.0) {
        v += (s - level) * tail * std::exp(-r * len) * len * exprel_decay(c * len);
    } else {
        v += (s - level) * std::exp(-2.0 * ab * (T - a)) * len * exprel_decay(-c * len);
    }
    return v;
}

void check_measure(const ModelParams& params, const Measure& measure) {
    validate(params);
    if (measure) validate(*measure, params.sub, false);
}

}  // namespace

void validate(const PathConfig& config) {
    if (config.n_paths < 1) throw ValidationError("n_paths must be >= 1");
    if (!(config.horizon >= 0.0) || !std::isfinite(config.horizon)) {
        throw ValidationError("horizon must be finite and >= 0");
    }
    if (!(config.ts_epsilon >= 0.0)) throw ValidationError("ts_epsilon must be >= 0");
    double prev = 0.0;
    for (double t : config.obs_grid) {
        if (!(t >= prev) || !(t <= config.horizon)) {
            throw ValidationError("obs_grid must be sorted and inside [0, horizon]");
        }
        prev = t;
    }
}

SimEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
    SimEstimate e;
    e.n_paths = values.size();
    e.seed = seed;
    if (values.empty()) return e;
    // Shifted by the first value so that a constant sample has exactly zero spread.
    const double n = static_cast<double>(values.size());
    const double shift = values.front();
    std::vector<double> d(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) d[i] = values[i] - shift;
    const double dbar = pairwise_sum(d) / n;
    e.mean = shift + dbar;
    if (values.size() > 1) {
        for (auto& v : d) v = (v - dbar) * (v - dbar);
        e.std_error = std::sqrt(pairwise_sum(d) / (n - 1.0) / n);
    }
    return e;
}

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ path);
    h = splitmix64(h ^ (stream * 0xd1b54a32d192ed03ULL + 1));
    return std::mt19937_64(h);
}

JumpLaw::JumpLaw(const ModelParams& params, const Measure& measure, double ts_epsilon) {
    check_measure(params, measure);
    const SubordinatorSpec& sub = params.sub;
    const double theta = measure ? measure->theta2 : 0.0;
    const double beta2 = measure ? measure->beta2 : 0.0;
    rate_ = params.rho;
    if (sub.is_null()) return;
    if (beta2 != 0.0) k_ = params.rho * beta2 / cumulant_deriv(sub, theta, 2);

    if (sub.is_dirac()) {
        kind_ = Kind::dirac;
        a_ = std::get<DiracJump>(sub.family()).a;
        i0_ = std::exp(theta * a_);
        i1_ = k_ * a_ * i0_;
    } else if (sub.is_cp_exp()) {
        kind_ = Kind::cp_exp;
        const auto& f = std::get<CompoundPoissonExp>(sub.family());
        c_ = f.c;
        m_ = f.lambda - theta;
        i0_ = c_ / m_;
        i1_ = k_ * c_ / (m_ * m_);
    } else {
        if (!(ts_epsilon > 0.0)) {
            throw UnsupportedModelError("tempered stable paths need a jump threshold ts_epsilon > 0");
        }
        kind_ = Kind::ts;
        const auto& f = std::get<TemperedStable>(sub.family());
        c_ = f.c;
        m_ = f.lambda - theta;
        alpha_ts_ = f.alpha_ts;
        eps_ = ts_epsilon;
        auto tail = [&](double power) {
            return integrate_to_infinity(
                       [&](double z) { return c_ * std::pow(z, power - 1.0 - alpha_ts_) * std::exp(-m_ * z); }, eps_)
                .value;
        };
        const double mass0 = tail(0.0);
        mass1_ = tail(1.0);
        mass2_ = tail(2.0);
        i0_ = mass0;
        i1_ = k_ * mass1_;
        // Mean contribution of jumps below eps: int_0^eps z^n e^{theta z} l(dz), n = 1, 2.
        using boost::math::tgamma_lower;
        const double d1 = c_ * std::pow(m_, alpha_ts_ - 1.0) * tgamma_lower(1.0 - alpha_ts_, m_ * eps_);
        const double d2 = c_ * std::pow(m_, alpha_ts_ - 2.0) * tgamma_lower(2.0 - alpha_ts_, m_ * eps_);
        rate_ = params.rho - k_ * d2;
        if (!(rate_ > 0.0)) throw UnsupportedModelError("ts_epsilon too large: truncated sigma^2 drift is not mean reverting");
        level_ = d1 / rate_;
    }
}

double JumpLaw::decay(double sigma2, double dt) const {
    return level_ + (sigma2 - level_) * std::exp(-rate_ * dt);
}

double JumpLaw::sample_size(double sigma2, std::mt19937_64& rng) const {
    switch (kind_) {
        case Kind::none:
            return 0.0;
        case Kind::dirac:
            return a_;
        case Kind::cp_exp: {
            // e^{-m z} (1 + k sigma^2 z): Exp(m) with weight 1/m, Gamma(2, m) with weight k sigma^2 / m^2.
            const double w_exp = 1.0 / m_;
            const double w_gamma = k_ * sigma2 / (m_ * m_);
            const double z = exponential(rng, m_);
            if (uniform01(rng) * (w_exp + w_gamma) < w_exp) return z;
            return z + exponential(rng, m_);
        }
        case Kind::ts: {
            const double w0 = i0_;
            const double w1 = k_ * sigma2 * mass1_;
            const bool first = uniform01(rng) * (w0 + w1) < w0;
            return sample_power_exp(first ? 1.0 + alpha_ts_ : alpha_ts_, m_, eps_, rng);
        }
    }
    return 0.0;
}

double JumpLaw::mean_size(double sigma2) const {
    switch (kind_) {
        case Kind::none:
            return 0.0;
        case Kind::dirac:
            return a_;
        case Kind::cp_exp: {
            const double w_exp = 1.0 / m_;
            const double w_gamma = k_ * sigma2 / (m_ * m_);
            return (w_exp / m_ + w_gamma * 2.0 / m_) / (w_exp + w_gamma);
        }
        case Kind::ts:
            return (mass1_ + k_ * sigma2 * mass2_) / (i0_ + k_ * sigma2 * mass1_);
    }
    return 0.0;
}

VolPath simulate_vol_path(const JumpLaw& law, const MarketState& state, const PathConfig& config,
                          std::uint64_t path) {
    std::mt19937_64 rng = path_engine(config.seed, path, 0);
    const std::vector<double> obs = obs_times(config);
    VolPath vp;
    vp.sigma2_0 = state.sigma2;
    vp.sigma2.reserve(obs.size());
    std::size_t next = 0;
    double t = 0.0;
    double s = state.sigma2;
    for (;;) {
        // Between jumps sigma^2 moves monotonically towards level(), so the
        // larger end point bounds the intensity until the next event.
        const double bound = law.intensity(std::max(s, law.level()));
        const double tp = bound > 0.0 ? t + exponential(rng, bound) : config.horizon + 1.0;
        while (next < obs.size() && obs[next] < tp) {
            vp.sigma2.push_back(law.decay(s, obs[next] - t));
            ++next;
        }
        if (tp > config.horizon) break;
        const double s_minus = law.decay(s, tp - t);
        ++vp.proposals;
        if (uniform01(rng) * bound < law.intensity(s_minus)) {
            const double z = law.sample_size(s_minus, rng);
            vp.jumps.push_back({tp, z});
            s = s_minus + z;
        } else {
            s = s_minus;
        }
        t = tp;
    }
    while (next < obs.size()) {
        vp.sigma2.push_back(law.decay(s, obs[next] - t));
        ++next;
    }
    return vp;
}

std::vector<VolPath> simulate_vol(const ModelParams& params, const Measure& measure, const MarketState& state,
                                  const PathConfig& config) {
    validate(state);
    validate(config);
    const JumpLaw law(params, measure, config.ts_epsilon);
    std::vector<VolPath> out(config.n_paths);
    for_each_index(
        config.n_paths, [&](std::size_t i) { out[i] = simulate_vol_path(law, state, config, i); }, config.exec);
    return out;
}

std::vector<double> simulate_x_given_vol(const ModelParams& params, const Measure& measure,
                                         const MarketState& state, const JumpLaw& law, const VolPath& vol,
                                         const PathConfig& config, std::uint64_t path) {
    const double ab = params.alpha * (1.0 - (measure ? measure->beta1 : 0.0));
    const double th1 = measure ? measure->theta1 : 0.0;
    std::mt19937_64 rng = path_engine(config.seed, path, 1);
    std::normal_distribution<double> normal(0.0, 1.0);

    const std::vector<double> obs = obs_times(config);
    std::vector<double> xs;
    xs.reserve(obs.size());
    double x = state.x;
    double prev = 0.0;
    double s_prev = vol.sigma2_0;  // sigma^2 just after prev
    std::size_t j = 0;
    for (double T : obs) {
        double v = 0.0;
        double cur = prev;
        double s = s_prev;
        while (j < vol.jumps.size() && vol.jumps[j].time <= T) {
            const double jt = vol.jumps[j].time;
            v += variance_piece(cur, jt, T, s, law.level(), law.rate(), ab);
            s = law.decay(s, jt - cur) + vol.jumps[j].size;
            cur = jt;
            ++j;
        }
        v += variance_piece(cur, T, T, s, law.level(), law.rate(), ab);
        s_prev = law.decay(s, T - cur);

        const double h = T - prev;
        const double z = normal(rng);
        x = x * std::exp(-ab * h) + th1 * h * exprel_decay(ab * h) + std::sqrt(std::max(v, 0.0)) * z;
        xs.push_back(x);
        prev = T;
    }
    return xs;
}

namespace {

double payoff(const ModelParams& params, SpotModel model, double T, double x) {
    return model == SpotModel::arithmetic ? params.seasonal_a(T) + x : params.seasonal_g(T) * std::exp(x);
}

PathConfig terminal_config(const PathConfig& config, double tau) {
    PathConfig c = config;
    c.horizon = tau;
    c.obs_grid = {tau};
    validate(c);
    return c;
}

double maturity_offset(const MarketState& state, double T) {
    if (!(T >= state.t) || !std::isfinite(T)) throw ValidationError("maturity T must be finite and >= t");
    return T - state.t;
}

}  // namespace

SimEstimate estimate_forward(const ModelParams& params, const Measure& measure, const MarketState& state,
                             double T, SpotModel model, const PathConfig& config) {
    validate(state);
    const double tau = maturity_offset(state, T);
    const PathConfig cfg = terminal_config(config, tau);
    const JumpLaw law(params, measure, cfg.ts_epsilon);
    std::vector<double> values(cfg.n_paths);
    for_each_index(
        cfg.n_paths,
        [&](std::size_t i) {
            const VolPath vp = simulate_vol_path(law, state, cfg, i);
            const auto xs = simulate_x_given_vol(params, measure, state, law, vp, cfg, i);
            values[i] = payoff(params, model, T, xs.back());
        },
        cfg.exec);
    return summarize(values, cfg.seed);
}

SimEstimate estimate_premium(const ModelParams& params, const MeasureChange& mc, const MarketState& state,
                             double tau, SpotModel model, const PathConfig& config) {
    validate(state);
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be finite and >= 0");
    const PathConfig cfg = terminal_config(config, tau);
    const JumpLaw law_p(params, std::nullopt, cfg.ts_epsilon);
    const JumpLaw law_q(params, mc, cfg.ts_epsilon);
    const double T = state.t + tau;
    std::vector<double> values(cfg.n_paths);
    for_each_index(
        cfg.n_paths,
        [&](std::size_t i) {
            const VolPath vq = simulate_vol_path(law_q, state, cfg, i);
            const VolPath vp = simulate_vol_path(law_p, state, cfg, i);
            const double xq = simulate_x_given_vol(params, mc, state, law_q, vq, cfg, i).back();
            const double xp = simulate_x_given_vol(params, std::nullopt, state, law_p, vp, cfg, i).back();
            values[i] = payoff(params, model, T, xq) - payoff(params, model, T, xp);
        },
        cfg.exec);
    return summarize(values, cfg.seed);
}

std::string path_dump_csv(const ModelParams& params, const Measure& measure, const MarketState& state,
                          const PathConfig& config, std::size_t n_dump) {
    validate(state);
    validate(config);
    const JumpLaw law(params, measure, config.ts_epsilon);
    const std::vector<double> obs = obs_times(config);
    std::string out = "path_id,t,x,sigma2\n";
    for (std::size_t i = 0; i < std::min(n_dump, config.n_paths); ++i) {
        const VolPath vp = simulate_vol_path(law, state, config, i);
        const auto xs = simulate_x_given_vol(params, measure, state, law, vp, config, i);
        for (std::size_t k = 0; k < obs.size(); ++k) {
            out += csv_row({static_cast<double>(i), obs[k], xs[k], vp.sigma2[k]});
        }
    }
    return out;
}

}  // namespace premia
