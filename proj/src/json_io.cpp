#include "premia/json_io.hpp"

#include "premia/errors.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>

namespace premia {

namespace {

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path + " must be a JSON object");
}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ValidationError(path + ": unknown key '" + it.key() + "'");
    }
}

double number(const Json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_number()) throw ValidationError(path + "." + key + " must be a number");
    return v.get<double>();
}

std::string text(const Json& j, const std::string& path, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_string()) throw ValidationError(path + "." + key + " must be a string");
    return v.get<std::string>();
}

// JSON has no infinities; they are written as null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json parse_json(const std::string& text_in) {
    try {
        return Json::parse(text_in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what());
    }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const SubordinatorSpec& sub) {
    Json j = std::visit(
        [](const auto& f) -> Json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, DiracJump>) {
                return {{"kind", "dirac"}, {"a", f.a}};
            } else if constexpr (std::is_same_v<T, CompoundPoissonExp>) {
                return {{"kind", "cp_exp"}, {"c", f.c}, {"lambda", f.lambda}};
            } else {
                return {{"kind", "tempered_stable"}, {"c", f.c}, {"lambda", f.lambda}, {"alpha_ts", f.alpha_ts}};
            }
        },
        sub.family());
    // Specs built in relaxed mode must read back in relaxed mode.
    if (!(theta_max(sub) > 1.0)) j["strict"] = false;
    return j;
}

Json to_json(const Seasonal& s) {
    if (s.kind == Seasonal::Kind::constant) return {{"kind", "constant"}, {"value", s.value}};
    return {{"kind", "sin"}, {"level", s.level}, {"amplitude", s.amplitude}, {"period_days", s.period_days}};
}

Json to_json(const ModelParams& p) {
    return {{"alpha", p.alpha},
            {"rho", p.rho},
            {"subordinator", to_json(p.sub)},
            {"seasonal_a", to_json(p.seasonal_a)},
            {"seasonal_g", to_json(p.seasonal_g)}};
}

Json to_json(const MeasureChange& mc) {
    return {{"theta1", mc.theta1}, {"theta2", mc.theta2}, {"beta1", mc.beta1}, {"beta2", mc.beta2}};
}

Json to_json(const MarketState& s) { return {{"t", s.t}, {"x", s.x}, {"sigma2", s.sigma2}}; }

Json to_json(const SimEstimate& e) {
    return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_paths", e.n_paths}, {"seed", e.seed}};
}

Json to_json(const DbReport& r) {
    return {{"member", r.member}, {"min_value", finite_or_null(r.min_value)}, {"u_min", finite_or_null(r.u_min)}};
}

Json to_json(const AssumptionPReport& r) {
    return {{"holds", r.holds},
            {"max_upsilon", r.max_upsilon},
            {"margin", finite_or_null(r.margin)},
            {"t_star", r.t_star}};
}

Json to_json(const LongRun& lr) {
    return {{"psi0_infinity", lr.psi0_infinity},
            {"decay_rate_fit", lr.decay_rate_fit},
            {"nearest_candidate", lr.nearest_candidate},
            {"horizon", lr.horizon},
            {"richardson_gap", lr.richardson_gap}};
}

SubordinatorSpec subordinator_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    const std::string kind = text(j, path, "kind", "cp_exp");
    Strictness mode = Strictness::strict;
    if (j.contains("strict")) {
        if (!j.at("strict").is_boolean()) throw ValidationError(path + ".strict must be a boolean");
        mode = j.at("strict").get<bool>() ? Strictness::strict : Strictness::relaxed;
    }
    if (kind == "dirac") {
        reject_unknown(j, path, {"kind", "a", "strict"});
        return SubordinatorSpec::dirac(number(j, path, "a", 1.0));
    }
    if (kind == "cp_exp") {
        reject_unknown(j, path, {"kind", "c", "lambda", "strict"});
        return SubordinatorSpec::cp_exp(number(j, path, "c", 0.4), number(j, path, "lambda", 2.0), mode);
    }
    if (kind == "tempered_stable") {
        reject_unknown(j, path, {"kind", "c", "lambda", "alpha_ts", "strict"});
        return SubordinatorSpec::tempered_stable(number(j, path, "c", 0.0), number(j, path, "lambda", 2.0),
                                                 number(j, path, "alpha_ts", 0.5), mode);
    }
    throw ValidationError(path + ".kind must be dirac, cp_exp or tempered_stable, got '" + kind + "'");
}

Seasonal seasonal_from_json(const Json& j, const std::string& path) {
    if (j.is_number()) return Seasonal::constant(j.get<double>());
    require_object(j, path);
    const std::string kind = text(j, path, "kind", "constant");
    if (kind == "constant") {
        reject_unknown(j, path, {"kind", "value"});
        return Seasonal::constant(number(j, path, "value", 0.0));
    }
    if (kind == "sin") {
        reject_unknown(j, path, {"kind", "level", "amplitude", "period_days"});
        const double period = number(j, path, "period_days", 365.0);
        if (!(period > 0.0)) throw ValidationError(path + ".period_days must be > 0");
        return Seasonal::sine(number(j, path, "level", 0.0), number(j, path, "amplitude", 0.0), period);
    }
    throw ValidationError(path + ".kind must be constant or sin, got '" + kind + "'");
}

ModelParams model_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"alpha", "rho", "subordinator", "seasonal_a", "seasonal_g"});
    ModelParams p;
    p.alpha = number(j, path, "alpha", p.alpha);
    p.rho = number(j, path, "rho", p.rho);
    if (j.contains("subordinator")) p.sub = subordinator_from_json(j.at("subordinator"), path + ".subordinator");
    if (j.contains("seasonal_a")) p.seasonal_a = seasonal_from_json(j.at("seasonal_a"), path + ".seasonal_a");
    if (j.contains("seasonal_g")) p.seasonal_g = seasonal_from_json(j.at("seasonal_g"), path + ".seasonal_g");
    validate(p);
    return p;
}

MeasureChange measure_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"theta1", "theta2", "beta1", "beta2"});
    MeasureChange mc;
    mc.theta1 = number(j, path, "theta1", 0.0);
    mc.theta2 = number(j, path, "theta2", 0.0);
    mc.beta1 = number(j, path, "beta1", 0.0);
    mc.beta2 = number(j, path, "beta2", 0.0);
    return mc;
}

MarketState state_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"t", "x", "sigma2"});
    MarketState s;
    s.t = number(j, path, "t", s.t);
    s.x = number(j, path, "x", s.x);
    s.sigma2 = number(j, path, "sigma2", s.sigma2);
    validate(s);
    return s;
}

SimEstimate estimate_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"mean", "std_error", "n_paths", "seed"});
    SimEstimate e;
    e.mean = number(j, path, "mean", 0.0);
    e.std_error = number(j, path, "std_error", 0.0);
    for (const char* key : {"n_paths", "seed"}) {
        if (j.contains(key) && !j.at(key).is_number_unsigned()) {
            throw ValidationError(path + "." + key + " must be a non-negative integer");
        }
    }
    if (j.contains("n_paths")) e.n_paths = j.at("n_paths").get<std::size_t>();
    if (j.contains("seed")) e.seed = j.at("seed").get<std::uint64_t>();
    return e;
}

void set_path(Json& root, const std::string& dotted, Json value) {
    if (dotted.empty()) throw ValidationError("empty override path");
    Json* node = &root;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ValidationError("malformed override path '" + dotted + "'");
        if (!node->is_object()) {
            if (!node->is_null()) throw ValidationError("override path '" + dotted + "' crosses a non-object value");
            *node = Json::object();
        }
        if (dot == std::string::npos) {
            (*node)[key] = std::move(value);
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

}  // namespace premia
