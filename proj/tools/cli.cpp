#include "cli.hpp"

#include "premia/csv.hpp"
#include "premia/errors.hpp"
#include "premia/mc.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <ostream>

#include <unistd.h>

namespace premia::cli {

namespace {

namespace fs = std::filesystem;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json optional_or_null(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

const Json& option(const RunConfig& cfg, const char* key) {
    static const Json null_value;
    return cfg.options.contains(key) ? cfg.options.at(key) : null_value;
}

double option_number(const RunConfig& cfg, const char* key, double fallback) {
    const Json& v = option(cfg, key);
    if (v.is_null()) return fallback;
    if (!v.is_number()) throw ValidationError(std::string("options.") + key + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(std::string("options.") + key + " must be finite");
    return d;
}

std::uint64_t option_count(const RunConfig& cfg, const char* key, std::uint64_t fallback) {
    const Json& v = option(cfg, key);
    if (v.is_null()) return fallback;
    if (!v.is_number_unsigned()) throw ValidationError(std::string("options.") + key + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string option_text(const RunConfig& cfg, const char* key, const std::string& fallback) {
    const Json& v = option(cfg, key);
    if (v.is_null()) return fallback;
    if (!v.is_string()) throw ValidationError(std::string("options.") + key + " must be a string");
    return v.get<std::string>();
}

bool option_flag(const RunConfig& cfg, const char* key) {
    const Json& v = option(cfg, key);
    if (v.is_null()) return false;
    if (!v.is_boolean()) throw ValidationError(std::string("options.") + key + " must be a boolean");
    return v.get<bool>();
}

/// Maturity from options.T (absolute) or options.tau (offset), default tau = 30.
double maturity(const RunConfig& cfg) {
    if (!option(cfg, "T").is_null() && !option(cfg, "tau").is_null()) {
        throw ValidationError("options.T and options.tau are mutually exclusive");
    }
    const double T = option(cfg, "T").is_null() ? cfg.state.t + option_number(cfg, "tau", 30.0)
                                                : option_number(cfg, "T", 0.0);
    if (!(T >= cfg.state.t)) throw ValidationError("maturity T must be >= t");
    return T;
}

void prepare_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir) || access(dir.c_str(), W_OK) != 0) {
        throw ValidationError("output_dir '" + dir + "' is not a writable directory");
    }
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

double spot(const ModelParams& p, const MarketState& s, SpotModel model) {
    return model == SpotModel::arithmetic ? p.seasonal_a(s.t) + s.x : p.seasonal_g(s.t) * std::exp(s.x);
}

Json admissibility_json(const ModelParams& p, const MeasureChange& mc) {
    Json r;
    r["theta_max"] = number_or_null(theta_max(p.sub));
    r["esscher_bound"] = number_or_null(esscher_bound(p.sub));
    r["theta2"] = mc.theta2;
    r["beta2"] = mc.beta2;
    r["in_DL"] = in_DL(p.sub, mc.theta2);
    r["assumption_P"] = to_json(check_assumption_P(p));
    Json warnings = Json::array();
    if (!r["in_DL"].get<bool>()) {
        warnings.push_back("theta2 not in D_L: must be < Theta_L/2");
        r["in_Db"] = nullptr;
        r["beta_max"] = nullptr;
        r["u_zero"] = nullptr;
        r["u_min"] = nullptr;
        r["warnings"] = warnings;
        return r;
    }
    const double a = 0.5;
    const DbReport db = in_Db(p.sub, mc.theta2, mc.beta2, a, p.rho);
    r["in_Db"] = to_json(db);
    const auto bm = beta_max(p.sub, mc.theta2, a, p.rho);
    r["beta_max"] = optional_or_null(bm);
    if (!bm) warnings.push_back("no admissible beta in (0, 1) for theta2 at a = 1/2");
    r["u_min"] = mc.beta2 > 0.0 && mc.beta2 < 1.0 ? Json(u_min(p.sub, mc.theta2, mc.beta2)) : Json(nullptr);
    r["u_zero"] = db.member ? Json(u_zero(p.sub, mc.theta2, mc.beta2, a, p.rho)) : Json(nullptr);
    if (!db.member) warnings.push_back("(theta2, beta2) not in D_b(1/2): Psi_1 is not guaranteed to stay bounded");
    if (!check_assumption_P(p).holds) warnings.push_back("Assumption P fails: E_P[S(T)] is infinite for long maturities");
    r["warnings"] = warnings;
    return r;
}

/// Warnings relevant to pricing in the given spot model.
Json pricing_warnings(const ModelParams& p, const MeasureChange& mc, SpotModel model) {
    if (model == SpotModel::arithmetic) return Json::array();
    return admissibility_json(p, mc)["warnings"];
}

/// Curve with the long-end limit when it can be computed; a failed long-run
/// solve is reported as a warning and the curve itself is kept.
PremiumCurve curve_with_fallback(const ModelParams& p, const MeasureChange& mc, const MarketState& s,
                                 const std::vector<double>& taus, SpotModel model, Json& warnings) {
    try {
        return premium_curve(p, mc, s, taus, model);
    } catch (const NotConvergedError& e) {
        warnings.push_back(std::string("long-end limit unavailable: ") + e.what());
    } catch (const BlowUpUpstreamError& e) {
        warnings.push_back(std::string("long-end limit unavailable: ") + e.what());
    }
    return premium_curve(p, mc, s, taus, model, Execution::parallel, false);
}

Json sign_changes(const PremiumCurve& c) {
    Json out = Json::array();
    for (std::size_t i = 1; i < c.taus.size(); ++i) {
        const double a = c.sigma[i - 1], b = c.sigma[i];
        if ((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)) out.push_back(Json::array({c.taus[i - 1], c.taus[i]}));
    }
    return out;
}

Json curve_sidecar(const PremiumCurve& c, const ModelParams& p, const MeasureChange& mc, Json warnings) {
    Json j;
    j["model"] = to_string(c.model);
    j["n_points"] = c.taus.size();
    j["slope_zero"] = number_or_null(c.slope_zero);
    j["limit_infinity"] = number_or_null(c.limit_infinity);
    j["sign_changes"] = sign_changes(c);
    j["admissibility"] = admissibility_json(p, mc);
    j["warnings"] = std::move(warnings);
    return j;
}

std::vector<double> taus_from_options(const RunConfig& cfg) {
    std::vector<double> taus;
    const Json& given = option(cfg, "taus");
    if (!given.is_null()) {
        if (!given.is_array() || given.empty()) throw ValidationError("options.taus must be a non-empty array");
        for (const auto& v : given) {
            if (!v.is_number()) throw ValidationError("options.taus must contain numbers");
            taus.push_back(v.get<double>());
        }
    } else if (option_flag(cfg, "fine_short_end")) {
        taus = figure_tau_grid();
    } else {
        const double tau_max = option_number(cfg, "tau_max", 360.0);
        if (!(tau_max >= 0.0) || tau_max > 1e6) throw ValidationError("options.tau_max must lie in [0, 1e6]");
        for (int i = 0; i <= static_cast<int>(std::floor(tau_max)); ++i) taus.push_back(i);
    }
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(taus[i] >= 0.0) || !std::isfinite(taus[i])) throw ValidationError("options.taus must be finite and >= 0");
        if (i && !(taus[i] > taus[i - 1])) throw ValidationError("options.taus must be strictly increasing");
    }
    return taus;
}

struct GridAxis {
    double lo, hi;
    int n;
};

GridAxis axis_from(const Json& j, const char* name, GridAxis fallback) {
    if (!j.contains(name)) return fallback;
    const Json& a = j.at(name);
    if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number_unsigned()) {
        throw ValidationError(std::string("options.field_grid.") + name + " must be [lo, hi, n]");
    }
    GridAxis g{a[0].get<double>(), a[1].get<double>(), a[2].get<int>()};
    if (!(g.hi > g.lo) || g.n < 2 || g.n > 10000) {
        throw ValidationError(std::string("options.field_grid.") + name + " needs lo < hi and 2 <= n <= 10000");
    }
    return g;
}

/// (Lambda_1, Lambda_2) on a rectangular grid; points outside the domain of
/// the cumulant are skipped.
std::string field_grid_csv(const ModelParams& p, const MeasureChange& mc, GridAxis u1, GridAxis u2) {
    std::string out = "u1,u2,lambda1,lambda2\n";
    for (int i = 0; i < u1.n; ++i) {
        const double a = u1.lo + (u1.hi - u1.lo) * i / (u1.n - 1);
        for (int j = 0; j < u2.n; ++j) {
            const double b = u2.lo + (u2.hi - u2.lo) * j / (u2.n - 1);
            try {
                const auto [l1, l2] = riccati_field(p, mc, a, b);
                out += csv_row({a, b, l1, l2});
            } catch (const DomainError&) {
            }
        }
    }
    return out;
}

// ----- commands -----

int cmd_price(const RunConfig& cfg, std::ostream& out) {
    const bool geometric = cfg.model == SpotModel::geometric;
    validate(cfg.mc, cfg.params.sub, geometric);
    const double T = maturity(cfg);
    const bool swap = !option(cfg, "T1").is_null() || !option(cfg, "T2").is_null();
    double T1 = 0.0, T2 = 0.0;
    if (swap) {
        T1 = option_number(cfg, "T1", std::numeric_limits<double>::quiet_NaN());
        T2 = option_number(cfg, "T2", std::numeric_limits<double>::quiet_NaN());
        if (!(cfg.state.t <= T1 && T1 < T2)) throw ValidationError("swap delivery period must satisfy t <= T1 < T2");
    }
    prepare_output_dir(cfg.output_dir);

    const MeasureChange identity{};
    Json j;
    j["model"] = to_string(cfg.model);
    j["t"] = cfg.state.t;
    j["T"] = T;
    j["tau"] = T - cfg.state.t;
    j["spot"] = spot(cfg.params, cfg.state, cfg.model);
    std::optional<RiccatiSolution> sol;
    if (geometric && !cfg.mc.is_identity()) {
        const double horizon = std::max({T - cfg.state.t, swap ? T2 - cfg.state.t : 0.0, 1.0});
        sol = solve_riccati(cfg.params, cfg.mc, horizon);
    }
    if (geometric) {
        j["forward_p"] = forward_geometric_P(cfg.params, cfg.state, T);
        j["forward_q"] = sol ? forward_geometric(cfg.params, cfg.mc, cfg.state, T, *sol) : j["forward_p"].get<double>();
    } else {
        j["forward_p"] = forward_arithmetic(cfg.params, identity, cfg.state, T);
        j["forward_q"] = forward_arithmetic(cfg.params, cfg.mc, cfg.state, T);
    }
    j["premium"] = j["forward_q"].get<double>() - j["forward_p"].get<double>();
    if (swap) {
        const RiccatiSolution* r = sol ? &*sol : nullptr;
        j["swap"] = {{"T1", T1},
                     {"T2", T2},
                     {"price_q", swap_price(cfg.params, cfg.mc, cfg.state, T1, T2, cfg.model, r)},
                     {"price_p", swap_price(cfg.params, identity, cfg.state, T1, T2, cfg.model)}};
    }
    j["warnings"] = pricing_warnings(cfg.params, cfg.mc, cfg.model);
    const std::string text = dump_json(j);
    write_file_atomic(join(cfg.output_dir, "price.json"), text);
    out << text;
    return kExitOk;
}

int cmd_premium_curve(const RunConfig& cfg, std::ostream& out) {
    validate(cfg.mc, cfg.params.sub, cfg.model == SpotModel::geometric);
    const auto taus = taus_from_options(cfg);
    prepare_output_dir(cfg.output_dir);

    Json warnings = pricing_warnings(cfg.params, cfg.mc, cfg.model);
    const PremiumCurve c = curve_with_fallback(cfg.params, cfg.mc, cfg.state, taus, cfg.model, warnings);
    const Json side = curve_sidecar(c, cfg.params, cfg.mc, warnings);
    const std::string text = dump_json(side);
    write_file_atomic(join(cfg.output_dir, "premium_curve.csv"), premium_curve_csv(c));
    write_file_atomic(join(cfg.output_dir, "premium_curve.json"), text);
    out << text;
    return kExitOk;
}

int cmd_admissibility(const RunConfig& cfg, std::ostream& out) {
    for (double v : {cfg.mc.theta1, cfg.mc.theta2, cfg.mc.beta1, cfg.mc.beta2}) {
        if (!std::isfinite(v)) throw ValidationError("measure parameters must be finite");
    }
    if (!(cfg.mc.beta2 >= 0.0 && cfg.mc.beta2 <= 1.0)) throw ValidationError("beta2 must lie in [0, 1]");
    prepare_output_dir(cfg.output_dir);
    const std::string text = dump_json(admissibility_json(cfg.params, cfg.mc));
    write_file_atomic(join(cfg.output_dir, "admissibility.json"), text);
    out << text;
    return kExitOk;
}

int cmd_riccati(const RunConfig& cfg, std::ostream& out) {
    validate(cfg.mc, cfg.params.sub, true);
    const double horizon = option_number(cfg, "horizon", 60.0);
    if (!(horizon > 0.0)) throw ValidationError("options.horizon must be > 0");
    const Json& fg = option(cfg, "field_grid");
    const bool want_field = fg.is_object() || (fg.is_boolean() && fg.get<bool>());
    if (!fg.is_null() && !fg.is_object() && !fg.is_boolean()) {
        throw ValidationError("options.field_grid must be a boolean or an object");
    }
    if (fg.is_object()) {
        for (auto it = fg.begin(); it != fg.end(); ++it) {
            if (it.key() != "u1" && it.key() != "u2") throw ValidationError("options.field_grid: unknown key '" + it.key() + "'");
        }
    }
    const Json grid_spec = fg.is_object() ? fg : Json::object();
    const GridAxis u1 = axis_from(grid_spec, "u1", {0.0, 1.0, 21});
    const GridAxis u2 = axis_from(grid_spec, "u2", {0.0, 1.0, 21});
    prepare_output_dir(cfg.output_dir);

    const RiccatiSolution sol = solve_riccati(cfg.params, cfg.mc, horizon);
    Json side;
    side["horizon_requested"] = horizon;
    side["horizon_solved"] = sol.horizon();
    side["blow_up"] = optional_or_null(sol.blow_up);
    side["admissible"] = sol.admissible;
    side["max_psi1"] = sol.max_psi1();
    side["n_points"] = sol.grid.size();
    side["warnings"] = admissibility_json(cfg.params, cfg.mc)["warnings"];
    if (sol.blow_up) side["warnings"].push_back("blow-up guard fired at t = " + format_double(*sol.blow_up));
    write_file_atomic(join(cfg.output_dir, "riccati.csv"), riccati_csv(sol));
    if (want_field) {
        write_file_atomic(join(cfg.output_dir, "riccati_field.csv"), field_grid_csv(cfg.params, cfg.mc, u1, u2));
    }
    const std::string text = dump_json(side);
    write_file_atomic(join(cfg.output_dir, "riccati.json"), text);
    out << text;
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const bool geometric = cfg.model == SpotModel::geometric;
    validate(cfg.mc, cfg.params.sub, geometric);
    const double T = maturity(cfg);
    const double tau = T - cfg.state.t;
    const std::string measure = option_text(cfg, "measure", "Q");
    const std::string quantity = option_text(cfg, "quantity", "forward");
    if (measure != "P" && measure != "Q") throw ValidationError("options.measure must be 'P' or 'Q'");
    if (quantity != "forward" && quantity != "premium") {
        throw ValidationError("options.quantity must be 'forward' or 'premium'");
    }
    PathConfig pc;
    pc.n_paths = option_count(cfg, "n_paths", pc.n_paths);
    pc.seed = option_count(cfg, "seed", pc.seed);
    pc.ts_epsilon = option_number(cfg, "ts_epsilon", 0.0);
    pc.horizon = std::max(tau, 1e-12);
    const std::uint64_t n_dump = option_count(cfg, "dump_paths", 0);
    validate(pc);
    const Measure m = measure == "P" ? Measure{} : Measure{cfg.mc};
    JumpLaw check(cfg.params, m, pc.ts_epsilon);  // surfaces unsupported models before any output
    prepare_output_dir(cfg.output_dir);

    SimEstimate est;
    double analytic = 0.0;
    std::optional<RiccatiSolution> sol;
    if (geometric && !cfg.mc.is_identity()) sol = solve_riccati(cfg.params, cfg.mc, std::max(tau, 1.0));
    if (quantity == "premium") {
        est = estimate_premium(cfg.params, cfg.mc, cfg.state, tau, cfg.model, pc);
        analytic = geometric ? (sol ? premium_geometric(cfg.params, cfg.mc, cfg.state, tau, *sol) : 0.0)
                             : premium_arithmetic(cfg.params, cfg.mc, cfg.state, tau).value;
    } else {
        est = estimate_forward(cfg.params, m, cfg.state, T, cfg.model, pc);
        const MeasureChange mc = m ? *m : MeasureChange{};
        if (!geometric) {
            analytic = forward_arithmetic(cfg.params, mc, cfg.state, T);
        } else if (mc.is_identity()) {
            analytic = forward_geometric_P(cfg.params, cfg.state, T);
        } else {
            analytic = forward_geometric(cfg.params, mc, cfg.state, T, *sol);
        }
    }
    Json ref;
    ref["measure"] = measure;
    ref["quantity"] = quantity;
    ref["model"] = to_string(cfg.model);
    ref["T"] = T;
    ref["analytic"] = analytic;
    ref["z_score"] = est.std_error > 0.0 ? Json((est.mean - analytic) / est.std_error) : Json(nullptr);

    const std::string text = dump_json(to_json(est));
    write_file_atomic(join(cfg.output_dir, "simulate.json"), text);
    write_file_atomic(join(cfg.output_dir, "simulate_reference.json"), dump_json(ref));
    if (n_dump > 0) {
        PathConfig dump = pc;
        const int steps = 100;
        for (int i = 0; i <= steps; ++i) dump.obs_grid.push_back(pc.horizon * i / steps);
        write_file_atomic(join(cfg.output_dir, "paths.csv"), path_dump_csv(cfg.params, m, cfg.state, dump, n_dump));
    }
    out << text;
    return kExitOk;
}

int cmd_figures(const RunConfig& cfg, std::ostream& out) {
    prepare_output_dir(cfg.output_dir);
    Json manifest;
    manifest["tau_grid_points"] = figure_tau_grid().size();
    manifest["panels"] = Json::array();
    for (const auto& panel : figure_panels()) manifest["panels"].push_back(run_figure_panel(panel, cfg.output_dir));
    const std::string text = dump_json(manifest);
    write_file_atomic(join(cfg.output_dir, "manifest.json"), text);
    out << text;
    return kExitOk;
}

}  // namespace

RunConfig config_from_json(const Json& doc) {
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        static const char* keys[] = {"model", "measure", "state", "spot_model", "options", "output_dir"};
        if (std::find_if(std::begin(keys), std::end(keys), [&](const char* k) { return it.key() == k; }) ==
            std::end(keys)) {
            throw ValidationError("config: unknown key '" + it.key() + "'");
        }
    }
    RunConfig cfg;
    if (doc.contains("model")) cfg.params = model_from_json(doc.at("model"), "model");
    validate(cfg.params);
    if (doc.contains("measure")) cfg.mc = measure_from_json(doc.at("measure"), "measure");
    if (doc.contains("state")) cfg.state = state_from_json(doc.at("state"), "state");
    validate(cfg.state);
    if (doc.contains("spot_model")) {
        if (!doc.at("spot_model").is_string()) throw ValidationError("spot_model must be a string");
        cfg.model = parse_spot_model(doc.at("spot_model").get<std::string>());
    }
    if (doc.contains("options")) {
        const Json& o = doc.at("options");
        if (!o.is_object()) throw ValidationError("options must be a JSON object");
        static const char* keys[] = {"T",       "tau",        "T1",     "T2",       "taus",     "tau_max",
                                     "horizon", "field_grid", "n_paths", "seed",    "ts_epsilon", "measure",
                                     "quantity", "dump_paths", "fine_short_end"};
        for (auto it = o.begin(); it != o.end(); ++it) {
            if (std::find_if(std::begin(keys), std::end(keys), [&](const char* k) { return it.key() == k; }) ==
                std::end(keys)) {
                throw ValidationError("options: unknown key '" + it.key() + "'");
            }
        }
        cfg.options = o;
    }
    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string()) throw ValidationError("output_dir must be a string");
        cfg.output_dir = doc.at("output_dir").get<std::string>();
        if (cfg.output_dir.empty()) throw ValidationError("output_dir must not be empty");
    }
    return cfg;
}

std::vector<FigurePanel> figure_panels() {
    const ModelParams base;  // alpha 0.127, rho 1.11, compound Poisson c 0.4, lambda 2
    const MarketState state{0.0, 2.5, 0.0625};
    std::vector<FigurePanel> panels;
    auto add = [&](std::string name, std::string title, PanelKind kind, SpotModel model, ModelParams p,
                   MeasureChange mc) {
        panels.push_back({std::move(name), std::move(title), kind, model, std::move(p), mc, state});
    };
    const auto curve = PanelKind::premium_curve;
    const auto arith = SpotModel::arithmetic;
    const auto geo = SpotModel::geometric;
    add("arithmetic_theta1_0.3_beta1_0", "arithmetic premium, theta1=0.3, beta1=0.0", curve, arith, base,
        {0.3, 0.0, 0.0, 0.0});
    add("arithmetic_theta1_-0.3_beta1_0", "arithmetic premium, theta1=-0.3, beta1=0.0", curve, arith, base,
        {-0.3, 0.0, 0.0, 0.0});
    add("arithmetic_theta1_0_beta1_0.9", "arithmetic premium, theta1=0.0, beta1=0.9", curve, arith, base,
        {0.0, 0.0, 0.9, 0.0});
    add("arithmetic_theta1_-0.04_beta1_0.9", "arithmetic premium, theta1=-0.04, beta1=0.9", curve, arith, base,
        {-0.04, 0.0, 0.9, 0.0});

    ModelParams one_jump = base;
    one_jump.sub = SubordinatorSpec::dirac(1.0);
    add("riccati_one_jump", "Riccati example, one jump size, beta1=beta2=0.3", PanelKind::riccati_example, geo,
        one_jump, {0.0, 0.0, 0.3, 0.3});
    add("riccati_exp_jumps", "Riccati example, exponential jumps, theta2=-5, beta1=beta2=0.45",
        PanelKind::riccati_example, geo, base, {0.0, -5.0, 0.45, 0.45});

    add("geometric_esscher_theta1_0.024_theta2_-50", "geometric Esscher premium, theta1=0.024, theta2=-50", curve,
        geo, base, {0.024, -50.0, 0.0, 0.0});
    add("geometric_esscher_theta1_-2_theta2_-50", "geometric Esscher premium, theta1=-2, theta2=-50", curve, geo,
        base, {-2.0, -50.0, 0.0, 0.0});
    add("geometric_speed_beta1_0.18_beta2_0.2", "geometric speed-only premium, beta1=0.18, beta2=0.2", curve, geo,
        base, {0.0, 0.0, 0.18, 0.2});
    add("geometric_speed_beta1_0.75_beta2_0", "geometric speed-only premium, beta1=0.75, beta2=0", curve, geo, base,
        {0.0, 0.0, 0.75, 0.0});
    add("geometric_general_theta1_0.001_theta2_-50_beta2_0.9",
        "geometric premium, theta1=0.001, theta2=-50, beta1=0, beta2=0.9", curve, geo, base,
        {0.001, -50.0, 0.0, 0.9});
    add("geometric_general_theta1_-0.1_theta2_-50_beta_0.8",
        "geometric premium, theta1=-0.1, theta2=-50, beta1=0.8, beta2=0.8", curve, geo, base,
        {-0.1, -50.0, 0.8, 0.8});
    return panels;
}

std::vector<double> figure_tau_grid() {
    std::vector<double> taus{0.0};
    for (int k = -30; k < 0; ++k) taus.push_back(std::pow(10.0, k / 10.0));
    for (int d = 1; d <= 360; ++d) taus.push_back(d);
    return taus;
}

Json run_figure_panel(const FigurePanel& panel, const std::string& dir) {
    Json entry;
    entry["name"] = panel.name;
    entry["title"] = panel.title;
    entry["kind"] = panel.kind == PanelKind::premium_curve ? "premium_curve" : "riccati_example";
    entry["model"] = to_string(panel.model);
    entry["params"] = to_json(panel.params);
    entry["measure"] = to_json(panel.mc);
    entry["state"] = to_json(panel.state);
    Json warnings = Json::array();
    Json files = Json::array();
    try {
        if (panel.kind == PanelKind::premium_curve) {
            for (const auto& w : pricing_warnings(panel.params, panel.mc, panel.model)) warnings.push_back(w);
            const PremiumCurve c =
                curve_with_fallback(panel.params, panel.mc, panel.state, figure_tau_grid(), panel.model, warnings);
            write_file_atomic(join(dir, panel.name + ".csv"), premium_curve_csv(c));
            files.push_back(panel.name + ".csv");
            entry["slope_zero"] = number_or_null(c.slope_zero);
            entry["limit_infinity"] = number_or_null(c.limit_infinity);
            entry["sign_changes"] = sign_changes(c);
        } else {
            const Json adm = admissibility_json(panel.params, panel.mc);
            for (const auto& w : adm["warnings"]) warnings.push_back(w);
            entry["admissibility"] = adm;
            const RiccatiSolution sol = solve_riccati(panel.params, panel.mc, 40.0);
            if (sol.blow_up) warnings.push_back("blow-up guard fired at t = " + format_double(*sol.blow_up));
            write_file_atomic(join(dir, panel.name + ".csv"), riccati_csv(sol));
            files.push_back(panel.name + ".csv");

            write_file_atomic(join(dir, panel.name + "_field.csv"),
                              field_grid_csv(panel.params, panel.mc, {0.0, 1.5, 31}, {0.0, 1.0, 21}));
            files.push_back(panel.name + "_field.csv");

            // Lambda with a = 1/2, the bound on Psi_2^2 / 2 that drives Psi_1.
            const auto& sub = panel.params.sub;
            const double th = panel.mc.theta2, b = panel.mc.beta2, rho = panel.params.rho;
            const double u_hi = std::min(3.0, 0.99 * (theta_max(sub) - th));
            std::string hat = "u,lambda_hat\n";
            for (int i = 0; i <= 300; ++i) {
                const double u = u_hi * i / 300.0;
                hat += csv_row({u, lambda_fn(sub, th, b, 0.5, rho, u)});
            }
            write_file_atomic(join(dir, panel.name + "_lambda_hat.csv"), hat);
            files.push_back(panel.name + "_lambda_hat.csv");

            // u^m and u^0 at a = 1/2 as functions of beta up to beta_max.
            const auto bm = beta_max(sub, th, 0.5, rho);
            std::string bounds = "beta,u_min,u_zero\n";
            if (bm) {
                for (int i = 1; i <= 100; ++i) {
                    const double beta = std::min(*bm * i / 100.0, *bm);
                    try {
                        bounds += csv_row({beta, u_min(sub, th, beta), u_zero(sub, th, beta, 0.5, rho)});
                    } catch (const DomainError&) {
                    }
                }
            } else {
                warnings.push_back("no admissible beta: bounds file is empty");
            }
            write_file_atomic(join(dir, panel.name + "_bounds.csv"), bounds);
            files.push_back(panel.name + "_bounds.csv");
        }
        entry["status"] = "ok";
    } catch (const std::exception& e) {
        warnings.push_back(std::string("panel failed: ") + e.what());
        entry["status"] = "failed";
    }
    entry["files"] = files;
    entry["warnings"] = warnings;
    return entry;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forward prices and risk premia under OU spot models with BNS stochastic volatility",
                 "affine-premia"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::string spot_model;
    bool field_grid = false;
    std::map<std::string, double> values;
    std::map<std::string, std::uint64_t> counts;
    struct NumberFlag {
        const char* flag;
        const char* path;
        const char* help;
    };
    const NumberFlag number_flags[] = {
        {"--alpha", "model.alpha", "mean reversion of X, per day"},
        {"--rho", "model.rho", "mean reversion of sigma^2, per day"},
        {"--theta1", "measure.theta1", "level shift of X"},
        {"--theta2", "measure.theta2", "Esscher parameter of the subordinator"},
        {"--beta1", "measure.beta1", "speed reduction of X"},
        {"--beta2", "measure.beta2", "speed reduction of sigma^2"},
        {"--t", "state.t", "current time, days"},
        {"--x", "state.x", "current X(t)"},
        {"--sigma2", "state.sigma2", "current sigma^2(t)"},
        {"--T", "options.T", "maturity, absolute days"},
        {"--tau", "options.tau", "time to maturity, days"},
        {"--T1", "options.T1", "swap delivery start"},
        {"--T2", "options.T2", "swap delivery end"},
        {"--horizon", "options.horizon", "Riccati horizon, days"},
        {"--ts-epsilon", "options.ts_epsilon", "jump threshold for tempered stable simulation"},
    };
    const NumberFlag count_flags[] = {
        {"--paths", "options.n_paths", "Monte Carlo paths"},
        {"--seed", "options.seed", "Monte Carlo seed"},
        {"--dump-paths", "options.dump_paths", "number of paths to dump"},
    };
    std::string measure_name, quantity;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--set", sets, "override any config path, path=value (value parsed as JSON)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--model", spot_model, "arithmetic or geometric");
        for (const auto& f : number_flags) sub->add_option(f.flag, values[f.path], f.help);
        for (const auto& f : count_flags) sub->add_option(f.flag, counts[f.path], f.help);
    };
    struct Command {
        const char* name;
        const char* help;
        std::function<int(const RunConfig&, std::ostream&)> run;
    };
    const Command commands[] = {
        {"price", "forward price (and swap price with T1, T2) under P and Q", cmd_price},
        {"premium-curve", "premium curve CSV over a tau grid with diagnostics", cmd_premium_curve},
        {"admissibility", "D_L, D_b(1/2) and Assumption P report", cmd_admissibility},
        {"riccati", "Riccati solution CSV and optional vector field grid", cmd_riccati},
        {"simulate", "Monte Carlo estimate of a forward or premium", cmd_simulate},
        {"figures", "data of every figure panel", cmd_figures},
    };
    std::map<const CLI::App*, const Command*> by_sub;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common(sub);
        if (std::string(c.name) == "riccati") sub->add_flag("--field-grid", field_grid, "also write the vector field");
        if (std::string(c.name) == "simulate") {
            sub->add_option("--measure", measure_name, "P or Q");
            sub->add_option("--quantity", quantity, "forward or premium");
        }
        by_sub[sub] = &c;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    try {
        Json doc = Json::object();
        if (!config_path.empty()) doc = parse_json(read_file(config_path));
        for (const auto& f : number_flags) {
            if (chosen->count(f.flag)) set_path(doc, f.path, values[f.path]);
        }
        for (const auto& f : count_flags) {
            if (chosen->count(f.flag)) set_path(doc, f.path, counts[f.path]);
        }
        if (!out_dir.empty()) doc["output_dir"] = out_dir;
        if (!spot_model.empty()) doc["spot_model"] = spot_model;
        if (field_grid && !(doc.contains("options") && doc["options"].contains("field_grid"))) {
            set_path(doc, "options.field_grid", true);
        }
        if (!measure_name.empty()) set_path(doc, "options.measure", measure_name);
        if (!quantity.empty()) set_path(doc, "options.quantity", quantity);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ValidationError("--set expects path=value, got '" + s + "'");
            const std::string value = s.substr(eq + 1);
            Json v;
            try {
                v = Json::parse(value);
            } catch (const Json::parse_error&) {
                v = value;
            }
            set_path(doc, s.substr(0, eq), v);
        }
        const RunConfig cfg = config_from_json(doc);
        return by_sub.at(chosen)->run(cfg, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const UnsupportedModelError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace premia::cli
