#include "cli.hpp"

#include "premia/csv.hpp"
#include "premia/pricing.hpp"
#include "premia/riccati.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include <sys/wait.h>

using namespace premia;
using namespace premia::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("premia_cli_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write_config(const Json& doc, const std::string& name = "config.json") const {
        const std::string p = path(name);
        write_file_atomic(p, dump_json(doc));
        return p;
    }

    fs::path dir_;
};

std::vector<double> column(const CsvTable& t, const std::string& name) {
    const std::size_t c = t.column(name);
    std::vector<double> out;
    for (const auto& row : t.rows) out.push_back(row[c]);
    return out;
}

std::string raw_column(const std::string& csv, std::size_t index) {
    std::istringstream is(csv);
    std::string line, out;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string field;
        for (std::size_t i = 0; i <= index; ++i) std::getline(ls, field, ',');
        out += field + "\n";
    }
    return out;
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

TEST(CliConfig, RejectsUnknownKeys) {
    EXPECT_THROW(config_from_json(parse_json(R"({"modle":{}})")), ValidationError);
    EXPECT_THROW(config_from_json(parse_json(R"({"options":{"TT":3}})")), ValidationError);
    EXPECT_THROW(config_from_json(parse_json(R"({"spot_model":"log"})")), ValidationError);
    const auto cfg = config_from_json(parse_json(R"({"spot_model":"arithmetic","state":{"x":1}})"));
    EXPECT_EQ(cfg.model, SpotModel::arithmetic);
    EXPECT_EQ(cfg.state.x, 1.0);
}

TEST(CliFigures, PresetListHasTwelvePanels) {
    const auto panels = figure_panels();
    ASSERT_EQ(panels.size(), 12u);
    std::set<std::string> names;
    int arithmetic = 0, geometric = 0, riccati = 0;
    for (const auto& p : panels) {
        names.insert(p.name);
        EXPECT_EQ(p.params.alpha, 0.127);
        EXPECT_EQ(p.params.rho, 1.11);
        EXPECT_EQ(p.state.x, 2.5);
        EXPECT_EQ(p.state.sigma2, 0.25 * 0.25);
        if (p.kind == PanelKind::riccati_example) {
            ++riccati;
        } else if (p.model == SpotModel::arithmetic) {
            ++arithmetic;
        } else {
            ++geometric;
        }
    }
    EXPECT_EQ(names.size(), 12u);
    EXPECT_EQ(arithmetic, 4);
    EXPECT_EQ(geometric, 6);
    EXPECT_EQ(riccati, 2);
    const std::vector<MeasureChange> geometric_sets = {{0.024, -50.0, 0.0, 0.0}, {-2.0, -50.0, 0.0, 0.0},
                                                       {0.0, 0.0, 0.18, 0.2},    {0.0, 0.0, 0.75, 0.0},
                                                       {0.001, -50.0, 0.0, 0.9}, {-0.1, -50.0, 0.8, 0.8}};
    for (const auto& mc : geometric_sets) {
        bool found = false;
        for (const auto& p : panels) found = found || (p.model == SpotModel::geometric && p.mc == mc);
        EXPECT_TRUE(found) << mc.theta1 << " " << mc.theta2 << " " << mc.beta1 << " " << mc.beta2;
    }
}

TEST(CliFigures, TauGridResolvesFirstDay) {
    const auto taus = figure_tau_grid();
    EXPECT_EQ(taus.front(), 0.0);
    EXPECT_EQ(taus.back(), 360.0);
    for (std::size_t i = 1; i < taus.size(); ++i) EXPECT_LT(taus[i - 1], taus[i]);
    EXPECT_LT(taus[1], 0.01);
}

TEST_F(CliTest, PriceGeometricMatchesPricingModule) {
    const auto r = run({"price", "--model", "geometric", "--T", "30", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = parse_json(read_file(path("price.json")));
    EXPECT_EQ(j.at("forward_p").get<double>(), forward_geometric_P(ModelParams{}, MarketState{}, 30.0));
    EXPECT_EQ(j.at("forward_q").get<double>(), j.at("forward_p").get<double>());
    EXPECT_EQ(parse_json(r.out), j);
}

TEST_F(CliTest, PriceUnderMeasureChangeAndSwap) {
    const Json doc = {{"measure", {{"theta1", 0.0}, {"theta2", -5.0}, {"beta1", 0.45}, {"beta2", 0.45}}},
                      {"options", {{"T", 30.0}, {"T1", 30.0}, {"T2", 60.0}}},
                      {"output_dir", dir_.string()}};
    const auto r = run({"price", "--config", write_config(doc)});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = parse_json(r.out);
    const MeasureChange mc{0.0, -5.0, 0.45, 0.45};
    const auto sol = solve_riccati(ModelParams{}, mc, 60.0);
    EXPECT_NEAR(j.at("forward_q").get<double>(), forward_geometric(ModelParams{}, mc, MarketState{}, 30.0, sol),
                1e-12);
    EXPECT_NEAR(j.at("swap").at("price_q").get<double>(),
                swap_price(ModelParams{}, mc, MarketState{}, 30.0, 60.0, SpotModel::geometric, &sol), 1e-10);
}

TEST_F(CliTest, PriceAtZeroMaturityIsSpot) {
    for (const std::string model : {"arithmetic", "geometric"}) {
        const auto r = run({"price", "--model", model, "--tau", "0", "--theta1", "0.3", "--out", dir_.string()});
        ASSERT_EQ(r.code, 0) << r.err;
        const Json j = parse_json(r.out);
        const double s = model == "arithmetic" ? 2.5 : std::exp(2.5);
        EXPECT_NEAR(j.at("forward_q").get<double>(), s, 1e-12 * s) << model;
        EXPECT_NEAR(j.at("forward_p").get<double>(), s, 1e-12 * s) << model;
        EXPECT_NEAR(j.at("spot").get<double>(), s, 1e-12 * s);
    }
}

TEST_F(CliTest, InvalidThetaExitsTwoWithoutOutput) {
    const std::string out = path("never");
    const auto r = run({"price", "--theta2", "1.0", "--out", out});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("theta2 not in D_L"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(out));
    EXPECT_TRUE(r.out.empty());

    for (const std::vector<std::string> bad : {
             std::vector<std::string>{"premium-curve", "--beta1", "1.5", "--out", out},
             std::vector<std::string>{"riccati", "--alpha", "-1", "--out", out},
             std::vector<std::string>{"simulate", "--paths", "0", "--out", out},
             std::vector<std::string>{"price", "--set", "model.subordinator.kind=\"gamma\"", "--out", out},
             std::vector<std::string>{"price", "--set", "options.T=-1", "--out", out},
             std::vector<std::string>{"price", "--unknown-flag", "--out", out},
             std::vector<std::string>{"frobnicate"},
             std::vector<std::string>{},
         }) {
        const auto rb = run(bad);
        EXPECT_EQ(rb.code, 2) << (bad.empty() ? "" : bad[0]) << ": " << rb.err;
        EXPECT_FALSE(fs::exists(out));
    }
}

TEST_F(CliTest, NumericalFailureExitsThree) {
    // Psi_1 blows up before 100 days for this set.
    const auto r = run({"price", "--theta2", "0.5", "--beta2", "0.99", "--T", "100", "--out", dir_.string()});
    EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, HelpExitsZero) {
    const auto r = run({"price", "--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("--theta2"), std::string::npos);
}

TEST_F(CliTest, PremiumCurveArithmeticPresets) {
    const std::string a = path("a"), d = path("d");
    ASSERT_EQ(run({"premium-curve", "--model", "arithmetic", "--theta1", "0.3", "--out", a}).code, 0);
    ASSERT_EQ(run({"premium-curve", "--model", "arithmetic", "--theta1", "-0.04", "--beta1", "0.9", "--out", d}).code,
              0);

    const auto ta = parse_csv(read_file(a + "/premium_curve.csv"));
    EXPECT_EQ((std::vector<std::string>{"tau_days", "forward_q", "forward_p", "premium", "sigma"}), ta.header);
    EXPECT_EQ(ta.rows.size(), 361u);
    const auto pa = column(ta, "premium");
    for (std::size_t i = 1; i < pa.size(); ++i) EXPECT_GT(pa[i], 0.0) << i;

    const auto pd = column(parse_csv(read_file(d + "/premium_curve.csv")), "premium");
    EXPECT_GT(pd[1], 0.0);
    EXPECT_LT(pd.back(), 0.0);
    const Json side = parse_json(read_file(d + "/premium_curve.json"));
    EXPECT_NEAR(side.at("limit_infinity").get<double>(), -0.04 / (0.127 * 0.1), 1e-12);
    EXPECT_NEAR(side.at("slope_zero").get<double>(), 2.5 * 0.127 * 0.9 - 0.04, 1e-15);
    EXPECT_EQ(side.at("sign_changes").size(), 1u);
}

TEST_F(CliTest, PremiumCurveGeometricWarnsOutsideDb) {
    const auto r = run({"premium-curve", "--theta1", "0.001", "--theta2", "-50", "--beta2", "0.9", "--set",
                        "options.fine_short_end=true", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json side = parse_json(read_file(path("premium_curve.json")));
    EXPECT_FALSE(side.at("admissibility").at("in_Db").at("member").get<bool>());
    ASSERT_FALSE(side.at("warnings").empty());
    EXPECT_NE(side.at("warnings")[0].get<std::string>().find("D_b"), std::string::npos);
    const auto t = parse_csv(read_file(path("premium_curve.csv")));
    EXPECT_EQ(t.rows.size(), figure_tau_grid().size());
    const auto sigma = column(t, "sigma");
    EXPECT_GT(sigma[1], 0.0);
    EXPECT_LT(sigma.back(), 0.0);
}

TEST_F(CliTest, AdmissibilityReports) {
    auto r = run({"admissibility", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = parse_json(r.out);
    EXPECT_TRUE(j.at("assumption_P").at("holds").get<bool>());
    EXPECT_NEAR(j.at("assumption_P").at("margin").get<double>(), 1.709, 1e-3);

    r = run({"admissibility", "--theta2", "-5", "--beta2", "0.45", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    j = parse_json(r.out);
    EXPECT_TRUE(j.at("in_Db").at("member").get<bool>());
    EXPECT_GT(j.at("u_zero").get<double>(), 0.0);
    EXPECT_LE(j.at("u_zero").get<double>(), j.at("u_min").get<double>());
    EXPECT_GT(j.at("beta_max").get<double>(), 0.45);

    r = run({"admissibility", "--rho", "0.2", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    j = parse_json(r.out);
    EXPECT_TRUE(j.at("beta_max").is_null());
    EXPECT_NE(j.at("warnings").dump().find("no admissible beta"), std::string::npos);
}

TEST_F(CliTest, RiccatiIdentityDumpMatchesClosedForms) {
    const auto r = run({"riccati", "--horizon", "20", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = parse_csv(read_file(path("riccati.csv")));
    EXPECT_EQ((std::vector<std::string>{"t", "psi0", "psi1", "psi2"}), t.header);
    const ModelParams p;
    for (const auto& row : t.rows) {
        EXPECT_NEAR(row[2], psi1_closed_esscher(p, row[0]), 1e-8);
        EXPECT_NEAR(row[3], std::exp(-p.alpha * row[0]), 1e-12);
    }
    const Json side = parse_json(read_file(path("riccati.json")));
    EXPECT_TRUE(side.at("blow_up").is_null());
    EXPECT_FALSE(fs::exists(path("riccati_field.csv")));
}

TEST_F(CliTest, RiccatiFieldGridInvariantRegion) {
    const auto r = run({"riccati", "--theta2", "-5", "--beta1", "0.45", "--beta2", "0.45", "--field-grid", "--out",
                        dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = parse_csv(read_file(path("riccati_field.csv")));
    EXPECT_EQ((std::vector<std::string>{"u1", "u2", "lambda1", "lambda2"}), t.header);
    EXPECT_EQ(t.rows.size(), 21u * 21u);
    bool origin = false;
    for (const auto& row : t.rows) {
        if (row[0] == 0.0 && row[1] == 0.0) {
            origin = true;
            EXPECT_EQ(row[2], 0.0);
            EXPECT_EQ(row[3], 0.0);
        }
        if (row[0] == 0.0 && row[1] > 0.0) EXPECT_GT(row[2], 0.0);
        if (row[1] == 0.0) EXPECT_EQ(row[3], 0.0);
    }
    EXPECT_TRUE(origin);
}

TEST_F(CliTest, RiccatiBlowUpReportedWithExitZero) {
    const auto r = run({"riccati", "--theta2", "0.5", "--beta2", "0.99", "--horizon", "100", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json side = parse_json(read_file(path("riccati.json")));
    ASSERT_TRUE(side.at("blow_up").is_number());
    EXPECT_LT(side.at("horizon_solved").get<double>(), 100.0);
    EXPECT_FALSE(parse_csv(read_file(path("riccati.csv"))).rows.empty());
}

TEST_F(CliTest, SimulateEstimateSchemaAndDeterminism) {
    const std::vector<std::string> args = {"simulate", "--measure", "P", "--T", "30", "--paths", "4000",
                                           "--seed", "7", "--dump-paths", "2", "--out", dir_.string()};
    ASSERT_EQ(run(args).code, 0);
    const std::string first = read_file(path("simulate.json"));
    const std::string first_paths = read_file(path("paths.csv"));
    const Json j = parse_json(first);
    EXPECT_EQ(j.size(), 4u);
    for (const char* key : {"mean", "std_error", "n_paths", "seed"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j.at("n_paths").get<int>(), 4000);
    EXPECT_EQ(j.at("seed").get<int>(), 7);
    const auto est = estimate_from_json(j);
    const double analytic = forward_geometric_P(ModelParams{}, MarketState{}, 30.0);
    EXPECT_LT(std::abs(est.mean - analytic), 4.0 * est.std_error);

    const auto dump = parse_csv(first_paths);
    EXPECT_EQ((std::vector<std::string>{"path_id", "t", "x", "sigma2"}), dump.header);
    EXPECT_EQ(dump.rows.size(), 2u * 101u);

    ASSERT_EQ(run(args).code, 0);
    EXPECT_EQ(read_file(path("simulate.json")), first);
    EXPECT_EQ(read_file(path("paths.csv")), first_paths);
}

TEST_F(CliTest, SimulateIdentityPremiumIsZero) {
    const auto r = run({"simulate", "--quantity", "premium", "--T", "10", "--paths", "2000", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto est = estimate_from_json(parse_json(r.out));
    EXPECT_EQ(est.mean, 0.0);
    EXPECT_EQ(est.std_error, 0.0);
}

TEST_F(CliTest, SimulateTemperedStableNeedsThreshold) {
    const auto r = run({"simulate", "--set",
                        R"(model.subordinator={"kind":"tempered_stable","c":0.3,"lambda":2,"alpha_ts":0.5})", "--out",
                        path("ts")});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(fs::exists(path("ts")));
}

TEST_F(CliTest, FiguresEmitEveryPanel) {
    const auto r = run({"figures", "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json manifest = parse_json(read_file(path("manifest.json")));
    ASSERT_EQ(manifest.at("panels").size(), 12u);
    for (const auto& panel : manifest.at("panels")) {
        EXPECT_EQ(panel.at("status").get<std::string>(), "ok") << panel.dump();
        ASSERT_FALSE(panel.at("files").empty());
        for (const auto& f : panel.at("files")) {
            const auto t = parse_csv(read_file(path(f.get<std::string>())));
            EXPECT_FALSE(t.rows.empty()) << f;
        }
    }
    // Esscher theta1 = -2: premium negative at the long end.
    const auto t = parse_csv(read_file(path("geometric_esscher_theta1_-2_theta2_-50.csv")));
    EXPECT_LT(column(t, "premium").back(), 0.0);
    // The outside-D_b preset is emitted with a warning.
    bool warned = false;
    for (const auto& panel : manifest.at("panels")) {
        if (panel.at("name") == "geometric_general_theta1_0.001_theta2_-50_beta2_0.9") {
            warned = !panel.at("warnings").empty();
        }
    }
    EXPECT_TRUE(warned);
}

TEST_F(CliTest, ArithmeticPanelsIgnoreVolatilityParameters) {
    for (const auto& panel : figure_panels()) {
        if (panel.model != SpotModel::arithmetic || panel.kind != PanelKind::premium_curve) continue;
        auto perturbed = panel;
        perturbed.mc.theta2 = -3.0;
        perturbed.mc.beta2 = 0.6;
        fs::create_directories(dir_ / "a");
        fs::create_directories(dir_ / "b");
        run_figure_panel(panel, path("a"));
        run_figure_panel(perturbed, path("b"));
        const std::string a = read_file(path("a/" + panel.name + ".csv"));
        const std::string b = read_file(path("b/" + panel.name + ".csv"));
        EXPECT_EQ(raw_column(a, 3), raw_column(b, 3)) << panel.name;
        EXPECT_EQ(a, b) << panel.name;
    }
}

TEST_F(CliTest, FigureShapes) {
    fs::create_directories(dir_);
    for (const auto& panel : figure_panels()) {
        if (panel.kind != PanelKind::premium_curve) continue;
        const Json entry = run_figure_panel(panel, dir_.string());
        const auto sigma = column(parse_csv(read_file(path(panel.name + ".csv"))), "sigma");
        if (panel.name == "arithmetic_theta1_0.3_beta1_0" || panel.name == "arithmetic_theta1_-0.3_beta1_0") {
            EXPECT_TRUE(entry.at("sign_changes").empty()) << panel.name;
        }
        if (panel.name == "arithmetic_theta1_-0.04_beta1_0.9" ||
            panel.name == "geometric_esscher_theta1_0.024_theta2_-50" ||
            panel.name == "geometric_general_theta1_0.001_theta2_-50_beta2_0.9") {
            EXPECT_EQ(sign(sigma[1]), 1) << panel.name;
            EXPECT_EQ(sign(sigma.back()), -1) << panel.name;
        }
    }
}

TEST_F(CliTest, BinaryExitCodes) {
    const std::string bin = PREMIA_CLI_PATH;
    const std::string quiet = " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
    auto status = [&](const std::string& args) {
        const int s = std::system((bin + " " + args + quiet).c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("price --T 30 --out " + path("bin")), 0);
    EXPECT_TRUE(fs::exists(path("bin/price.json")));
    EXPECT_EQ(status("price --theta2 1 --out " + path("bin")), 2);
    EXPECT_NE(read_file(path("stderr.txt")).find("D_L"), std::string::npos);
    EXPECT_EQ(status("price --theta2 0.5 --beta2 0.99 --T 100 --out " + path("bin")), 3);
    EXPECT_EQ(status("price --config " + path("missing.json")), 2);
}
