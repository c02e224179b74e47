#pragma once

// Batch front end:
//
//   affine-premia <price|premium-curve|admissibility|riccati|simulate|figures>
//                 [--config FILE] [overrides]
//
// The config is one JSON document
//
//   {"model": {...}, "measure": {...}, "state": {...},
//    "spot_model": "arithmetic" | "geometric",
//    "options": {...}, "output_dir": "..."}
//
// and every flag overrides one path of it (--alpha sets model.alpha, --set
// a.b=v sets any path). Exit codes: 0 success, 2 invalid input, 3 numerical
// failure.

#include "premia/json_io.hpp"
#include "premia/pricing.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace premia::cli {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
    ModelParams params;
    MeasureChange mc;
    MarketState state;
    SpotModel model = SpotModel::geometric;
    Json options = Json::object();
    std::string output_dir = ".";
};

/// Builds and validates a RunConfig from a config document.
RunConfig config_from_json(const Json& doc);

enum class PanelKind { premium_curve, riccati_example };

/// One figure panel with its published parameters stored verbatim.
struct FigurePanel {
    std::string name;   // file stem
    std::string title;
    PanelKind kind = PanelKind::premium_curve;
    SpotModel model = SpotModel::geometric;
    ModelParams params;
    MeasureChange mc;
    MarketState state;
};

/// The twelve figure panels in publication order.
std::vector<FigurePanel> figure_panels();

/// Daily grid 0..360 plus log-spaced points in (0, 1) so that crossings
/// within the first day are resolved.
std::vector<double> figure_tau_grid();

/// Writes the files of one panel into dir and returns its manifest entry,
/// with warnings for failed admissibility diagnostics. Never throws for
/// numerical failures; those become warnings as well.
Json run_figure_panel(const FigurePanel& panel, const std::string& dir);

/// Runs one invocation; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace premia::cli
