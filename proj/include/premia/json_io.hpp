#pragma once

// JSON forms of the model types. Readers reject unknown keys and wrong types
// with a ValidationError naming the offending path; absent keys keep their
// defaults.
//
//   subordinator  {"kind":"dirac","a":1} | {"kind":"cp_exp","c":0.4,"lambda":2}
//                 | {"kind":"tempered_stable","c":..,"lambda":..,"alpha_ts":..}
//                 optional "strict": false relaxes Theta_L > 1 to Theta_L > 0
//   seasonal      {"kind":"constant","value":v} | {"kind":"sin","level":..,"amplitude":..,"period_days":..}
//   model         {"alpha","rho","subordinator","seasonal_a","seasonal_g"}
//   measure       {"theta1","theta2","beta1","beta2"}
//   state         {"t","x","sigma2"}

#include "premia/admissibility.hpp"
#include "premia/mc.hpp"
#include "premia/riccati.hpp"

#include "json.hpp"

#include <string>

namespace premia {

using Json = nlohmann::json;

/// ValidationError on malformed input.
Json parse_json(const std::string& text);

/// Two-space indented document terminated by a newline.
std::string dump_json(const Json& j);

Json to_json(const SubordinatorSpec& sub);
Json to_json(const Seasonal& s);
Json to_json(const ModelParams& p);
Json to_json(const MeasureChange& mc);
Json to_json(const MarketState& s);
Json to_json(const SimEstimate& e);
Json to_json(const DbReport& r);
Json to_json(const AssumptionPReport& r);
Json to_json(const LongRun& lr);

/// `path` prefixes error messages, e.g. "model.subordinator".
SubordinatorSpec subordinator_from_json(const Json& j, const std::string& path = "subordinator");
Seasonal seasonal_from_json(const Json& j, const std::string& path = "seasonal");
ModelParams model_from_json(const Json& j, const std::string& path = "model");
MeasureChange measure_from_json(const Json& j, const std::string& path = "measure");
MarketState state_from_json(const Json& j, const std::string& path = "state");
SimEstimate estimate_from_json(const Json& j, const std::string& path = "estimate");

/// Sets the value at a dotted path ("model.subordinator.c"), creating
/// intermediate objects.
void set_path(Json& root, const std::string& dotted, Json value);

}  // namespace premia
