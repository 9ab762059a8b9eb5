#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mesgame/domain.hpp"

namespace mesgame {

/// Parsed scenario file before the fleet is materialized.
///
/// File layout (line oriented, `#` starts a comment):
///
///   [weights]
///   loading_weight = 0.5
///
///   [rcs]            # id  surplus_energy  charge_power
///   R1 1600 90
///
///   [lcs]            # id  demand_min  demand_max  discharge_power
///   L1 100 200 60
///
///   [fleet]          # id rcs lcs battery_capacity initial_soc time_weight
///                    #    degradation_weight dod_quadratic dod_linear
///                    #    power_degradation
///   M1 R1 L1 80 66 30 100000 1 -0.222 0.000508
///
///   [fleet_spec]     # alternative to [fleet]
///   seed = 1
///   pair = R1 L1 6
///   capacity_mean = 14
///
///   [degradation]    # optional curve for D_k
///   beta = 0 0 0 0.000508
///
/// In [fleet] the power_degradation column may be `curve`, which evaluates
/// the [degradation] curve at the agent's LCS discharge power.
struct ScenarioDocument {
  StationGroup stations;
  double loading_weight = 0.5;
  std::optional<std::vector<MesAgent>> fleet;
  std::optional<FleetSpec> fleet_spec;
  std::uint64_t seed = 1;
  std::optional<DegradationCurve> curve;
};

ScenarioDocument parse_scenario_document(std::string_view text);
ScenarioDocument read_scenario_document(const std::filesystem::path& path);

/// Builds the Scenario. A [fleet_spec] document draws its fleet with `seed`
/// when given, else with the document's own seed.
Scenario materialize(const ScenarioDocument& doc,
                     std::optional<std::uint64_t> seed = std::nullopt);

Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Writes an explicit-fleet document. Numbers use the shortest decimal form
/// that reads back to the same double, so reloading is bit-exact.
std::string serialize_scenario(const Scenario& scenario);

/// Shortest round-trip decimal representation of `value`.
std::string format_exact(double value);

}  // namespace mesgame
