#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mesgame/baselines.hpp"
#include "mesgame/scenario_io.hpp"

namespace mesgame {

enum class SweepParameter {
  capacity_mean,       // mean of the service-capacity distribution
  fleet_size,          // multiplier on every pair count
  loading_weight,      // operator loading weight
  degradation_weight,  // every agent's degradation weight
};

const char* parameter_name(SweepParameter parameter);
std::optional<SweepParameter> parse_parameter(std::string_view name);

/// One parameter sweep over a base scenario.
///
/// File layout:
///
///   [sweep]
///   scenario = table1.scn        # relative to the sweep file
///   parameter = loading_weight
///   values = 0.1 0.2 0.3
///   seeds = 1 2 3                # or: seed_range = 1 50
///   schemes = proposed price_minimized random
struct SweepSpec {
  ScenarioDocument base;
  SweepParameter parameter = SweepParameter::loading_weight;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::vector<Scheme> schemes{Scheme::proposed, Scheme::price_minimized,
                              Scheme::random};
};

/// Checks the spec invariants (nonempty values, at least one seed, base
/// scenario compatible with the swept parameter).
void validate(const SweepSpec& spec);

SweepSpec parse_sweep_spec(std::string_view text,
                           const std::filesystem::path& base_dir);
SweepSpec read_sweep_spec(const std::filesystem::path& path);

/// The concrete scenario behind one sweep point.
Scenario scenario_for(const SweepSpec& spec, double value, std::uint64_t seed);

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::proposed;
  Feasibility status = Feasibility::infeasible;
  double price = 0.0;
  double pso_utility = 0.0;
  std::vector<double> lcs_load;
  /// LCSs whose load sits at the top of their demand window.
  std::vector<bool> saturated;
};

struct SweepSeries {
  SweepParameter parameter = SweepParameter::loading_weight;
  std::vector<std::string> lcs_ids;
  /// Ordered by (value, seed, scheme) in spec order.
  std::vector<SweepRow> rows;
};

/// Runs every (value, seed, scheme) point. The result does not depend on
/// `threads`.
SweepSeries run_sweep(const SweepSpec& spec, unsigned threads = 1);

/// Mean over the feasible seeds of one (value, scheme) cell.
struct SweepAggregate {
  double value = 0.0;
  Scheme scheme = Scheme::proposed;
  std::size_t seeds = 0;
  std::size_t feasible_seeds = 0;
  double mean_price = 0.0;
  double mean_pso_utility = 0.0;
  std::vector<double> mean_lcs_load;
  /// Fraction of feasible seeds in which each LCS is saturated.
  std::vector<double> saturated_fraction;
};

std::vector<SweepAggregate> aggregate(const SweepSeries& series);

/// Per-point rows: header plus one line per row, LF endings, 9 significant
/// digits. Infeasible rows leave the numeric fields empty.
std::string sweep_csv(const SweepSeries& series);
std::string aggregate_csv(const SweepSeries& series,
                          const std::vector<SweepAggregate>& cells);

/// printf("%.9g") formatting used throughout the CSV outputs.
std::string format_sig9(double value);

}  // namespace mesgame
