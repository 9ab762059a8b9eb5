#pragma once

#include <optional>

#include "mesgame/domain.hpp"
#include "mesgame/follower.hpp"

/// Brute-force reference solvers. They share no code path with the closed
/// forms they check: follower optima come from scanning an energy grid and
/// leader optima from scanning a price grid.
namespace mesgame::verify {

struct GridSpec {
  /// Energy grid step as a fraction of the agent's service capacity.
  double energy_step_fraction = 1e-3;
  /// Absolute price grid step.
  double price_step = 1e-4;
  /// Constraint slack in kWh.
  double tolerance = 1e-6;
};

void validate(const GridSpec& grid);

/// Grid argmax of the follower utility over [0, capacity]; the lowest energy
/// wins ties.
double brute_best_response(const MesAgent& agent, double price,
                           double mean_target, ServicePowers powers,
                           const GridSpec& grid = {});

struct GridOptimum {
  double price = 0.0;
  double utility = 0.0;
  std::size_t feasible_points = 0;
};

/// Exhaustive scan of p = 0, h, 2h, ... up to the largest threshold price
/// (which is always included). Returns the best feasible grid price, or
/// nullopt when no grid point is feasible.
std::optional<GridOptimum> brute_equilibrium(const Scenario& scenario,
                                             const GridSpec& grid = {});

/// Smallest grid price meeting every constraint.
std::optional<double> brute_minimum_feasible_price(const Scenario& scenario,
                                                   const GridSpec& grid = {});

}  // namespace mesgame::verify
