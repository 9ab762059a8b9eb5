#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mesgame/domain.hpp"
#include "mesgame/follower.hpp"

namespace mesgame {

/// Absolute slack (kWh) allowed when testing the LCS and RCS constraints.
inline constexpr double kFeasibilityTolerance = 1e-6;

/// Operator payoff: weighted loading revenue of every LCS minus the service
/// and motivation payments to the fleet.
double pso_utility(const Scenario& scenario, double price,
                   const std::vector<double>& energy);

/// Sum of `energy` over the fleet members bound for each LCS.
std::vector<double> lcs_loads(const Scenario& scenario,
                              const std::vector<double>& energy);
/// Sum of `energy` over the fleet members charging at each RCS.
std::vector<double> rcs_draws(const Scenario& scenario,
                              const std::vector<double>& energy);

struct ConstraintSlack {
  std::string name;  // e.g. "lcs[L1].demand_min", "rcs[R2].surplus_energy"
  double slack = 0.0;  // >= 0 when satisfied exactly
};

struct ConstraintReport {
  std::vector<double> lcs_load;
  std::vector<double> rcs_draw;
  std::vector<ConstraintSlack> slacks;

  bool feasible(double tolerance = kFeasibilityTolerance) const;
  std::vector<std::string> violated(
      double tolerance = kFeasibilityTolerance) const;
};

/// Evaluates every LCS demand window and RCS surplus limit for `energy`.
ConstraintReport check_constraints(const Scenario& scenario,
                                   const std::vector<double>& energy);

/// Sorted threshold prices of the whole fleet.
struct PriceBreakpoints {
  /// All 2K thresholds clamped at 0, ascending; equal values keep fleet order.
  std::vector<double> values;
  /// `values` with duplicates removed. Interval m spans points[m]..points[m+1].
  std::vector<double> points;

  std::size_t interval_count() const noexcept {
    return points.size() > 1 ? points.size() - 1 : 0;
  }
  double floor() const { return points.front(); }
  double ceiling() const { return points.back(); }
};

PriceBreakpoints build_breakpoints(
    const std::vector<BestResponseProfile>& profiles);
PriceBreakpoints build_breakpoints(const Scenario& scenario);

/// Aggregate energy slope*p + offset of a group of agents on one interval.
struct LinearLoad {
  double slope = 0.0;
  double offset = 0.0;

  double at(double price) const noexcept { return slope * price + offset; }
};

struct PriceRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// The leader problem restricted to one price interval, where every agent's
/// branch is fixed and the operator utility is a concave quadratic
/// quad_a*p^2 + quad_b*p + quad_c.
struct IntervalProgram {
  std::size_t index = 0;  // 0-based interval number
  double lower = 0.0;
  double upper = 0.0;
  bool degenerate = false;  // lower == upper; a single candidate point
  std::vector<ResponseBranch> branch;
  std::vector<std::size_t> interior;   // agents on the linear branch
  std::vector<std::size_t> saturated;  // agents at full capacity
  double quad_a = 0.0;
  double quad_b = 0.0;
  double quad_c = 0.0;
  std::vector<LinearLoad> lcs_load;
  std::vector<LinearLoad> rcs_draw;
  /// Prices in [lower, upper] meeting every LCS and RCS constraint.
  std::optional<PriceRange> feasible;

  double value_at(double price) const noexcept {
    return (quad_a * price + quad_b) * price + quad_c;
  }
};

/// Builds the program on [lower, upper]; agent branches are read off at the
/// interval midpoint.
IntervalProgram build_interval_program(
    const Scenario& scenario, const std::vector<BestResponseProfile>& profiles,
    double lower, double upper, std::size_t index = 0);

/// Program for interval m (0-based) of `breakpoints`.
IntervalProgram build_interval_program(
    const Scenario& scenario, const std::vector<BestResponseProfile>& profiles,
    const PriceBreakpoints& breakpoints, std::size_t m);

struct IntervalOptimum {
  double price = 0.0;
  double value = 0.0;
};

/// Closed-form maximiser of the program over its feasible range, or nullopt
/// when the range is empty.
std::optional<IntervalOptimum> solve_interval(const IntervalProgram& program);

/// Smallest price p >= 0 at which the total best response of the agents with
/// `members[k]` set reaches `level`; nullopt if it never does.
std::optional<double> minimum_price_for_load(
    const std::vector<BestResponseProfile>& profiles,
    const std::vector<bool>& members, double level);

enum class Feasibility { feasible, infeasible };

struct EquilibriumResult {
  Feasibility status = Feasibility::infeasible;
  double price = 0.0;
  std::vector<double> energy;
  double pso_utility = 0.0;
  std::vector<double> mes_utility;
  std::vector<bool> participation;
  std::vector<double> lcs_load;
  std::vector<double> rcs_draw;
  /// Interval holding the optimum; empty for isolated candidate points.
  std::optional<std::size_t> interval;
  /// Names the constraints that rule out every price when infeasible.
  std::vector<std::string> diagnosis;

  bool feasible() const noexcept { return status == Feasibility::feasible; }
};

/// Fills energy, utilities, participation and loads for a given price.
EquilibriumResult evaluate_price(const Scenario& scenario,
                                 const std::vector<BestResponseProfile>& profiles,
                                 double price);

/// Explains why no price in [0, ceiling] satisfies every constraint.
std::vector<std::string> diagnose_infeasibility(
    const Scenario& scenario, const std::vector<BestResponseProfile>& profiles);

/// Stackelberg equilibrium: sweeps every breakpoint interval, solves each in
/// closed form and keeps the feasible optimum with the highest operator
/// utility (ties go to the lower price).
EquilibriumResult solve_equilibrium(const Scenario& scenario);

}  // namespace mesgame
