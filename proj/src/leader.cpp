#include "mesgame/leader.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mesgame {

double pso_utility(const Scenario& scenario, double price,
                   const std::vector<double>& energy) {
  const auto loads = lcs_loads(scenario, energy);
  double loading = 0.0;
  for (std::size_t j = 0; j < loads.size(); ++j) {
    const auto& c = scenario.stations().lcs[j].loading();
    const double gap = c.a * loads[j] - c.b;
    loading += -gap * gap + c.c;
  }
  const double target = scenario.mean_service_target();
  double service = 0.0;
  double motivation = 0.0;
  for (const double e : energy) {
    service += price * e;
    motivation += price * (e - target);
  }
  return scenario.loading_weight() * loading - (service + motivation);
}

std::vector<double> lcs_loads(const Scenario& scenario,
                              const std::vector<double>& energy) {
  std::vector<double> loads(scenario.stations().lcs.size(), 0.0);
  for (std::size_t k = 0; k < energy.size(); ++k)
    loads[scenario.route(k).lcs] += energy[k];
  return loads;
}

std::vector<double> rcs_draws(const Scenario& scenario,
                              const std::vector<double>& energy) {
  std::vector<double> draws(scenario.stations().rcs.size(), 0.0);
  for (std::size_t k = 0; k < energy.size(); ++k)
    draws[scenario.route(k).rcs] += energy[k];
  return draws;
}

bool ConstraintReport::feasible(double tolerance) const {
  return std::all_of(slacks.begin(), slacks.end(),
                     [tolerance](const auto& s) { return s.slack >= -tolerance; });
}

std::vector<std::string> ConstraintReport::violated(double tolerance) const {
  std::vector<std::string> names;
  for (const auto& s : slacks)
    if (s.slack < -tolerance) names.push_back(s.name);
  return names;
}

ConstraintReport check_constraints(const Scenario& scenario,
                                   const std::vector<double>& energy) {
  ConstraintReport report;
  report.lcs_load = lcs_loads(scenario, energy);
  report.rcs_draw = rcs_draws(scenario, energy);
  const auto& st = scenario.stations();
  for (std::size_t j = 0; j < st.lcs.size(); ++j) {
    const auto& l = st.lcs[j];
    report.slacks.push_back({"lcs[" + l.id() + "].demand_min",
                             report.lcs_load[j] - l.demand_min()});
    report.slacks.push_back({"lcs[" + l.id() + "].demand_max",
                             l.demand_max() - report.lcs_load[j]});
  }
  for (std::size_t i = 0; i < st.rcs.size(); ++i)
    report.slacks.push_back({"rcs[" + st.rcs[i].id + "].surplus_energy",
                             st.rcs[i].surplus_energy - report.rcs_draw[i]});
  return report;
}

PriceBreakpoints build_breakpoints(
    const std::vector<BestResponseProfile>& profiles) {
  PriceBreakpoints bp;
  bp.values.reserve(2 * profiles.size());
  for (const auto& p : profiles)
    bp.values.push_back(std::max(0.0, p.rejection_price));
  for (const auto& p : profiles)
    bp.values.push_back(std::max(0.0, p.saturation_price));
  std::stable_sort(bp.values.begin(), bp.values.end());
  bp.points = bp.values;
  bp.points.erase(std::unique(bp.points.begin(), bp.points.end()),
                  bp.points.end());
  return bp;
}

PriceBreakpoints build_breakpoints(const Scenario& scenario) {
  return build_breakpoints(best_response_profiles(scenario));
}

namespace {

/// Narrows `range` to prices where load.at(p) >= level. Loads never decrease
/// with price, so this is a single lower cut.
void require_at_least(std::optional<PriceRange>& range, const LinearLoad& load,
                      double level) {
  if (!range) return;
  if (load.slope > 0.0) {
    range->lo = std::max(range->lo, (level - load.offset) / load.slope);
  } else if (load.offset < level) {
    range.reset();
    return;
  }
  if (range->lo > range->hi) range.reset();
}

void require_at_most(std::optional<PriceRange>& range, const LinearLoad& load,
                     double level) {
  if (!range) return;
  if (load.slope > 0.0) {
    range->hi = std::min(range->hi, (level - load.offset) / load.slope);
  } else if (load.offset > level) {
    range.reset();
    return;
  }
  if (range->lo > range->hi) range.reset();
}

}  // namespace

IntervalProgram build_interval_program(
    const Scenario& scenario, const std::vector<BestResponseProfile>& profiles,
    double lower, double upper, std::size_t index) {
  const auto& st = scenario.stations();
  IntervalProgram prog;
  prog.index = index;
  prog.lower = lower;
  prog.upper = upper;
  prog.degenerate = lower == upper;
  prog.lcs_load.assign(st.lcs.size(), {});
  prog.rcs_draw.assign(st.rcs.size(), {});

  const double probe = 0.5 * (lower + upper);
  prog.branch.reserve(profiles.size());
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const auto& prof = profiles[k];
    const auto branch = response_branch(prof, probe);
    prog.branch.push_back(branch);
    LinearLoad contribution;
    if (branch == ResponseBranch::interior) {
      prog.interior.push_back(k);
      contribution = {prof.slope, -prof.intercept};
    } else if (branch == ResponseBranch::saturated) {
      prog.saturated.push_back(k);
      contribution = {0.0, prof.capacity};
    } else {
      continue;
    }
    const auto& route = scenario.route(k);
    prog.lcs_load[route.lcs].slope += contribution.slope;
    prog.lcs_load[route.lcs].offset += contribution.offset;
    prog.rcs_draw[route.rcs].slope += contribution.slope;
    prog.rcs_draw[route.rcs].offset += contribution.offset;
  }

  // Expand alpha_L * sum_j (c_j - (a_j S_j(p) - b_j)^2) - 2 p T(p) + p K e_bar
  // with S_j = u_j p + v_j and T = sum_j S_j.
  const double weight = scenario.loading_weight();
  double total_slope = 0.0;
  double total_offset = 0.0;
  for (std::size_t j = 0; j < st.lcs.size(); ++j) {
    const auto& c = st.lcs[j].loading();
    const double u = prog.lcs_load[j].slope;
    const double v = prog.lcs_load[j].offset;
    const double shift = c.a * v - c.b;
    prog.quad_a -= weight * c.a * c.a * u * u;
    prog.quad_b -= 2.0 * weight * c.a * u * shift;
    prog.quad_c += weight * (c.c - shift * shift);
    total_slope += u;
    total_offset += v;
  }
  prog.quad_a -= 2.0 * total_slope;
  prog.quad_b += -2.0 * total_offset +
                 static_cast<double>(scenario.fleet_size()) *
                     scenario.mean_service_target();

  // Half the tolerance here keeps the endpoints strictly inside the slack
  // used by check_constraints once rounding is added.
  const double tol = 0.5 * kFeasibilityTolerance;
  std::optional<PriceRange> range = PriceRange{lower, upper};
  for (std::size_t j = 0; j < st.lcs.size(); ++j) {
    require_at_least(range, prog.lcs_load[j], st.lcs[j].demand_min() - tol);
    require_at_most(range, prog.lcs_load[j], st.lcs[j].demand_max() + tol);
  }
  for (std::size_t i = 0; i < st.rcs.size(); ++i)
    require_at_most(range, prog.rcs_draw[i], st.rcs[i].surplus_energy + tol);
  prog.feasible = range;
  return prog;
}

IntervalProgram build_interval_program(
    const Scenario& scenario, const std::vector<BestResponseProfile>& profiles,
    const PriceBreakpoints& breakpoints, std::size_t m) {
  if (breakpoints.points.size() == 1 && m == 0)
    return build_interval_program(scenario, profiles, breakpoints.points[0],
                                  breakpoints.points[0], 0);
  if (m >= breakpoints.interval_count())
    throw std::out_of_range("interval index out of range");
  return build_interval_program(scenario, profiles, breakpoints.points[m],
                                breakpoints.points[m + 1], m);
}

std::optional<IntervalOptimum> solve_interval(const IntervalProgram& program) {
  if (!program.feasible) return std::nullopt;
  const auto [lo, hi] = *program.feasible;
  double price = lo;
  if (program.quad_a < 0.0) {
    price = std::clamp(-program.quad_b / (2.0 * program.quad_a), lo, hi);
  } else if (program.value_at(hi) > program.value_at(lo)) {
    price = hi;
  }
  return IntervalOptimum{price, program.value_at(price)};
}

std::optional<double> minimum_price_for_load(
    const std::vector<BestResponseProfile>& profiles,
    const std::vector<bool>& members, double level) {
  const auto total = [&](double price) {
    double sum = 0.0;
    for (std::size_t k = 0; k < profiles.size(); ++k)
      if (members[k]) sum += best_response(profiles[k], price);
    return sum;
  };
  auto points = build_breakpoints(profiles).points;
  if (points.empty() || points.front() > 0.0) points.insert(points.begin(), 0.0);
  if (total(points.front()) >= level) return points.front();
  for (std::size_t n = 1; n < points.size(); ++n) {
    if (total(points[n]) < level) continue;
    // The group total is linear on (points[n-1], points[n]).
    const double lo = points[n - 1];
    const double hi = points[n];
    const double mid = 0.5 * (lo + hi);
    double slope = 0.0;
    double offset = 0.0;
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      if (!members[k]) continue;
      switch (response_branch(profiles[k], mid)) {
        case ResponseBranch::interior:
          slope += profiles[k].slope;
          offset -= profiles[k].intercept;
          break;
        case ResponseBranch::saturated:
          offset += profiles[k].capacity;
          break;
        case ResponseBranch::inactive:
          break;
      }
    }
    if (slope <= 0.0) return hi;
    return std::clamp((level - offset) / slope, lo, hi);
  }
  return std::nullopt;
}

EquilibriumResult evaluate_price(const Scenario& scenario,
                                 const std::vector<BestResponseProfile>& profiles,
                                 double price) {
  EquilibriumResult result;
  result.price = price;
  result.energy = best_responses(profiles, price);
  result.pso_utility = pso_utility(scenario, price, result.energy);
  const double target = scenario.mean_service_target();
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const auto& agent = scenario.fleet()[k];
    const auto powers = service_powers(scenario, k);
    result.mes_utility.push_back(
        mes_utility(agent, result.energy[k], price, target, powers));
    result.participation.push_back(result.mes_utility.back() > 0.0);
  }
  const auto report = check_constraints(scenario, result.energy);
  result.lcs_load = report.lcs_load;
  result.rcs_draw = report.rcs_draw;
  result.status =
      report.feasible() ? Feasibility::feasible : Feasibility::infeasible;
  return result;
}

namespace {

std::string describe(double value) {
  std::ostringstream os;
  os.precision(9);
  os << value;
  return os.str();
}

}  // namespace

std::vector<std::string> diagnose_infeasibility(
    const Scenario& scenario, const std::vector<BestResponseProfile>& profiles) {
  const auto& st = scenario.stations();
  const double ceiling = build_breakpoints(profiles).ceiling();
  const auto report_low = check_constraints(scenario, best_responses(profiles, 0.0));
  const auto report_high =
      check_constraints(scenario, best_responses(profiles, ceiling));
  const double tol = kFeasibilityTolerance;

  std::vector<std::string> messages;
  for (std::size_t j = 0; j < st.lcs.size(); ++j) {
    const auto& l = st.lcs[j];
    if (report_high.lcs_load[j] < l.demand_min() - tol)
      messages.push_back("lcs[" + l.id() + "].demand_min unreachable: " +
                         describe(report_high.lcs_load[j]) +
                         " kWh deliverable at saturation, " +
                         describe(l.demand_min()) + " kWh required");
    if (report_low.lcs_load[j] > l.demand_max() + tol)
      messages.push_back("lcs[" + l.id() + "].demand_max exceeded at price 0");
  }
  for (std::size_t i = 0; i < st.rcs.size(); ++i)
    if (report_low.rcs_draw[i] > st.rcs[i].surplus_energy + tol)
      messages.push_back("rcs[" + st.rcs[i].id +
                         "].surplus_energy exceeded at price 0");
  if (!messages.empty()) return messages;

  // Every constraint holds somewhere on its own; the lower bounds must then
  // push the price past a point where an upper bound breaks.
  double needed = 0.0;
  std::string binding;
  for (std::size_t j = 0; j < st.lcs.size(); ++j) {
    std::vector<bool> members(profiles.size());
    for (std::size_t k = 0; k < profiles.size(); ++k)
      members[k] = scenario.route(k).lcs == j;
    const auto p = minimum_price_for_load(profiles, members, st.lcs[j].demand_min());
    if (p && *p >= needed) {
      needed = *p;
      binding = "lcs[" + st.lcs[j].id() + "].demand_min";
    }
  }
  const auto at_needed =
      check_constraints(scenario, best_responses(profiles, needed));
  for (const auto& name : at_needed.violated())
    messages.push_back(name + " violated at price " + describe(needed) +
                       " required by " + binding);
  if (messages.empty())
    messages.push_back("no price satisfies all constraints jointly");
  return messages;
}

EquilibriumResult solve_equilibrium(const Scenario& scenario) {
  const auto profiles = best_response_profiles(scenario);
  const auto breakpoints = build_breakpoints(profiles);

  struct Candidate {
    double price;
    std::optional<std::size_t> interval;
  };
  std::vector<Candidate> candidates;

  bool zero_demand = true;
  for (const auto& l : scenario.stations().lcs)
    zero_demand = zero_demand && l.demand_min() == 0.0;
  if (zero_demand) candidates.push_back({0.0, std::nullopt});

  if (breakpoints.interval_count() == 0) {
    candidates.push_back({breakpoints.points.front(), std::nullopt});
  } else {
    for (std::size_t m = 0; m < breakpoints.interval_count(); ++m) {
      const auto program =
          build_interval_program(scenario, profiles, breakpoints, m);
      if (const auto opt = solve_interval(program))
        candidates.push_back({opt->price, m});
    }
  }

  std::optional<EquilibriumResult> best;
  for (const auto& cand : candidates) {
    auto result = evaluate_price(scenario, profiles, cand.price);
    if (!result.feasible()) continue;
    result.interval = cand.interval;
    if (!best) {
      best = std::move(result);
      continue;
    }
    const double scale = std::max(1.0, std::abs(best->pso_utility));
    const double gain = result.pso_utility - best->pso_utility;
    const bool tie = std::abs(gain) <= 1e-12 * scale;
    if ((!tie && gain > 0.0) || (tie && result.price < best->price))
      best = std::move(result);
  }

  if (best) return *best;
  EquilibriumResult infeasible;
  infeasible.status = Feasibility::infeasible;
  infeasible.price = std::numeric_limits<double>::quiet_NaN();
  infeasible.pso_utility = std::numeric_limits<double>::quiet_NaN();
  infeasible.diagnosis = diagnose_infeasibility(scenario, profiles);
  return infeasible;
}

}  // namespace mesgame
