#include "mesgame/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mesgame::verify {

void validate(const GridSpec& grid) {
  if (!(grid.energy_step_fraction > 0.0) || !(grid.price_step > 0.0) ||
      !(grid.tolerance >= 0.0))
    throw std::invalid_argument("grid steps must be > 0");
}

double brute_best_response(const MesAgent& agent, double price,
                           double mean_target, ServicePowers powers,
                           const GridSpec& grid) {
  validate(grid);
  const double capacity = agent.service_capacity();
  if (capacity <= 0.0) return 0.0;
  const auto steps =
      static_cast<std::size_t>(std::llround(1.0 / grid.energy_step_fraction));
  double best_energy = 0.0;
  double best_value = mes_utility(agent, 0.0, price, mean_target, powers);
  for (std::size_t n = 1; n <= steps; ++n) {
    const double e = capacity * static_cast<double>(n) / static_cast<double>(steps);
    const double value = mes_utility(agent, e, price, mean_target, powers);
    if (value > best_value) {
      best_value = value;
      best_energy = e;
    }
  }
  return best_energy;
}

namespace {

/// Operator utility and feasibility at one price, written out directly from
/// the model rather than through the leader module.
struct PointEvaluation {
  double utility = 0.0;
  bool feasible = false;
};

PointEvaluation evaluate(const Scenario& scenario,
                         const std::vector<BestResponseProfile>& profiles,
                         double price, double tolerance) {
  const auto& st = scenario.stations();
  std::vector<double> delivered(st.lcs.size(), 0.0);
  std::vector<double> drawn(st.rcs.size(), 0.0);
  double paid = 0.0;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const double e = best_response(profiles[k], price);
    delivered[scenario.route(k).lcs] += e;
    drawn[scenario.route(k).rcs] += e;
    paid += price * e + price * (e - scenario.mean_service_target());
  }
  PointEvaluation out;
  out.feasible = true;
  double revenue = 0.0;
  for (std::size_t j = 0; j < st.lcs.size(); ++j) {
    const double a = 5e-4 * st.lcs[j].demand_max();
    const double b = a * st.lcs[j].demand_max();
    revenue += b * b - std::pow(a * delivered[j] - b, 2);
    if (delivered[j] < st.lcs[j].demand_min() - tolerance ||
        delivered[j] > st.lcs[j].demand_max() + tolerance)
      out.feasible = false;
  }
  for (std::size_t i = 0; i < st.rcs.size(); ++i)
    if (drawn[i] > st.rcs[i].surplus_energy + tolerance) out.feasible = false;
  out.utility = scenario.loading_weight() * revenue - paid;
  return out;
}

std::vector<double> price_grid(const std::vector<BestResponseProfile>& profiles,
                               double step) {
  double ceiling = 0.0;
  for (const auto& p : profiles)
    ceiling = std::max({ceiling, p.rejection_price, p.saturation_price});
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor(ceiling / step));
  grid.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) * step);
  if (grid.back() < ceiling) grid.push_back(ceiling);
  return grid;
}

}  // namespace

std::optional<GridOptimum> brute_equilibrium(const Scenario& scenario,
                                             const GridSpec& grid) {
  validate(grid);
  const auto profiles = best_response_profiles(scenario);
  std::optional<GridOptimum> best;
  std::size_t feasible_points = 0;
  for (const double price : price_grid(profiles, grid.price_step)) {
    const auto point = evaluate(scenario, profiles, price, grid.tolerance);
    if (!point.feasible) continue;
    ++feasible_points;
    if (!best || point.utility > best->utility)
      best = GridOptimum{price, point.utility, 0};
  }
  if (best) best->feasible_points = feasible_points;
  return best;
}

std::optional<double> brute_minimum_feasible_price(const Scenario& scenario,
                                                   const GridSpec& grid) {
  validate(grid);
  const auto profiles = best_response_profiles(scenario);
  for (const double price : price_grid(profiles, grid.price_step))
    if (evaluate(scenario, profiles, price, grid.tolerance).feasible) return price;
  return std::nullopt;
}

}  // namespace mesgame::verify
