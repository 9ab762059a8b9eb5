#include "mesgame/baselines.hpp"

#include <limits>
#include <random>

namespace mesgame {

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::proposed:
      return "proposed";
    case Scheme::price_minimized:
      return "price_minimized";
    case Scheme::random:
      return "random";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(const std::string& name) {
  for (const auto s : {Scheme::proposed, Scheme::price_minimized, Scheme::random})
    if (name == scheme_name(s)) return s;
  return std::nullopt;
}

namespace {

BaselineResult from_evaluation(Scheme scheme, const EquilibriumResult& eval) {
  BaselineResult r;
  r.scheme = scheme;
  r.status = eval.status;
  r.price = eval.price;
  r.energy = eval.energy;
  r.pso_utility = eval.pso_utility;
  r.lcs_load = eval.lcs_load;
  r.rcs_draw = eval.rcs_draw;
  r.diagnosis = eval.diagnosis;
  return r;
}

BaselineResult infeasible(Scheme scheme, std::vector<std::string> diagnosis) {
  BaselineResult r;
  r.scheme = scheme;
  r.status = Feasibility::infeasible;
  r.price = std::numeric_limits<double>::quiet_NaN();
  r.pso_utility = std::numeric_limits<double>::quiet_NaN();
  r.diagnosis = std::move(diagnosis);
  return r;
}

}  // namespace

BaselineResult solve_price_minimized(const Scenario& scenario) {
  const auto profiles = best_response_profiles(scenario);
  const auto& lcs = scenario.stations().lcs;
  double price = 0.0;
  for (std::size_t j = 0; j < lcs.size(); ++j) {
    std::vector<bool> members(profiles.size());
    for (std::size_t k = 0; k < profiles.size(); ++k)
      members[k] = scenario.route(k).lcs == j;
    const auto needed =
        minimum_price_for_load(profiles, members, lcs[j].demand_min());
    if (!needed)
      return infeasible(Scheme::price_minimized,
                        diagnose_infeasibility(scenario, profiles));
    price = std::max(price, *needed);
  }
  auto eval = evaluate_price(scenario, profiles, price);
  auto result = from_evaluation(Scheme::price_minimized, eval);
  if (!result.feasible()) {
    // Loads only grow with price, so a violated cap here is violated above too.
    result.diagnosis = check_constraints(scenario, eval.energy).violated();
  }
  return result;
}

BaselineResult solve_random(const Scenario& scenario, std::uint64_t seed) {
  const auto profiles = best_response_profiles(scenario);
  const auto breakpoints = build_breakpoints(profiles);
  const double lo = breakpoints.floor();
  const double hi = breakpoints.ceiling();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (std::size_t attempt = 1; attempt <= kRandomAttemptCap; ++attempt) {
    const double price = lo == hi ? lo : dist(rng);
    const auto eval = evaluate_price(scenario, profiles, price);
    if (eval.feasible()) {
      auto result = from_evaluation(Scheme::random, eval);
      result.seed = seed;
      result.attempts = attempt;
      return result;
    }
  }
  auto result = infeasible(
      Scheme::random, {"no feasible price among " +
                       std::to_string(kRandomAttemptCap) + " random draws"});
  result.seed = seed;
  result.attempts = kRandomAttemptCap;
  return result;
}

BaselineResult solve_proposed(const Scenario& scenario) {
  return from_evaluation(Scheme::proposed, solve_equilibrium(scenario));
}

BaselineResult solve_scheme(const Scenario& scenario, Scheme scheme,
                            std::uint64_t seed) {
  switch (scheme) {
    case Scheme::proposed:
      return solve_proposed(scenario);
    case Scheme::price_minimized:
      return solve_price_minimized(scenario);
    case Scheme::random:
      return solve_random(scenario, seed);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace mesgame
