#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mesgame/leader.hpp"

namespace mesgame {

enum class Scheme { proposed, price_minimized, random };

const char* scheme_name(Scheme scheme);
std::optional<Scheme> parse_scheme(const std::string& name);

struct BaselineResult {
  Scheme scheme = Scheme::price_minimized;
  Feasibility status = Feasibility::infeasible;
  double price = 0.0;
  std::vector<double> energy;
  double pso_utility = 0.0;
  std::vector<double> lcs_load;
  std::vector<double> rcs_draw;
  std::vector<std::string> diagnosis;
  /// Random scheme only.
  std::uint64_t seed = 0;
  std::size_t attempts = 0;

  bool feasible() const noexcept { return status == Feasibility::feasible; }
};

/// Cheapest price at which every LCS receives at least its minimal demand,
/// provided the upper LCS bounds and RCS limits still hold there.
BaselineResult solve_price_minimized(const Scenario& scenario);

inline constexpr std::size_t kRandomAttemptCap = 10000;

/// Draws prices uniformly from [max(0, min threshold), max threshold] until
/// one satisfies every constraint, giving up after kRandomAttemptCap draws.
BaselineResult solve_random(const Scenario& scenario, std::uint64_t seed);

/// The proposed scheme in the same shape as the baselines.
BaselineResult solve_proposed(const Scenario& scenario);

BaselineResult solve_scheme(const Scenario& scenario, Scheme scheme,
                            std::uint64_t seed);

}  // namespace mesgame
