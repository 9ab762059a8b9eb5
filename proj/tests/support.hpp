#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "mesgame/domain.hpp"
#include "mesgame/follower.hpp"
#include "mesgame/scenario_io.hpp"

namespace mesgame::testing {

inline std::string scenario_path(const std::string& name) {
  return std::string(MESGAME_SCENARIO_DIR) + "/" + name;
}

/// Table-1 setup with the fleet drawn under `seed`.
inline Scenario table1(std::uint64_t seed) {
  return materialize(read_scenario_document(scenario_path("table1.scn")), seed);
}

/// Table-1 follower used by the worked examples: B = 80, capacity 14.
inline MesAgent table1_agent() {
  MesAgent a;
  a.id = "M1";
  a.rcs_id = "R1";
  a.lcs_id = "L1";
  a.battery_capacity = 80.0;
  a.initial_soc = 66.0;
  a.time_weight = 30.0;
  a.degradation_weight = 1e5;
  a.dod_quadratic = 1.0;
  a.dod_linear = -0.222;
  a.power_degradation = 5.08e-4;
  return a;
}

inline constexpr ServicePowers kTable1Powers{90.0, 60.0};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Agent with every coefficient drawn over a wide but physical range.
inline MesAgent random_agent(std::mt19937_64& rng, std::size_t n = 0) {
  MesAgent a;
  a.id = "M" + std::to_string(n + 1);
  a.battery_capacity = uniform(rng, 40.0, 120.0);
  a.initial_soc = a.battery_capacity - uniform(rng, 1.0, 0.5 * a.battery_capacity);
  a.time_weight = uniform(rng, 5.0, 60.0);
  a.degradation_weight = uniform(rng, 2e4, 2e5);
  a.dod_quadratic = uniform(rng, 0.5, 2.0);
  a.dod_linear = uniform(rng, -0.5, 0.3);
  a.power_degradation = uniform(rng, 2e-4, 1e-3);
  return a;
}

inline ServicePowers random_powers(std::mt19937_64& rng) {
  return {uniform(rng, 20.0, 150.0), uniform(rng, 20.0, 150.0)};
}

/// 2 RCS, 2 LCS and 1..max_fleet agents. Demand windows and surpluses are
/// scaled to the capacities on each station so that most instances are
/// feasible and some constraints bind.
inline Scenario random_small_scenario(std::uint64_t seed,
                                      std::size_t max_fleet = 8) {
  std::mt19937_64 rng(seed);
  const auto k = std::uniform_int_distribution<std::size_t>(1, max_fleet)(rng);
  std::vector<MesAgent> fleet;
  double cap_rcs[2] = {0, 0};
  double cap_lcs[2] = {0, 0};
  for (std::size_t n = 0; n < k; ++n) {
    auto a = random_agent(rng, n);
    const int i = std::uniform_int_distribution<int>(0, 1)(rng);
    const int j = std::uniform_int_distribution<int>(0, 1)(rng);
    a.rcs_id = i == 0 ? "R1" : "R2";
    a.lcs_id = j == 0 ? "L1" : "L2";
    cap_rcs[i] += a.service_capacity();
    cap_lcs[j] += a.service_capacity();
    fleet.push_back(a);
  }
  StationGroup st;
  for (int i = 0; i < 2; ++i)
    st.rcs.push_back({i == 0 ? "R1" : "R2",
                      uniform(rng, 0.6, 1.4) * cap_rcs[i],
                      uniform(rng, 30.0, 120.0)});
  for (int j = 0; j < 2; ++j) {
    const double lo = uniform(rng, 0.0, 0.6) * cap_lcs[j];
    const double hi = lo + uniform(rng, 0.2, 1.0) * cap_lcs[j] + 1.0;
    st.lcs.emplace_back(j == 0 ? "L1" : "L2", lo, hi, uniform(rng, 30.0, 120.0));
  }
  return Scenario(std::move(st), std::move(fleet), uniform(rng, 0.1, 1.0));
}

}  // namespace mesgame::testing
