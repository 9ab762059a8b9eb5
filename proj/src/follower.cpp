#include "mesgame/follower.hpp"

#include <algorithm>

namespace mesgame {

ServicePowers service_powers(const Scenario& scenario, std::size_t k) {
  return {scenario.charge_power(k), scenario.discharge_power(k)};
}

double service_time_cost(double energy, ServicePowers powers) {
  return energy / powers.charge + energy / powers.discharge;
}

double degradation_cost(const MesAgent& agent, double energy) {
  const double dod = energy / agent.battery_capacity;
  return agent.power_degradation *
         (agent.dod_quadratic * dod * dod + agent.dod_linear * dod);
}

double mes_utility(const MesAgent& agent, double energy, double price,
                   double mean_target, ServicePowers powers) {
  return price * energy + price * (energy - mean_target) -
         agent.time_weight * service_time_cost(energy, powers) -
         agent.degradation_weight * degradation_cost(agent, energy);
}

BestResponseProfile best_response_profile(const MesAgent& agent,
                                          ServicePowers powers,
                                          std::size_t index) {
  const double battery = agent.battery_capacity;
  const double wear = agent.degradation_weight * agent.power_degradation;
  const double time_rate =
      (powers.charge + powers.discharge) / (powers.charge * powers.discharge);

  BestResponseProfile profile;
  profile.index = index;
  profile.capacity = agent.service_capacity();
  profile.rejection_price =
      0.5 * (agent.time_weight * time_rate + wear * agent.dod_linear / battery);
  profile.saturation_price =
      profile.rejection_price +
      agent.dod_quadratic * wear * profile.capacity / (battery * battery);
  profile.slope = battery * battery / (agent.dod_quadratic * wear);
  profile.intercept = profile.slope * profile.rejection_price;
  return profile;
}

std::vector<BestResponseProfile> best_response_profiles(
    const Scenario& scenario) {
  std::vector<BestResponseProfile> profiles;
  profiles.reserve(scenario.fleet_size());
  for (std::size_t k = 0; k < scenario.fleet_size(); ++k)
    profiles.push_back(best_response_profile(
        scenario.fleet()[k], service_powers(scenario, k), k));
  return profiles;
}

ResponseBranch response_branch(const BestResponseProfile& profile,
                               double price) {
  if (price <= profile.rejection_price) return ResponseBranch::inactive;
  if (price >= profile.saturation_price) return ResponseBranch::saturated;
  return ResponseBranch::interior;
}

double best_response(const BestResponseProfile& profile, double price) {
  switch (response_branch(profile, price)) {
    case ResponseBranch::inactive:
      return 0.0;
    case ResponseBranch::saturated:
      return profile.capacity;
    case ResponseBranch::interior:
      break;
  }
  // Rounding can push the linear branch a hair outside [0, capacity].
  return std::clamp(profile.slope * price - profile.intercept, 0.0,
                    profile.capacity);
}

std::vector<double> best_responses(
    const std::vector<BestResponseProfile>& profiles, double price) {
  std::vector<double> energies;
  energies.reserve(profiles.size());
  for (const auto& profile : profiles)
    energies.push_back(best_response(profile, price));
  return energies;
}

bool participates(const MesAgent& agent, const BestResponseProfile& profile,
                  double price, double mean_target, ServicePowers powers) {
  return mes_utility(agent, best_response(profile, price), price, mean_target,
                     powers) > 0.0;
}

}  // namespace mesgame
