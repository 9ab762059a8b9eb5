#include "mesgame/domain.hpp"

#include <cmath>
#include <random>

namespace mesgame {

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string lcs_field(const std::string& id, const char* name) {
  return "lcs[" + id + "]." + name;
}

std::string fleet_field(const std::string& id, const char* name) {
  return "fleet[" + id + "]." + name;
}

}  // namespace

LoadingCoefficients loading_coefficients(double demand_max) {
  LoadingCoefficients coeffs;
  coeffs.a = 5e-4 * demand_max;
  coeffs.b = coeffs.a * demand_max;
  coeffs.c = coeffs.b * coeffs.b;
  return coeffs;
}

Lcs::Lcs(std::string id, double demand_min, double demand_max,
         double discharge_power)
    : id_(std::move(id)),
      demand_min_(demand_min),
      demand_max_(demand_max),
      discharge_power_(discharge_power),
      loading_(loading_coefficients(demand_max)) {
  if (!finite(demand_min_) || demand_min_ < 0.0)
    throw ScenarioError(lcs_field(id_, "demand_min"), "must be >= 0");
  if (!finite(demand_max_) || demand_max_ < demand_min_)
    throw ScenarioError(lcs_field(id_, "demand_max"),
                        "must be >= demand_min");
  if (!finite(discharge_power_) || discharge_power_ <= 0.0)
    throw ScenarioError(lcs_field(id_, "discharge_power"), "must be > 0");
}

std::optional<std::size_t> StationGroup::find_rcs(const std::string& id) const {
  for (std::size_t i = 0; i < rcs.size(); ++i)
    if (rcs[i].id == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> StationGroup::find_lcs(const std::string& id) const {
  for (std::size_t j = 0; j < lcs.size(); ++j)
    if (lcs[j].id() == id) return j;
  return std::nullopt;
}

double power_degradation_factor(const DegradationCurve& curve, double power) {
  if (!finite(power) || power <= 0.0)
    throw ScenarioError("degradation.power", "discharge power must be > 0");
  // Horner form of b1 P^3 + b2 P^2 + b3 P + b4.
  const double value =
      ((curve.beta1 * power + curve.beta2) * power + curve.beta3) * power +
      curve.beta4;
  if (!finite(value) || value <= 0.0)
    throw ScenarioError("degradation.beta",
                        "curve must be > 0 at every LCS discharge power");
  return value;
}

void validate_agent(const MesAgent& agent) {
  const auto& id = agent.id;
  if (!finite(agent.battery_capacity) || agent.battery_capacity <= 0.0)
    throw ScenarioError(fleet_field(id, "battery_capacity"), "must be > 0");
  if (!finite(agent.initial_soc) || agent.initial_soc < 0.0 ||
      agent.initial_soc > agent.battery_capacity)
    throw ScenarioError(fleet_field(id, "initial_soc"),
                        "must lie in [0, battery_capacity]");
  if (!finite(agent.time_weight) || agent.time_weight <= 0.0)
    throw ScenarioError(fleet_field(id, "time_weight"), "must be > 0");
  if (!finite(agent.degradation_weight) || agent.degradation_weight <= 0.0)
    throw ScenarioError(fleet_field(id, "degradation_weight"), "must be > 0");
  if (!finite(agent.dod_quadratic) || agent.dod_quadratic <= 0.0)
    throw ScenarioError(fleet_field(id, "dod_quadratic"), "must be > 0");
  if (!finite(agent.dod_linear))
    throw ScenarioError(fleet_field(id, "dod_linear"), "must be finite");
  if (!finite(agent.power_degradation) || agent.power_degradation <= 0.0)
    throw ScenarioError(fleet_field(id, "power_degradation"), "must be > 0");
}

Scenario::Scenario(StationGroup stations, std::vector<MesAgent> fleet,
                   double loading_weight)
    : stations_(std::move(stations)),
      fleet_(std::move(fleet)),
      loading_weight_(loading_weight) {
  if (!finite(loading_weight_) || loading_weight_ < 0.0)
    throw ScenarioError("weights.loading_weight", "must be >= 0");
  if (stations_.rcs.empty())
    throw ScenarioError("rcs", "at least one RCS required");
  if (stations_.lcs.empty())
    throw ScenarioError("lcs", "at least one LCS required");
  for (const auto& r : stations_.rcs) {
    if (!finite(r.surplus_energy) || r.surplus_energy < 0.0)
      throw ScenarioError("rcs[" + r.id + "].surplus_energy", "must be >= 0");
    if (!finite(r.charge_power) || r.charge_power <= 0.0)
      throw ScenarioError("rcs[" + r.id + "].charge_power", "must be > 0");
  }
  for (std::size_t i = 0; i < stations_.rcs.size(); ++i)
    if (stations_.find_rcs(stations_.rcs[i].id) != i)
      throw ScenarioError("rcs[" + stations_.rcs[i].id + "].id", "duplicate id");
  for (std::size_t j = 0; j < stations_.lcs.size(); ++j)
    if (stations_.find_lcs(stations_.lcs[j].id()) != j)
      throw ScenarioError("lcs[" + stations_.lcs[j].id() + "].id",
                          "duplicate id");
  if (fleet_.empty())
    throw ScenarioError("fleet",
                        "fleet is empty; mean service target undefined");

  pair_counts_.assign(stations_.rcs.size() * stations_.lcs.size(), 0);
  routes_.reserve(fleet_.size());
  for (const auto& agent : fleet_) {
    validate_agent(agent);
    const auto i = stations_.find_rcs(agent.rcs_id);
    if (!i)
      throw ScenarioError(fleet_field(agent.id, "rcs"),
                          "unknown RCS '" + agent.rcs_id + "'");
    const auto j = stations_.find_lcs(agent.lcs_id);
    if (!j)
      throw ScenarioError(fleet_field(agent.id, "lcs"),
                          "unknown LCS '" + agent.lcs_id + "'");
    routes_.push_back({*i, *j});
    ++pair_counts_[*i * stations_.lcs.size() + *j];
  }
  mean_service_target_ =
      total_demand_min() / static_cast<double>(fleet_.size());
}

double Scenario::charge_power(std::size_t k) const {
  return stations_.rcs[route(k).rcs].charge_power;
}

double Scenario::discharge_power(std::size_t k) const {
  return stations_.lcs[route(k).lcs].discharge_power();
}

std::size_t Scenario::pair_count(std::size_t rcs, std::size_t lcs) const {
  return pair_counts_.at(rcs * stations_.lcs.size() + lcs);
}

double Scenario::total_demand_min() const noexcept {
  double total = 0.0;
  for (const auto& l : stations_.lcs) total += l.demand_min();
  return total;
}

Scenario Scenario::with_loading_weight(double loading_weight) const {
  return Scenario(stations_, fleet_, loading_weight);
}

Scenario Scenario::with_degradation_weight(double degradation_weight) const {
  auto fleet = fleet_;
  for (auto& agent : fleet) agent.degradation_weight = degradation_weight;
  return Scenario(stations_, std::move(fleet), loading_weight_);
}

namespace {

constexpr int kMaxResamples = 10000;

/// Draws from N(mean, sd) until `accept` holds. sd == 0 yields the mean.
template <typename Accept>
double draw_truncated(std::mt19937_64& rng, double mean, double sd,
                      Accept accept, const char* field) {
  if (sd == 0.0) {
    if (!accept(mean))
      throw ScenarioError(field, "degenerate distribution outside bounds");
    return mean;
  }
  std::normal_distribution<double> dist(mean, sd);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const double value = dist(rng);
    if (accept(value)) return value;
  }
  throw ScenarioError(field, "distribution mass lies outside the bounds");
}

}  // namespace

std::vector<MesAgent> generate_fleet(const FleetSpec& spec, std::uint64_t seed,
                                     const std::optional<DegradationCurve>& curve,
                                     const StationGroup* stations) {
  const auto check = [](double v, const char* field, bool strictly_positive) {
    if (!finite(v) || v < 0.0 || (strictly_positive && v == 0.0))
      throw ScenarioError(field, strictly_positive ? "must be > 0"
                                                   : "must be >= 0");
  };
  check(spec.capacity_mean, "fleet_spec.capacity_mean", false);
  check(spec.capacity_sd, "fleet_spec.capacity_sd", false);
  check(spec.battery_mean, "fleet_spec.battery_mean", false);
  check(spec.battery_sd, "fleet_spec.battery_sd", false);
  if (!spec.power_degradation && !curve)
    throw ScenarioError("fleet_spec.power_degradation",
                        "required when no degradation curve is given");
  if (!spec.power_degradation && !stations)
    throw ScenarioError("fleet_spec.power_degradation",
                        "curve evaluation needs the station group");

  std::mt19937_64 rng(seed);
  std::vector<MesAgent> fleet;
  std::size_t serial = 0;
  for (const auto& pair : spec.pairs) {
    double power_degradation = 0.0;
    if (spec.power_degradation) {
      power_degradation = *spec.power_degradation;
    } else {
      const auto j = stations->find_lcs(pair.lcs_id);
      if (!j)
        throw ScenarioError("fleet_spec.pair",
                            "unknown LCS '" + pair.lcs_id + "'");
      power_degradation = power_degradation_factor(
          *curve, stations->lcs[*j].discharge_power());
    }
    for (std::size_t n = 0; n < pair.count; ++n) {
      const double battery = draw_truncated(
          rng, spec.battery_mean, spec.battery_sd,
          [](double b) { return b > 0.0; }, "fleet_spec.battery_mean");
      const double capacity = draw_truncated(
          rng, spec.capacity_mean, spec.capacity_sd,
          [battery](double c) { return c >= 0.0 && c <= battery; },
          "fleet_spec.capacity_mean");
      MesAgent agent;
      agent.id = "M" + std::to_string(++serial);
      agent.rcs_id = pair.rcs_id;
      agent.lcs_id = pair.lcs_id;
      agent.battery_capacity = battery;
      agent.initial_soc = battery - capacity;
      agent.time_weight = spec.time_weight;
      agent.degradation_weight = spec.degradation_weight;
      agent.dod_quadratic = spec.dod_quadratic;
      agent.dod_linear = spec.dod_linear;
      agent.power_degradation = power_degradation;
      validate_agent(agent);
      fleet.push_back(std::move(agent));
    }
  }
  return fleet;
}

}  // namespace mesgame
