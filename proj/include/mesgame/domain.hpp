#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mesgame {

/// Raised for any malformed or physically invalid scenario input. `field()`
/// names the offending field (e.g. "lcs[L1].demand_min").
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& rule)
      : std::runtime_error(field + ": " + rule), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Resourceful charging station: energy source for the fleet.
struct Rcs {
  std::string id;
  double surplus_energy = 0.0;  // kWh
  double charge_power = 0.0;    // kW

  friend bool operator==(const Rcs&, const Rcs&) = default;
};

/// Coefficients of the quadratic loading revenue -(a*S - b)^2 + c of one LCS.
struct LoadingCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  friend bool operator==(const LoadingCoefficients&,
                         const LoadingCoefficients&) = default;
};

/// a = 5e-4 * D^U, b = a * D^U, c = b^2. Peak revenue c is reached at S = D^U.
LoadingCoefficients loading_coefficients(double demand_max);

/// Limited-capacity charging station: energy sink whose demand window the
/// operator must fill. The loading coefficients are derived on construction.
class Lcs {
 public:
  Lcs(std::string id, double demand_min, double demand_max,
      double discharge_power);

  const std::string& id() const noexcept { return id_; }
  double demand_min() const noexcept { return demand_min_; }
  double demand_max() const noexcept { return demand_max_; }
  double discharge_power() const noexcept { return discharge_power_; }
  const LoadingCoefficients& loading() const noexcept { return loading_; }

  friend bool operator==(const Lcs&, const Lcs&) = default;

 private:
  std::string id_;
  double demand_min_;
  double demand_max_;
  double discharge_power_;
  LoadingCoefficients loading_;
};

struct StationGroup {
  std::vector<Rcs> rcs;
  std::vector<Lcs> lcs;

  std::optional<std::size_t> find_rcs(const std::string& id) const;
  std::optional<std::size_t> find_lcs(const std::string& id) const;

  friend bool operator==(const StationGroup&, const StationGroup&) = default;
};

/// Cubic discharging-power degradation factor b1*P^3 + b2*P^2 + b3*P + b4.
struct DegradationCurve {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double beta4 = 0.0;
};

/// Evaluates the curve at discharge power `power`; throws ScenarioError when
/// the power or the resulting factor is not strictly positive.
double power_degradation_factor(const DegradationCurve& curve, double power);

/// One mobile energy storage (follower).
struct MesAgent {
  std::string id;
  std::string rcs_id;
  std::string lcs_id;
  double battery_capacity = 0.0;    // B_k, kWh
  double initial_soc = 0.0;         // e^I_k, kWh
  double time_weight = 0.0;         // alpha^T_k
  double degradation_weight = 0.0;  // alpha^D_k
  double dod_quadratic = 0.0;       // alpha_1
  double dod_linear = 0.0;          // alpha_2
  double power_degradation = 0.0;   // D_k

  /// Spare battery room B_k - e^I_k, the most the agent can ever deliver.
  double service_capacity() const noexcept {
    return battery_capacity - initial_soc;
  }

  friend bool operator==(const MesAgent&, const MesAgent&) = default;
};

/// Throws ScenarioError naming the first violated agent invariant.
void validate_agent(const MesAgent& agent);

struct Route {
  std::size_t rcs = 0;
  std::size_t lcs = 0;
};

/// Immutable, validated game instance for one time slot.
class Scenario {
 public:
  Scenario(StationGroup stations, std::vector<MesAgent> fleet,
           double loading_weight);

  const StationGroup& stations() const noexcept { return stations_; }
  const std::vector<MesAgent>& fleet() const noexcept { return fleet_; }
  std::size_t fleet_size() const noexcept { return fleet_.size(); }
  double loading_weight() const noexcept { return loading_weight_; }

  /// Resolved station indices for fleet member k.
  const Route& route(std::size_t k) const { return routes_.at(k); }
  double charge_power(std::size_t k) const;
  double discharge_power(std::size_t k) const;

  /// N_ij: number of fleet members travelling from RCS i to LCS j.
  std::size_t pair_count(std::size_t rcs, std::size_t lcs) const;

  /// Fleet-average service target: total LCS minimal demand over fleet size.
  double mean_service_target() const noexcept { return mean_service_target_; }

  double total_demand_min() const noexcept;

  Scenario with_loading_weight(double loading_weight) const;
  Scenario with_degradation_weight(double degradation_weight) const;

  /// Equality over the defining inputs; derived fields follow from them.
  friend bool operator==(const Scenario& lhs, const Scenario& rhs) {
    return lhs.stations_ == rhs.stations_ && lhs.fleet_ == rhs.fleet_ &&
           lhs.loading_weight_ == rhs.loading_weight_;
  }

 private:
  StationGroup stations_;
  std::vector<MesAgent> fleet_;
  double loading_weight_;
  std::vector<Route> routes_;
  std::vector<std::size_t> pair_counts_;  // row-major [rcs][lcs]
  double mean_service_target_ = 0.0;
};

struct PairCount {
  std::string rcs_id;
  std::string lcs_id;
  std::size_t count = 0;
};

/// Distribution parameters for a randomly drawn fleet. Defaults reproduce the
/// reference simulation setup.
struct FleetSpec {
  std::vector<PairCount> pairs;
  double capacity_mean = 14.0;
  double capacity_sd = 5.0;
  double battery_mean = 80.0;
  double battery_sd = 10.0;
  double time_weight = 30.0;
  double degradation_weight = 1e5;
  double dod_quadratic = 1.0;
  double dod_linear = -0.222;
  /// Fixed D_k. When unset, D_k comes from the scenario degradation curve
  /// evaluated at each agent's LCS discharge power.
  std::optional<double> power_degradation = 5.08e-4;
};

/// Draws one agent per unit of pair count, pairs in listed order. Battery
/// capacity B ~ N(battery_mean, battery_sd) resampled until B > 0; service
/// capacity c ~ N(capacity_mean, capacity_sd) resampled until 0 <= c <= B;
/// initial SoC = B - c. When the spec has no fixed D_k, `curve` is evaluated
/// at the discharge power of each agent's LCS looked up in `stations`.
std::vector<MesAgent> generate_fleet(
    const FleetSpec& spec, std::uint64_t seed,
    const std::optional<DegradationCurve>& curve = std::nullopt,
    const StationGroup* stations = nullptr);

}  // namespace mesgame
