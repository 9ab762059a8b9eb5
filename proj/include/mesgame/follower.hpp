#pragma once

#include "mesgame/domain.hpp"

namespace mesgame {

/// Average charging power at the agent's RCS and discharging power at its LCS.
struct ServicePowers {
  double charge = 0.0;
  double discharge = 0.0;
};

ServicePowers service_powers(const Scenario& scenario, std::size_t k);

/// In-station time e/P_i + e/P_j, in hours.
double service_time_cost(double energy, ServicePowers powers);

/// Battery wear D_k * (alpha_1 (e/B)^2 + alpha_2 e/B).
double degradation_cost(const MesAgent& agent, double energy);

/// Follower payoff: service reward p*e, motivation reward p*(e - target),
/// minus weighted time and degradation costs.
double mes_utility(const MesAgent& agent, double energy, double price,
                   double mean_target, ServicePowers powers);

/// Closed-form best response of one agent, parameterised by its two
/// threshold prices. Between them the response is slope*p - intercept.
///
/// The thresholds are kept unclamped: a negative rejection price means the
/// agent already serves at p = 0. Clamping to the nonnegative price domain
/// happens when breakpoints are built.
struct BestResponseProfile {
  std::size_t index = 0;
  double rejection_price = 0.0;   // p^L_k
  double saturation_price = 0.0;  // p^U_k
  double slope = 0.0;             // y_k = B^2 / (alpha_1 alpha^D D_k)
  double intercept = 0.0;         // z_k = y_k p^L_k
  double capacity = 0.0;          // B_k - e^I_k
};

BestResponseProfile best_response_profile(const MesAgent& agent,
                                          ServicePowers powers,
                                          std::size_t index = 0);

std::vector<BestResponseProfile> best_response_profiles(
    const Scenario& scenario);

enum class ResponseBranch { inactive, interior, saturated };

/// Which branch of the best response applies at `price`. Ties go to the
/// closed outer branches: p <= p^L is inactive, p >= p^U is saturated.
ResponseBranch response_branch(const BestResponseProfile& profile,
                               double price);

double best_response(const BestResponseProfile& profile, double price);

std::vector<double> best_responses(
    const std::vector<BestResponseProfile>& profiles, double price);

/// Whether the agent earns strictly positive utility at its best response.
/// Diagnostic only; the equilibrium solve does not enforce it.
bool participates(const MesAgent& agent, const BestResponseProfile& profile,
                  double price, double mean_target, ServicePowers powers);

}  // namespace mesgame
