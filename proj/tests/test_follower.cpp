#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mesgame/follower.hpp"
#include "mesgame/verify.hpp"
#include "support.hpp"

using namespace mesgame;
using testing::kTable1Powers;

TEST_SUITE("follower") {

TEST_CASE("service time") {
  CHECK(service_time_cost(0.0, kTable1Powers) == 0.0);
  CHECK(service_time_cost(90.0, kTable1Powers) == doctest::Approx(2.5));
  CHECK(service_time_cost(14.0, {14.0, 14.0}) == doctest::Approx(2.0));
}

TEST_CASE("degradation cost") {
  auto agent = testing::table1_agent();
  CHECK(degradation_cost(agent, 0.0) == 0.0);
  // 5.08e-4 * (1 - 0.222)
  CHECK(degradation_cost(agent, 80.0) == doctest::Approx(3.95224e-4).epsilon(1e-12));
  agent.dod_linear = 0.0;
  CHECK(degradation_cost(agent, 40.0) ==
        doctest::Approx(agent.power_degradation / 4).epsilon(1e-14));
}

TEST_CASE("mes utility") {
  const auto agent = testing::table1_agent();
  CHECK(mes_utility(agent, 0.0, 0.7, 10.0, kTable1Powers) ==
        doctest::Approx(-7.0));
  CHECK(mes_utility(agent, 0.0, 0.0, 0.0, kTable1Powers) == 0.0);

  // Term-by-term recomputation at p = 0.5, e = 14, target 10.
  const double p = 0.5, e = 14.0, target = 10.0;
  const double reward = p * e;
  const double motivation = p * (e - target);
  const double time = 30.0 * (e / 90.0 + e / 60.0);
  const double wear = 1e5 * 5.08e-4 * (e * e / 6400.0 - 0.222 * e / 80.0);
  const double expected = reward + motivation - time - wear;
  CHECK(expected == doctest::Approx(-2.2488367).epsilon(1e-7));
  CHECK(mes_utility(agent, e, p, target, kTable1Powers) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("table-1 thresholds") {
  const auto agent = testing::table1_agent();
  const auto prof = best_response_profile(agent, kTable1Powers);
  // 0.5 * (30 * 150/5400 + 1e5 * -0.222 * 5.08e-4 / 80)
  CHECK(prof.rejection_price == doctest::Approx(0.346180).epsilon(1e-5));
  // + 1e5 * 5.08e-4 * 14 / 6400
  CHECK(prof.saturation_price == doctest::Approx(0.457305).epsilon(1e-5));
  CHECK(prof.slope == doctest::Approx(6400.0 / 50.8));
  CHECK(prof.intercept == doctest::Approx(prof.slope * prof.rejection_price));

  // The e-grid argmax switches branches right at the thresholds.
  verify::GridSpec grid;
  grid.energy_step_fraction = 1e-4;
  const double eps = 1e-6;
  CHECK(verify::brute_best_response(agent, prof.rejection_price - eps, 10.0,
                                    kTable1Powers, grid) == 0.0);
  CHECK(verify::brute_best_response(agent, prof.rejection_price + 1e-3, 10.0,
                                    kTable1Powers, grid) > 0.0);
  CHECK(verify::brute_best_response(agent, prof.saturation_price + eps, 10.0,
                                    kTable1Powers, grid) ==
        doctest::Approx(14.0));
  CHECK(verify::brute_best_response(agent, prof.saturation_price - 1e-3, 10.0,
                                    kTable1Powers, grid) < 14.0);
}

TEST_CASE("rejection price is linear in the time weight without linear wear") {
  auto agent = testing::table1_agent();
  agent.dod_linear = 0.0;
  const auto base = best_response_profile(agent, kTable1Powers);
  agent.time_weight *= 2.0;
  const auto doubled = best_response_profile(agent, kTable1Powers);
  CHECK(doubled.rejection_price == doctest::Approx(2.0 * base.rejection_price).epsilon(1e-15));
}

TEST_CASE("zero capacity never serves") {
  auto agent = testing::table1_agent();
  agent.initial_soc = agent.battery_capacity;
  const auto prof = best_response_profile(agent, kTable1Powers);
  CHECK(prof.rejection_price == prof.saturation_price);
  for (const double p : {0.0, 0.3, prof.rejection_price, 1.0, 100.0})
    CHECK(best_response(prof, p) == 0.0);
}

TEST_CASE("best response branches") {
  const auto prof = best_response_profile(testing::table1_agent(), kTable1Powers);
  CHECK(best_response(prof, prof.rejection_price) == 0.0);
  CHECK(response_branch(prof, prof.rejection_price) == ResponseBranch::inactive);
  CHECK(best_response(prof, 0.5 * (prof.rejection_price + prof.saturation_price)) ==
        doctest::Approx(7.0).epsilon(1e-12));
  CHECK(best_response(prof, prof.saturation_price) == 14.0);
  CHECK(response_branch(prof, prof.saturation_price) == ResponseBranch::saturated);
  CHECK(best_response(prof, prof.saturation_price + 1.0) == 14.0);
  CHECK(best_response(prof, 0.0) == 0.0);
}

TEST_CASE("threshold endpoints hit 0 and full capacity") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 500; ++n) {
    const auto agent = testing::random_agent(rng);
    const auto prof = best_response_profile(agent, testing::random_powers(rng));
    CHECK(prof.rejection_price < prof.saturation_price);
    CHECK(prof.slope > 0.0);
    CHECK(std::abs(prof.slope * prof.rejection_price - prof.intercept) <= 1e-9);
    CHECK(std::abs(prof.slope * prof.saturation_price - prof.intercept -
                   agent.service_capacity()) <= 1e-9);
  }
}

TEST_CASE("negative rejection price keeps the raw threshold") {
  auto agent = testing::table1_agent();
  agent.dod_linear = -5.0;  // strong linear wear credit
  const auto prof = best_response_profile(agent, kTable1Powers);
  REQUIRE(prof.rejection_price < 0.0);
  const double e0 = best_response(prof, 0.0);
  CHECK(e0 > 0.0);
  CHECK(e0 == doctest::Approx(verify::brute_best_response(agent, 0.0, 0.0,
                                                          kTable1Powers))
                  .epsilon(2e-3));
}

TEST_CASE("participation") {
  const auto agent = testing::table1_agent();
  const auto prof = best_response_profile(agent, kTable1Powers);
  CHECK_FALSE(participates(agent, prof, prof.rejection_price, 10.0, kTable1Powers));
  CHECK_FALSE(participates(agent, prof, 0.1, 10.0, kTable1Powers));
  CHECK_FALSE(participates(agent, prof, 0.0, 10.0, kTable1Powers));
  CHECK(participates(agent, prof, prof.rejection_price + 1e-3, 0.0, kTable1Powers));
  CHECK(verify::brute_best_response(agent, prof.rejection_price + 1e-3, 0.0,
                                    kTable1Powers) > 0.0);
  const double high = 10.0 * prof.saturation_price;
  CHECK(participates(agent, prof, high, 10.0, kTable1Powers));
  CHECK(mes_utility(agent, 14.0, high, 10.0, kTable1Powers) > 0.0);
}

TEST_CASE("utility is concave along any equally spaced triple") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 2000; ++n) {
    const auto agent = testing::random_agent(rng);
    const auto powers = testing::random_powers(rng);
    const double p = testing::uniform(rng, 0.0, 3.0);
    const double target = testing::uniform(rng, 0.0, 20.0);
    const double cap = agent.service_capacity();
    const double e = testing::uniform(rng, 0.0, cap);
    const double h = testing::uniform(rng, 0.0, std::min(e, cap - e));
    const double mid = mes_utility(agent, e, p, target, powers);
    const double ends = 0.5 * (mes_utility(agent, e - h, p, target, powers) +
                               mes_utility(agent, e + h, p, target, powers));
    CHECK(mid >= ends - 1e-9 * (1.0 + std::abs(mid)));
  }
}

TEST_CASE("closed form matches the energy-grid argmax") {
  std::mt19937_64 rng(31);
  verify::GridSpec grid;  // step = 1e-3 of capacity
  for (int n = 0; n < 1000; ++n) {
    const auto agent = testing::random_agent(rng);
    const auto powers = testing::random_powers(rng);
    const auto prof = best_response_profile(agent, powers);
    const double p = testing::uniform(rng, 0.0, 1.3 * prof.saturation_price);
    const double target = testing::uniform(rng, 0.0, 20.0);
    const double step = grid.energy_step_fraction * agent.service_capacity();
    const double brute =
        verify::brute_best_response(agent, p, target, powers, grid);
    CHECK(std::abs(best_response(prof, p) - brute) <= 2.0 * step);
  }
}

TEST_CASE("best response is monotone and Lipschitz in price") {
  std::mt19937_64 rng(41);
  for (int n = 0; n < 300; ++n) {
    const auto prof = best_response_profile(testing::random_agent(rng),
                                            testing::random_powers(rng));
    const double span = 1.5 * std::max(prof.saturation_price, 0.1);
    double prev = best_response(prof, 0.0);
    double prev_p = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double p = span * i / 200.0;
      const double e = best_response(prof, p);
      CHECK(e >= prev);
      if (prev_p > prof.rejection_price && p < prof.saturation_price)
        CHECK(e > prev);
      CHECK(e - prev <= prof.slope * (p - prev_p) * (1 + 1e-12) + 1e-12);
      prev = e;
      prev_p = p;
    }
  }
}

TEST_CASE("grid utility is unimodal so the argmax is unique") {
  std::mt19937_64 rng(51);
  for (int n = 0; n < 200; ++n) {
    const auto agent = testing::random_agent(rng);
    const auto powers = testing::random_powers(rng);
    const double p = testing::uniform(rng, 0.0, 1.5);
    const double cap = agent.service_capacity();
    int sign_changes = 0;
    double prev = mes_utility(agent, 0.0, p, 5.0, powers);
    int prev_dir = 1;
    for (int i = 1; i <= 1000; ++i) {
      const double u = mes_utility(agent, cap * i / 1000.0, p, 5.0, powers);
      const int dir = u > prev ? 1 : (u < prev ? -1 : prev_dir);
      if (dir != prev_dir) ++sign_changes;
      prev_dir = dir;
      prev = u;
    }
    CHECK(sign_changes <= 1);
  }
}

}  // TEST_SUITE
