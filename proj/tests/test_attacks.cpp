#include <cmath>
#include <limits>
#include <stdexcept>
#include <random>

#include <doctest.h>

#include "jamsim/attacks.hpp"

using namespace jamsim;

namespace {
const ChannelParams kChannel{1.0, 3.0, 0.4};
}

TEST_SUITE("attacks") {

TEST_CASE("sleep-jam parameter validation") {
  CHECK_NOTHROW(SleepJamParams(1.28, 0.9, 10.0, 0.5, 1.1));
  CHECK_THROWS_AS(SleepJamParams(0.0, 0.9, 10.0, 0.5, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(SleepJamParams(1.28, 1.0, 10.0, 0.5, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(SleepJamParams(1.28, 0.9, -1.0, 0.5, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(SleepJamParams(1.28, 0.9, 10.0, 0.0, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(SleepJamParams(1.28, 0.9, 10.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("inverse failure probability brackets and refines") {
  const double target = 0.5;
  const double v = inverse_failure_probability(target, kChannel);
  CHECK(failure_probability(v, kChannel) == doctest::Approx(target).epsilon(1e-9));
  CHECK_THROWS_AS(inverse_failure_probability(0.001, kChannel), std::invalid_argument);
  CHECK_THROWS_AS(inverse_failure_probability(1.0, kChannel), std::invalid_argument);
}

TEST_CASE("reference sleep-jam construction") {
  const SleepJamParams params(1.28, 0.9, 10.0, 0.5, 1.1);
  const SleepJamStrategy s = sleep_jam_strategy(params, kChannel);

  CHECK(s.tau2 == 32);  // floor(log_1.1(20)) + 1
  // cross-check the inverse: p(vstar - 1) must equal rho^(1/tau2)
  const double per_step = std::pow(0.9, 1.0 / 32.0);
  CHECK(std::fabs(failure_probability(s.vstar - 1.0, kChannel) - per_step) <= 1e-10);
  CHECK(s.vstar == doctest::Approx(176755.97594005265).epsilon(1e-6));
  CHECK(failure_probability(s.vstar, kChannel) > per_step);

  // schedule shape: zero, burst, zero
  CHECK(s.strategy.power_at(0) == 0.0);
  CHECK(s.strategy.power_at(s.tau1 - 1) == 0.0);
  CHECK(s.strategy.power_at(s.tau1) == s.vstar);
  CHECK(s.strategy.power_at(s.tau1 + s.tau2 - 1) == s.vstar);
  CHECK(s.strategy.power_at(s.tau1 + s.tau2) == 0.0);

  const auto& budget = s.strategy.declared_budget();
  REQUIRE(budget.has_value());
  CHECK(budget->kappa == 0.0);
  CHECK(budget->rate == 1.28);
  CHECK(budget->assumption1);
}

TEST_CASE("tau2 clamps to one when the target is below the disturbance") {
  const SleepJamStrategy s = sleep_jam_strategy(SleepJamParams(5.0, 0.5, 0.3, 0.5, 1.1), kChannel);
  CHECK(s.tau2 == 1);
}

TEST_CASE("noise floor above the requirement is rejected") {
  // tau2 = 1, so the per-step target is rho itself, below p(0) ~ 0.00617.
  CHECK_THROWS_WITH_AS(
      sleep_jam_strategy(SleepJamParams(5.0, 0.005, 0.3, 0.5, 1.1), kChannel),
      "target probability unreachable: channel noise floor exceeds requirement",
      std::invalid_argument);
}

TEST_CASE("randomized sleep-jam strategies satisfy the declared budget") {
  std::mt19937 gen(20250810);
  std::uniform_real_distribution<double> vbar_dist(0.5, 50.0);
  std::uniform_real_distribution<double> rho_dist(0.1, 0.9);
  std::uniform_real_distribution<double> ratio_dist(0.2, 50.0);
  std::uniform_real_distribution<double> wstar_dist(0.1, 2.0);
  std::uniform_real_distribution<double> a_dist(1.2, 3.0);

  int tested = 0;
  while (tested < 100) {
    const double wstar = wstar_dist(gen);
    const SleepJamParams params(vbar_dist(gen), rho_dist(gen), ratio_dist(gen) * wstar, wstar,
                                a_dist(gen));
    const SleepJamStrategy s = sleep_jam_strategy(params, kChannel);
    // the proof's own algebra at the burst end
    CHECK(s.vstar * static_cast<double>(s.tau2) <=
          params.vbar * static_cast<double>(s.tau1 + s.tau2) * (1.0 + 1e-12));
    CHECK(failure_probability(s.vstar, kChannel) >
          std::pow(params.rho, 1.0 / static_cast<double>(s.tau2)));
    if (s.tau1 + s.tau2 > 50000) continue;  // keep the materialized check cheap
    const auto trace = s.strategy.trace(s.tau1 + s.tau2);
    CHECK(verify_assumption1(trace, 0.0, params.vbar).pass);
    ++tested;
  }
}

TEST_CASE("constant strategy budgets") {
  const AttackStrategy s = constant_strategy(3.0);
  CHECK(s.power_at(0) == 3.0);
  CHECK(s.power_at(1'000'000) == 3.0);
  const auto trace = s.trace(500);
  CHECK(verify_assumption2(trace, 0.0, 3.0).pass);
  const BudgetCheck check = verify_assumption1(trace, 0.0, 2.9);
  CHECK(!check.pass);
  CHECK(check.t2 == 1);

  const auto quiet = constant_strategy(0.0).trace(100);
  CHECK(verify_assumption2(quiet, 0.0, 0.0).pass);
  CHECK(failure_probability(0.0, kChannel) > 0.0);  // failures persist without attack
}

TEST_CASE("explicit bursts and periodic repetition") {
  const AttackStrategy simple = explicit_strategy(0, 5, 7.0);
  for (int t = 0; t < 5; ++t) CHECK(simple.power_at(t) == 7.0);
  CHECK(simple.power_at(5) == 0.0);
  CHECK(simple.power_at(50) == 0.0);

  const AttackStrategy top = explicit_strategy(960, 40, 32.0);
  double total = 0.0;
  for (double v : top.trace(1000)) total += v;
  CHECK(total == doctest::Approx(32.0 * 40.0));

  const AttackStrategy periodic = explicit_strategy(2, 3, 1.5, 10);
  CHECK(periodic.power_at(2) == 1.5);
  CHECK(periodic.power_at(12) == 1.5);
  CHECK(periodic.power_at(15) == 0.0);
  double period_total = 0.0;
  for (double v : periodic.trace(10)) period_total += v;
  CHECK(period_total == doctest::Approx(1.5 * 3.0));

  CHECK_THROWS_AS(explicit_strategy(2, 3, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(explicit_strategy(-1, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(explicit_strategy(0, 0, 1.0), std::invalid_argument);
}

}  // TEST_SUITE
