#include <cmath>
#include <limits>
#include <stdexcept>
#include <cstdlib>

#include <doctest.h>

#include "jamsim/presets.hpp"
#include "jamsim/sim.hpp"

using namespace jamsim;

namespace {

SimConfig reference_config() {
  return SimConfig{presets::reference_plant(),
                   presets::reference_channel(),
                   constant_strategy(1.0),
                   DisturbanceModel::none(),
                   {},
                   50,
                   4,
                   99,
                   {}};
}

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    const auto& s = a.steps[i];
    const auto& t = b.steps[i];
    if (s.t != t.t || s.x != t.x || s.v != t.v || s.l != t.l || s.xi != t.xi || s.w != t.w)
      return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("zero initial state stays at the origin without disturbance") {
  SimConfig cfg = reference_config();
  cfg.plant.x0 = {0.0, 0.0};
  cfg.strategy = presets::short_burst_attack();
  cfg.horizon = 200;
  const Trajectory traj = simulate_trajectory(cfg, 0);
  for (const auto& step : traj.steps) {
    CHECK(step.x[0] == 0.0);
    CHECK(step.x[1] == 0.0);
  }
}

TEST_CASE("forced failures reproduce the open-loop powers of A") {
  SimConfig cfg = reference_config();
  cfg.failure_override = 1;
  cfg.horizon = 12;
  const Trajectory traj = simulate_trajectory(cfg, 3);

  Vector x = cfg.plant.x0;
  for (const auto& step : traj.steps) {
    CHECK(step.x[0] == x[0]);
    CHECK(step.x[1] == x[1]);
    CHECK(step.l == 1);
    x = matvec(cfg.plant.A, x);
  }
}

TEST_CASE("forced successes follow the closed loop") {
  SimConfig cfg = reference_config();
  cfg.failure_override = 0;
  cfg.horizon = 12;
  const Trajectory traj = simulate_trajectory(cfg, 0);
  CHECK(replay_matches(cfg.plant, traj));
  // the closed loop is Schur, so the state contracts from x0 = [1,1]
  CHECK(norm2(traj.steps.back().x) < norm2(cfg.plant.x0));
}

TEST_CASE("identical seed and run index give bitwise-identical trajectories") {
  SimConfig cfg = reference_config();
  cfg.disturbance = DisturbanceModel::uniform_iid(0.5);
  const Trajectory a = simulate_trajectory(cfg, 7);
  const Trajectory b = simulate_trajectory(cfg, 7);
  CHECK(same_trajectory(a, b));
  const Trajectory c = simulate_trajectory(cfg, 8);
  CHECK(!same_trajectory(a, c));
}

TEST_CASE("recorded trajectories replay through the recursion") {
  SimConfig cfg = reference_config();
  cfg.disturbance = DisturbanceModel::uniform_iid(0.5);
  cfg.strategy = presets::short_burst_attack();
  cfg.horizon = 400;
  CHECK(replay_matches(cfg.plant, simulate_trajectory(cfg, 11)));
}

TEST_CASE("failure indicators do not depend on the disturbance stream") {
  SimConfig with = reference_config();
  with.disturbance = DisturbanceModel::uniform_iid(0.5);
  SimConfig without = reference_config();

  const Trajectory a = simulate_trajectory(with, 2);
  const Trajectory b = simulate_trajectory(without, 2);
  for (std::size_t i = 0; i < a.steps.size(); ++i) CHECK(a.steps[i].l == b.steps[i].l);
}

TEST_CASE("monte carlo series is deterministic across repeat evaluations and worker counts") {
  SimConfig cfg = reference_config();
  cfg.disturbance = DisturbanceModel::uniform_iid(0.5);
  cfg.n_runs = 300;
  cfg.horizon = 60;

  setenv("JAMSIM_THREADS", "3", 1);
  const MomentSeries a = monte_carlo_first_moment(cfg);
  setenv("JAMSIM_THREADS", "1", 1);
  const MomentSeries b = monte_carlo_first_moment(cfg);
  unsetenv("JAMSIM_THREADS");
  const MomentSeries c = monte_carlo_first_moment(cfg);

  CHECK(a.mean_norm == b.mean_norm);
  CHECK(a.std_err == b.std_err);
  CHECK(a.mean_norm == c.mean_norm);
}

TEST_CASE("single-step mean matches the two-outcome enumeration") {
  // scalar plant, constant attack, constant disturbance: E|x(1)| has an
  // exact two-outcome closed form.
  const double a = 1.1, abk = 0.5, wstar = 0.5, x0 = 1.0, v = 2.0;
  const PlantModel plant(Matrix{{a}}, Matrix{{1.0}}, Matrix{{abk - a}}, Vector{x0});
  const ChannelParams ch = presets::reference_channel();
  SimConfig cfg{plant, ch, constant_strategy(v), DisturbanceModel::constant(wstar),
                {},    2,  20000,                2027,
                {}};

  const MomentSeries series = monte_carlo_first_moment(cfg);
  const double p = failure_probability(v, ch);
  const double expected =
      p * std::fabs(a * x0 + wstar) + (1.0 - p) * std::fabs(abk * x0 + wstar);
  CHECK(std::fabs(series.mean_norm[1] - expected) <= 3.0 * series.std_err[1]);
  CHECK(series.std_err[1] > 0.0);
}

TEST_CASE("exceedance estimates") {
  const PlantModel plant(Matrix{{1.1}}, Matrix{{1.0}}, Matrix{{-0.6}}, Vector{1.0});
  const ChannelParams ch = presets::reference_channel();
  SimConfig cfg{plant, ch, constant_strategy(0.0), DisturbanceModel::constant(0.5),
                {},    40, 400,                    5,
                {}};

  SUBCASE("tau zero is deterministic") {
    CHECK(estimate_exceedance_probability(cfg, 0.5, 0).probability == 1.0);
    CHECK(estimate_exceedance_probability(cfg, 1.5, 0).probability == 0.0);
  }
  SUBCASE("negative level is always exceeded for positive states") {
    const ExceedanceEstimate est = estimate_exceedance_probability(cfg, -1.0, 20);
    CHECK(est.probability == 1.0);
    CHECK(est.wilson_low > 0.9);
  }
  SUBCASE("tau beyond the horizon is rejected") {
    CHECK_THROWS_AS(estimate_exceedance_probability(cfg, 1.0, 40), std::invalid_argument);
  }
}

TEST_CASE("countermeasure boost windows and counter resets") {
  // Force failures everywhere: with n_c = 2, t_c = 3 the transmission
  // power must cycle [nominal, nominal, boost, boost, boost].
  SimConfig cfg = reference_config();
  cfg.failure_override = 1;
  cfg.countermeasure = CountermeasureParams(6.0, 2, 3, cfg.channel.xi);
  cfg.horizon = 10;
  const Trajectory traj = simulate_trajectory(cfg, 0);
  const std::vector<double> expected{3.0, 3.0, 6.0, 6.0, 6.0, 3.0, 3.0, 6.0, 6.0, 6.0};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(traj.steps[i].xi == expected[i]);
}

TEST_CASE("boost timelines depend on nominal-power draws only") {
  // Failures are counted only at nominal power, so two runs differing just
  // in the boost magnitude trigger and end boosts at identical steps.
  SimConfig low = reference_config();
  low.strategy = presets::long_burst_attack();
  low.horizon = 1700;
  low.disturbance = DisturbanceModel::uniform_iid(0.5);
  low.countermeasure = CountermeasureParams(6.0, 2, 4, low.channel.xi);
  SimConfig high = low;
  high.countermeasure = CountermeasureParams(12.0, 2, 4, high.channel.xi);

  const Trajectory a = simulate_trajectory(low, 0);
  const Trajectory b = simulate_trajectory(high, 0);
  int boosted_steps = 0;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    const bool boost_a = a.steps[i].xi != low.channel.xi;
    const bool boost_b = b.steps[i].xi != high.channel.xi;
    CHECK(boost_a == boost_b);
    boosted_steps += boost_a ? 1 : 0;
  }
  CHECK(boosted_steps > 0);  // the burst must have tripped the countermeasure
}

TEST_CASE("countermeasure parameters validate") {
  CHECK_THROWS_AS(CountermeasureParams(3.0, 2, 3, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(CountermeasureParams(6.0, 0, 3, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(CountermeasureParams(6.0, 2, 0, 3.0), std::invalid_argument);
  SimConfig cfg = reference_config();
  cfg.countermeasure = CountermeasureParams(6.0, 2, 3, 5.0);  // mismatched nominal
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("boosted transmission lowers the failure probability") {
  const ChannelParams nominal = presets::reference_channel();
  const ChannelParams boosted(nominal.c, 6.0, nominal.sigma);
  CHECK(failure_probability(32.0, boosted) < failure_probability(32.0, nominal));
}

TEST_CASE("moment bound check refuses budget-violating attacks") {
  const PlantModel plant = presets::reference_plant();
  const NormContext ctx = presets::reference_norm_context();
  const PHatEnvelope env = presets::reference_envelope();
  const StabilityCertificate cert = bound_constants_thm1(plant, ctx, env, 0.0, 1.28);

  SimConfig cfg = reference_config();
  cfg.strategy = constant_strategy(2.0);  // above the declared rate 1.28
  cfg.disturbance = DisturbanceModel::uniform_iid(0.5);
  CHECK_THROWS_AS(moment_bound_check(cfg, cert, 0.5 * std::sqrt(2.0)), std::runtime_error);
}

TEST_CASE("moment bound check rejects configs outside the theory") {
  const PlantModel plant = presets::reference_plant();
  const NormContext ctx = presets::reference_norm_context();
  const PHatEnvelope env = presets::reference_envelope();

  SimConfig cfg = reference_config();
  cfg.strategy = constant_strategy(1.0);
  cfg.disturbance = DisturbanceModel::uniform_iid(0.5);

  // disturbance-free certificate against a disturbed config
  const StabilityCertificate prop1 = bound_constants_prop1(plant, ctx, env, 0.0, 1.28);
  CHECK_THROWS_AS(moment_bound_check(cfg, prop1, 0.0), std::invalid_argument);

  // certificate without constants
  const StabilityCertificate bare =
      check_condition(StabilityCondition::BoundedDisturbance, plant, ctx, env, 1.28);
  CHECK_THROWS_AS(moment_bound_check(cfg, bare, 0.7), std::invalid_argument);
}

TEST_CASE("trivial bound check with zero initial state passes") {
  const PlantModel plant(Matrix{{0.1, -1.0}, {1.1, 1.8}}, Matrix{{0.0}, {1.0}},
                         Matrix{{-0.9277, -1.2615}}, Vector{0.0, 0.0});
  const NormContext ctx = presets::reference_norm_context();
  const PHatEnvelope env = presets::reference_envelope();
  const StabilityCertificate cert = bound_constants_prop1(plant, ctx, env, 0.0, 1.28);

  SimConfig cfg{plant, presets::reference_channel(), constant_strategy(1.28),
                DisturbanceModel::none(), {}, 100, 200, 31, {}};
  const MomentBoundReport report = moment_bound_check(cfg, cert, 0.0);
  CHECK(report.pass);
  for (std::size_t t = 0; t < report.series.mean_norm.size(); ++t)
    CHECK(report.series.mean_norm[t] == 0.0);
}

TEST_CASE("disturbance-free mean stays under the certificate curve") {
  const PlantModel plant = presets::reference_plant();
  const NormContext ctx = presets::reference_norm_context();
  const PHatEnvelope env = presets::reference_envelope();
  const StabilityCertificate cert = bound_constants_prop1(plant, ctx, env, 0.0, 1.28);

  SimConfig cfg{plant, presets::reference_channel(), constant_strategy(1.28),
                DisturbanceModel::none(), {}, 150, 2000, 77, {}};
  const MomentBoundReport report = moment_bound_check(cfg, cert, 0.0);
  CHECK(report.pass);
  CHECK(report.first_violation == -1);
}

TEST_CASE("composed disturbance applies control noise only on successes") {
  SimConfig cfg = reference_config();
  cfg.disturbance = DisturbanceModel::composed(DisturbanceModel::none(),
                                               DisturbanceModel::constant(0.25));
  cfg.horizon = 30;
  const Trajectory traj = simulate_trajectory(cfg, 4);
  const Vector b_times = matvec(cfg.plant.B, Vector{0.25});
  for (const auto& step : traj.steps) {
    if (step.l == 1) {
      CHECK(step.w[0] == 0.0);
      CHECK(step.w[1] == 0.0);
    } else {
      CHECK(step.w[0] == b_times[0]);
      CHECK(step.w[1] == b_times[1]);
    }
  }
}

}  // TEST_SUITE
