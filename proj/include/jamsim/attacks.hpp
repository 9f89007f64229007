#pragma once

#include <cstdint>
#include <optional>

#include "jamsim/channel.hpp"
#include "jamsim/model.hpp"

namespace jamsim {

/// Inputs for the sleep-then-jam construction on a scalar plant with
/// open-loop gain a_scalar > 1 and constant disturbance wstar > 0: the
/// attacker sleeps tau1 steps, then jams tau2 steps at power vstar, driving
/// the state past z with probability above rho while holding the long-run
/// average power under vbar.
struct SleepJamParams {
  double vbar;      // average-power budget rate
  double rho;       // target exceedance probability, in (0,1)
  double z;         // state level to exceed
  double wstar;     // constant disturbance magnitude
  double a_scalar;  // scalar open-loop gain, > 1

  SleepJamParams(double vbar_in, double rho_in, double z_in, double wstar_in, double a_in);
};

struct SleepJamStrategy {
  AttackStrategy strategy;
  std::int64_t tau1 = 0;
  std::int64_t tau2 = 0;
  double vstar = 0.0;
};

/// Builds the sleep-then-jam schedule:
///   tau2  = floor(max(log_a(z/wstar), 0)) + 1
///   vstar = p^{-1}(rho^(1/tau2)) + 1
///   tau1  = floor(max(vstar - vbar, 0) * tau2 / vbar) + 1
/// The declared budget is (kappa = 0, rate = vbar) for the from-zero
/// assumption. Throws when rho^(1/tau2) falls outside the range of p.
SleepJamStrategy sleep_jam_strategy(const SleepJamParams& params, const ChannelParams& channel);

/// v(t) = vstar for all t; declares budget (0, vstar) under both
/// assumptions.
AttackStrategy constant_strategy(double vstar);

/// v(t) = vstar on [tau1, tau1+tau2), zero elsewhere; with a period the
/// pattern repeats every `period` steps.
AttackStrategy explicit_strategy(std::int64_t tau1, std::int64_t tau2, double vstar,
                                 std::optional<std::int64_t> period = {});

/// Inverse of the failure probability by bisection: the v >= 0 with
/// p(v) = target, to 1e-10. Throws if target < p(0) or target >= 1.
double inverse_failure_probability(double target, const ChannelParams& channel);

}  // namespace jamsim
