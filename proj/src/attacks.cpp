#include "jamsim/attacks.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jamsim {

SleepJamParams::SleepJamParams(double vbar_in, double rho_in, double z_in, double wstar_in,
                               double a_in)
    : vbar(vbar_in), rho(rho_in), z(z_in), wstar(wstar_in), a_scalar(a_in) {
  if (!(std::isfinite(vbar) && vbar > 0.0))
    throw std::invalid_argument("sleep_jam: vbar must be positive");
  if (!(std::isfinite(rho) && rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("sleep_jam: rho must lie in (0,1)");
  if (!(std::isfinite(z) && z > 0.0)) throw std::invalid_argument("sleep_jam: z must be positive");
  if (!(std::isfinite(wstar) && wstar > 0.0))
    throw std::invalid_argument("sleep_jam: wstar must be positive");
  if (!(std::isfinite(a_scalar) && a_scalar > 1.0))
    throw std::invalid_argument("sleep_jam: a_scalar must exceed 1");
}

double inverse_failure_probability(double target, const ChannelParams& channel) {
  const double p0 = failure_probability(0.0, channel);
  if (!(target > p0))
    throw std::invalid_argument(
        "target probability unreachable: channel noise floor exceeds requirement");
  if (!(target < 1.0 - 1e-15))
    throw std::invalid_argument("inverse_failure_probability: target saturates p");

  double hi = 1.0;
  while (failure_probability(hi, channel) <= target) {
    hi *= 2.0;
    if (!std::isfinite(hi))
      throw std::runtime_error("inverse_failure_probability: bracketing diverged");
  }
  double lo = 0.0;
  // p is continuous and strictly increasing, so plain bisection suffices.
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (failure_probability(mid, channel) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

SleepJamStrategy sleep_jam_strategy(const SleepJamParams& params, const ChannelParams& channel) {
  const double log_ratio =
      std::log(params.z / params.wstar) / std::log(params.a_scalar);
  const auto tau2 =
      static_cast<std::int64_t>(std::floor(std::max(log_ratio, 0.0))) + 1;

  const double per_step = std::pow(params.rho, 1.0 / static_cast<double>(tau2));
  if (per_step >= 1.0 - 1e-15)
    throw std::invalid_argument("sleep_jam: rho^(1/tau2) saturates the failure probability");

  const double vstar = inverse_failure_probability(per_step, channel) + 1.0;
  const auto tau1 = static_cast<std::int64_t>(std::floor(
                        std::max(vstar - params.vbar, 0.0) *
                        static_cast<double>(tau2) / params.vbar)) +
                    1;

  DeclaredBudget budget;
  budget.kappa = 0.0;
  budget.rate = params.vbar;
  budget.assumption1 = true;

  SleepJamStrategy out;
  out.tau1 = tau1;
  out.tau2 = tau2;
  out.vstar = vstar;
  out.strategy = AttackStrategy::from_function(
      [tau1, tau2, vstar](std::int64_t t) {
        return (t >= tau1 && t < tau1 + tau2) ? vstar : 0.0;
      },
      budget);
  return out;
}

AttackStrategy constant_strategy(double vstar) {
  if (std::isnan(vstar) || vstar < 0.0)
    throw std::invalid_argument("constant_strategy: vstar must be nonnegative");
  DeclaredBudget budget;
  budget.kappa = 0.0;
  budget.rate = vstar;
  budget.assumption1 = true;
  budget.assumption2 = true;
  return AttackStrategy::from_function([vstar](std::int64_t) { return vstar; }, budget);
}

AttackStrategy explicit_strategy(std::int64_t tau1, std::int64_t tau2, double vstar,
                                 std::optional<std::int64_t> period) {
  if (tau1 < 0) throw std::invalid_argument("explicit_strategy: tau1 must be nonnegative");
  if (tau2 < 1) throw std::invalid_argument("explicit_strategy: tau2 must be positive");
  if (std::isnan(vstar) || vstar < 0.0)
    throw std::invalid_argument("explicit_strategy: vstar must be nonnegative");
  if (period && *period < tau1 + tau2)
    throw std::invalid_argument("explicit_strategy: period " + std::to_string(*period) +
                                " shorter than tau1+tau2 = " + std::to_string(tau1 + tau2));
  return AttackStrategy::from_function([tau1, tau2, vstar, period](std::int64_t t) {
    const std::int64_t phase = period ? t % *period : t;
    return (phase >= tau1 && phase < tau1 + tau2) ? vstar : 0.0;
  });
}

}  // namespace jamsim
