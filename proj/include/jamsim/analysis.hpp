#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "jamsim/channel.hpp"
#include "jamsim/linalg.hpp"
#include "jamsim/model.hpp"

namespace jamsim {

/// A positive-definite P defining the vector norm ||x||_P = sqrt(x'Px),
/// with the tight Euclidean-equivalence constants
/// c1 ||y||_P <= ||y||_2 <= c2 ||y||_P.
struct NormContext {
  Matrix P;
  double c1 = 1.0;  // 1/sqrt(lambda_max(P))
  double c2 = 1.0;  // 1/sqrt(lambda_min(P))

  static NormContext from_p_matrix(Matrix p);
};

/// Matrix norm induced by ||.||_P: the largest singular value of
/// P^{1/2} M P^{-1/2}.
double p_induced_norm(const Matrix& m, const Matrix& p);

/// (c1, c2) with c1 = 1/sqrt(lambda_max(P)), c2 = 1/sqrt(lambda_min(P)).
std::pair<double, double> norm_equivalence_constants(const Matrix& p);

enum class StabilityCondition {
  FirstMomentNoDisturbance,  // (1-phat(v))||A+BK|| + phat(v)||A|| < 1
  AlmostSure,                // (1-phat(v))ln||A+BK|| + phat(v)ln||A|| < 0
  BoundedDisturbance,        // same combination as the first, at the window rate
  SecondMomentDisturbance,   // (1-phat(v))||A+BK||^2 + phat(v)||A||^2 < 1
};

const char* condition_name(StabilityCondition c);

/// Constants of the geometric first-moment bounds. mu_hat and gain grow
/// like ||A||^(T*-1), which overflows double for large kappa; the log
/// fields stay finite and are what bound evaluation uses. gain is the
/// additive disturbance coefficient (d_hat for the bounded-disturbance
/// bound, f_hat for the second-moment bound, 0 when there is none).
struct BoundConstants {
  double theta_hat = 0.0;  // decay rate, in (0,1)
  double mu_hat = 0.0;     // transient amplification (may be +inf)
  double gain = 0.0;       // d_hat or f_hat (may be +inf)
  double log_mu_hat = 0.0;
  double log_gain = 0.0;  // -inf when gain is 0
  std::int64_t t_star = 1;
  std::int64_t t_star_squared = 0;  // second-moment path only
  double kappa = 0.0;               // budget the constants were derived for
  double v = 0.0;
};

struct StabilityCertificate {
  StabilityCondition condition = StabilityCondition::FirstMomentNoDisturbance;
  bool holds = false;
  double lhs_value = 0.0;
  double zeta1 = 0.0;  // ||A||_P - ||A+BK||_P
  double zeta0 = 0.0;  // ||A+BK||_P
  std::optional<BoundConstants> constants;
};

/// Evaluates one stability condition at average interference power v.
StabilityCertificate check_condition(StabilityCondition kind, const PlantModel& plant,
                                     const NormContext& ctx, const PHatEnvelope& env, double v);

struct AdmissiblePower {
  double value = 0.0;
  bool never_stable = false;  // condition fails already at v = 0
  bool unbounded = false;     // condition still holds at the search cap
};

/// Largest v at which the condition holds, to 1e-4 absolute, by
/// exponential bracketing plus bisection. The left-hand sides are
/// monotone in v because phat is nondecreasing.
AdmissiblePower max_admissible_v(StabilityCondition kind, const PlantModel& plant,
                                 const NormContext& ctx, const PHatEnvelope& env,
                                 double cap = 1e6);

/// Smallest positive integer T with h(kappa/T + v) < 1, where
/// h(x) = a1*phat(x) + a0 and (a1, a0) = (zeta1, zeta0) or, for the
/// squared path, (zeta1^2 + 2*zeta1*zeta0, zeta0^2). h is nonincreasing
/// in T, so the scan gallops then bisects; throws beyond 1e9.
std::int64_t find_t_star(double zeta1, double zeta0, const PHatEnvelope& env, double kappa,
                         double v, bool squared);

/// Disturbance-free constants: theta = h(kappa/T* + v),
/// mu = (c2/c1) ||A||^(T*-1) theta^-(T*-1), gain = 0.
StabilityCertificate bound_constants_prop1(const PlantModel& plant, const NormContext& ctx,
                                           const PHatEnvelope& env, double kappa_bar,
                                           double vbar);

/// Bounded-disturbance constants; gain is
/// d_hat = (c2/c1)(||A||^(T*-1) theta^-(T*-1) / (1-theta) + 1).
StabilityCertificate bound_constants_thm1(const PlantModel& plant, const NormContext& ctx,
                                          const PHatEnvelope& env, double kappa_hat, double vhat);

/// Second-moment constants; theta/mu come from the linear path and gain is
/// f_hat = (f+1) c2/c1 with f = sqrt(mu_sq)/(1 - sqrt(theta_sq)) from the
/// squared path.
StabilityCertificate bound_constants_thm2(const PlantModel& plant, const NormContext& ctx,
                                          const PHatEnvelope& env, double kappa_hat, double vhat);

/// First-moment bound at step t evaluated from the certificate constants in
/// log space: exp(log_mu + t log(theta)) ||x0||_2 + gain * disturbance_term.
/// Overflow saturates to +inf rather than producing NaN.
double moment_bound_at(const BoundConstants& k, std::int64_t t, double x0_norm,
                       double disturbance_term);

}  // namespace jamsim
