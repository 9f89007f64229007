#include "jamsim/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace jamsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PSqrtPair {
  Matrix sqrt;
  Matrix inv_sqrt;
};

PSqrtPair p_square_roots(const Matrix& p) {
  if (p.rows() != p.cols()) throw std::invalid_argument("p-norm: P must be square");
  double asym = 0.0, scale = 0.0;
  for (std::size_t r = 0; r < p.rows(); ++r)
    for (std::size_t c = 0; c < p.cols(); ++c) {
      asym = std::max(asym, std::fabs(p(r, c) - p(c, r)));
      scale = std::max(scale, std::fabs(p(r, c)));
    }
  if (asym > 1e-12 * std::max(1.0, scale))
    throw std::invalid_argument("p-norm: P is not symmetric");

  const SymmetricEigen eig = symmetric_eigen(p);
  if (eig.values.front() <= 0.0)
    throw std::invalid_argument("p-norm: P is not positive definite (min eigenvalue " +
                                std::to_string(eig.values.front()) + ")");

  const std::size_t n = p.rows();
  Matrix d_sqrt(n, n), d_inv_sqrt(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double root = std::sqrt(eig.values[i]);
    d_sqrt(i, i) = root;
    d_inv_sqrt(i, i) = 1.0 / root;
  }
  const Matrix vt = eig.vectors.transpose();
  return {eig.vectors * d_sqrt * vt, eig.vectors * d_inv_sqrt * vt};
}

double log_with_floor(double x) { return x > 0.0 ? std::log(x) : -kInf; }

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct LemmaConstants {
  double theta = 0.0;   // h(kappa/T* + v), strictly below 1
  double log_mu = 0.0;  // (T*-1)(log(a1+a0) - log(theta))
  std::int64_t t_star = 1;
};

double affine_envelope(double a1, double a0, const PHatEnvelope& env, double x) {
  return a1 * env(x) + a0;
}

LemmaConstants lemma_geometric_constants(double a1, double a0, const PHatEnvelope& env,
                                         double kappa, double v, bool squared_path,
                                         double zeta1, double zeta0) {
  const std::int64_t t_star = find_t_star(zeta1, zeta0, env, kappa, v, squared_path);
  LemmaConstants out;
  out.t_star = t_star;
  out.theta = affine_envelope(a1, a0, env, kappa / static_cast<double>(t_star) + v);
  out.log_mu = static_cast<double>(t_star - 1) * (std::log(a1 + a0) - std::log(out.theta));
  return out;
}

void require_budget_args(double kappa, double v, const char* what) {
  if (!(std::isfinite(kappa) && kappa >= 0.0))
    throw std::invalid_argument(std::string(what) + ": kappa must be nonnegative and finite");
  if (!(std::isfinite(v) && v >= 0.0))
    throw std::invalid_argument(std::string(what) + ": v must be nonnegative and finite");
}

}  // namespace

NormContext NormContext::from_p_matrix(Matrix p) {
  // Validation happens inside the square-root factorization.
  (void)p_square_roots(p);
  const auto [c1, c2] = norm_equivalence_constants(p);
  NormContext ctx;
  ctx.P = std::move(p);
  ctx.c1 = c1;
  ctx.c2 = c2;
  return ctx;
}

double p_induced_norm(const Matrix& m, const Matrix& p) {
  if (m.rows() != m.cols() || m.rows() != p.rows())
    throw std::invalid_argument("p-norm: M must be square and match P");
  const PSqrtPair roots = p_square_roots(p);
  return spectral_norm(roots.sqrt * m * roots.inv_sqrt);
}

std::pair<double, double> norm_equivalence_constants(const Matrix& p) {
  const PSqrtPair roots = p_square_roots(p);
  (void)roots;
  const SymmetricEigen eig = symmetric_eigen(p);
  return {1.0 / std::sqrt(eig.values.back()), 1.0 / std::sqrt(eig.values.front())};
}

const char* condition_name(StabilityCondition c) {
  switch (c) {
    case StabilityCondition::FirstMomentNoDisturbance:
      return "first-moment";
    case StabilityCondition::AlmostSure:
      return "almost-sure";
    case StabilityCondition::BoundedDisturbance:
      return "bounded-disturbance";
    case StabilityCondition::SecondMomentDisturbance:
      return "second-moment";
  }
  return "?";
}

StabilityCertificate check_condition(StabilityCondition kind, const PlantModel& plant,
                                     const NormContext& ctx, const PHatEnvelope& env, double v) {
  const double na = p_induced_norm(plant.A, ctx.P);
  const double nabk = p_induced_norm(plant.closed_loop(), ctx.P);
  const double q = env(v);

  StabilityCertificate cert;
  cert.condition = kind;
  cert.zeta1 = na - nabk;
  cert.zeta0 = nabk;

  switch (kind) {
    case StabilityCondition::FirstMomentNoDisturbance:
    case StabilityCondition::BoundedDisturbance:
      cert.lhs_value = (1.0 - q) * nabk + q * na;
      cert.holds = cert.lhs_value < 1.0;
      break;
    case StabilityCondition::SecondMomentDisturbance:
      cert.lhs_value = (1.0 - q) * nabk * nabk + q * na * na;
      cert.holds = cert.lhs_value < 1.0;
      break;
    case StabilityCondition::AlmostSure: {
      const double closed = q < 1.0 ? (1.0 - q) * log_with_floor(nabk) : 0.0;
      const double open = q > 0.0 ? q * log_with_floor(na) : 0.0;
      cert.lhs_value = closed + open;
      cert.holds = cert.lhs_value < 0.0;
      break;
    }
  }
  return cert;
}

AdmissiblePower max_admissible_v(StabilityCondition kind, const PlantModel& plant,
                                 const NormContext& ctx, const PHatEnvelope& env, double cap) {
  const auto holds_at = [&](double v) {
    return check_condition(kind, plant, ctx, env, v).holds;
  };
  if (!holds_at(0.0)) return {0.0, true, false};
  if (holds_at(cap)) return {cap, false, true};

  double lo = 0.0, hi = 1.0;
  while (hi < cap && holds_at(hi)) {
    lo = hi;
    hi = std::min(hi * 2.0, cap);
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (holds_at(mid))
      lo = mid;
    else
      hi = mid;
  }
  return {lo, false, false};
}

std::int64_t find_t_star(double zeta1, double zeta0, const PHatEnvelope& env, double kappa,
                         double v, bool squared) {
  require_budget_args(kappa, v, "find_t_star");
  const double a1 = squared ? zeta1 * zeta1 + 2.0 * zeta1 * zeta0 : zeta1;
  const double a0 = squared ? zeta0 * zeta0 : zeta0;
  const auto ok = [&](std::int64_t t) {
    return affine_envelope(a1, a0, env, kappa / static_cast<double>(t) + v) < 1.0;
  };

  constexpr std::int64_t kCap = 1'000'000'000;
  if (ok(1)) return 1;
  std::int64_t lo = 1, hi = 2;
  while (hi < kCap && !ok(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (hi >= kCap && !ok(kCap))
    throw std::runtime_error("T* search diverged; condition margin too small");
  hi = std::min(hi, kCap);
  // smallest satisfying T in (lo, hi]
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

StabilityCertificate bound_constants_prop1(const PlantModel& plant, const NormContext& ctx,
                                           const PHatEnvelope& env, double kappa_bar,
                                           double vbar) {
  require_budget_args(kappa_bar, vbar, "bound_constants_prop1");
  StabilityCertificate cert =
      check_condition(StabilityCondition::FirstMomentNoDisturbance, plant, ctx, env, vbar);
  if (!cert.holds)
    throw std::runtime_error("bound_constants_prop1: condition fails at vbar=" +
                             std::to_string(vbar));

  const LemmaConstants lc = lemma_geometric_constants(cert.zeta1, cert.zeta0, env, kappa_bar,
                                                      vbar, false, cert.zeta1, cert.zeta0);
  BoundConstants k;
  k.theta_hat = lc.theta;
  k.log_mu_hat = std::log(ctx.c2 / ctx.c1) + lc.log_mu;
  k.mu_hat = std::exp(k.log_mu_hat);
  k.gain = 0.0;
  k.log_gain = -kInf;
  k.t_star = lc.t_star;
  k.kappa = kappa_bar;
  k.v = vbar;
  cert.constants = k;
  return cert;
}

StabilityCertificate bound_constants_thm1(const PlantModel& plant, const NormContext& ctx,
                                          const PHatEnvelope& env, double kappa_hat,
                                          double vhat) {
  require_budget_args(kappa_hat, vhat, "bound_constants_thm1");
  StabilityCertificate cert =
      check_condition(StabilityCondition::BoundedDisturbance, plant, ctx, env, vhat);
  if (!cert.holds)
    throw std::runtime_error("bound_constants_thm1: condition fails at vhat=" +
                             std::to_string(vhat));

  const LemmaConstants lc = lemma_geometric_constants(cert.zeta1, cert.zeta0, env, kappa_hat,
                                                      vhat, false, cert.zeta1, cert.zeta0);
  const double log_ratio = std::log(ctx.c2 / ctx.c1);
  BoundConstants k;
  k.theta_hat = lc.theta;
  k.log_mu_hat = log_ratio + lc.log_mu;
  k.mu_hat = std::exp(k.log_mu_hat);
  // d_hat = (c2/c1)(mu/(1-theta) + 1) with mu the un-scaled transient term.
  k.log_gain = log_ratio + log_sum_exp(lc.log_mu - std::log1p(-lc.theta), 0.0);
  k.gain = std::exp(k.log_gain);
  k.t_star = lc.t_star;
  k.kappa = kappa_hat;
  k.v = vhat;
  cert.constants = k;
  return cert;
}

StabilityCertificate bound_constants_thm2(const PlantModel& plant, const NormContext& ctx,
                                          const PHatEnvelope& env, double kappa_hat,
                                          double vhat) {
  require_budget_args(kappa_hat, vhat, "bound_constants_thm2");
  StabilityCertificate cert =
      check_condition(StabilityCondition::SecondMomentDisturbance, plant, ctx, env, vhat);
  if (!cert.holds)
    throw std::runtime_error("bound_constants_thm2: condition fails at vhat=" +
                             std::to_string(vhat));

  // Decaying term: linear path exactly as in the bounded-disturbance bound.
  const LemmaConstants lin = lemma_geometric_constants(cert.zeta1, cert.zeta0, env, kappa_hat,
                                                       vhat, false, cert.zeta1, cert.zeta0);
  // Disturbance term: squared path through the same lemma, then
  // f = sqrt(mu)/(1 - sqrt(theta)) and f_hat = (f+1) c2/c1.
  const double a1 = cert.zeta1 * cert.zeta1 + 2.0 * cert.zeta1 * cert.zeta0;
  const double a0 = cert.zeta0 * cert.zeta0;
  const LemmaConstants sq = lemma_geometric_constants(a1, a0, env, kappa_hat, vhat, true,
                                                      cert.zeta1, cert.zeta0);

  const double log_ratio = std::log(ctx.c2 / ctx.c1);
  const double log_f = 0.5 * sq.log_mu - std::log1p(-std::sqrt(sq.theta));

  BoundConstants k;
  k.theta_hat = lin.theta;
  k.log_mu_hat = log_ratio + lin.log_mu;
  k.mu_hat = std::exp(k.log_mu_hat);
  k.log_gain = log_ratio + log_sum_exp(log_f, 0.0);
  k.gain = std::exp(k.log_gain);
  k.t_star = lin.t_star;
  k.t_star_squared = sq.t_star;
  k.kappa = kappa_hat;
  k.v = vhat;
  cert.constants = k;
  return cert;
}

double moment_bound_at(const BoundConstants& k, std::int64_t t, double x0_norm,
                       double disturbance_term) {
  double transient = 0.0;
  if (x0_norm > 0.0) {
    const double log_term =
        k.log_mu_hat + static_cast<double>(t) * std::log(k.theta_hat) + std::log(x0_norm);
    transient = std::exp(log_term);  // overflows to +inf, never NaN
  }
  const double tail =
      (k.log_gain == -kInf || disturbance_term == 0.0) ? 0.0
                                                       : std::exp(k.log_gain) * disturbance_term;
  return transient + tail;
}

}  // namespace jamsim
