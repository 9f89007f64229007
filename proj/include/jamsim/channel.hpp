#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jamsim/model.hpp"

namespace jamsim {

/// Gaussian tail Q(y) = P[N(0,1) > y].
double q_function(double y);

/// SINR transmission-failure probability p(v) = 2 Q(sqrt(c*xi/(v+sigma))),
/// clamped to [0,1].
double failure_probability(double v, const ChannelParams& params);

/// Concave, nondecreasing upper envelope of the failure probability.
///
/// The default construction shifts the argument, phat(v) = p(v + psi);
/// for the reference channel psi = (c*xi - 3*sigma)/3 makes the shifted
/// curve concave from zero. Construction validates dominance, monotonicity,
/// and midpoint concavity on a 1000-point grid and throws if any check
/// fails, in which case a tabulated envelope can be supplied instead.
class PHatEnvelope {
 public:
  static PHatEnvelope shifted(ChannelParams base, double psi);
  /// Piecewise-linear envelope through (v, value) knots, held constant
  /// beyond the last knot. Same grid validation as the shifted form.
  static PHatEnvelope tabulated(ChannelParams base, std::vector<std::pair<double, double>> knots);

  /// (c*xi - 3*sigma)/3 clamped at zero.
  static double default_psi(const ChannelParams& params);

  double operator()(double v) const;

  const ChannelParams& base() const { return base_; }
  double psi() const { return psi_; }
  bool is_tabulated() const { return !knots_.empty(); }

  /// The validation grid: zero plus 999 log-spaced points up to 1e4.
  static std::vector<double> validation_grid();

 private:
  explicit PHatEnvelope(ChannelParams base) : base_(base) {}
  void validate() const;

  ChannelParams base_;
  double psi_ = 0.0;
  std::vector<std::pair<double, double>> knots_;
};

/// 1 iff u <= p(v); u must lie in [0,1].
int sample_failure(double v, const ChannelParams& params, double u);

struct BudgetCheck {
  bool pass = true;
  // First violating window [t1, t2); for the from-zero budget t1 is 0 and
  // t2 is the violating horizon.
  std::int64_t t1 = 0;
  std::int64_t t2 = 0;
};

/// Checks sum_{i<t} v(i) <= kappa + vbar*t for every horizon t = 1..len.
BudgetCheck verify_assumption1(std::span<const double> trace, double kappa, double vbar);

/// Checks sum_{i=t1}^{t2-1} v(i) <= kappa + vhat*(t2-t1) for every window
/// 0 <= t1 < t2 <= len.
BudgetCheck verify_assumption2(std::span<const double> trace, double kappa, double vhat);

/// Longest run of constant power vstar a window budget permits:
/// floor(kappa/(vstar - vhat)) steps, or nullopt (unbounded) when
/// vstar <= vhat.
std::optional<std::int64_t> max_consecutive_duration(double kappa, double vhat, double vstar);

/// Largest constant power sustainable for `duration` steps under the
/// window budget: vhat + kappa/duration.
double max_power_for_duration(double kappa, double vhat, std::int64_t duration);

}  // namespace jamsim
