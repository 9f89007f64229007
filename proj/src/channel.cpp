#include "jamsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace jamsim {

double q_function(double y) {
  if (!std::isfinite(y)) throw std::invalid_argument("q_function: argument must be finite");
  return 0.5 * std::erfc(y / std::sqrt(2.0));
}

double failure_probability(double v, const ChannelParams& params) {
  if (std::isnan(v) || v < 0.0)
    throw std::invalid_argument("failure_probability: interference power must be nonnegative");
  if (std::isinf(v)) return 1.0;
  const double snr = params.c * params.xi / (v + params.sigma);
  const double p = 2.0 * q_function(std::sqrt(snr));
  return std::clamp(p, 0.0, 1.0);
}

double PHatEnvelope::default_psi(const ChannelParams& params) {
  return std::max((params.c * params.xi - 3.0 * params.sigma) / 3.0, 0.0);
}

std::vector<double> PHatEnvelope::validation_grid() {
  std::vector<double> grid;
  grid.reserve(1000);
  grid.push_back(0.0);
  const double lo = -4.0, hi = 4.0;
  for (int i = 0; i < 999; ++i)
    grid.push_back(std::pow(10.0, lo + (hi - lo) * i / 998.0));
  return grid;
}

PHatEnvelope PHatEnvelope::shifted(ChannelParams base, double psi) {
  if (!(std::isfinite(psi) && psi >= 0.0))
    throw std::invalid_argument("envelope: psi must be nonnegative and finite");
  PHatEnvelope env(base);
  env.psi_ = psi;
  env.validate();
  return env;
}

PHatEnvelope PHatEnvelope::tabulated(ChannelParams base,
                                     std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("envelope: need at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second))
      throw std::invalid_argument("envelope: knot " + std::to_string(i) + " is not finite");
    if (i > 0 && knots[i].first <= knots[i - 1].first)
      throw std::invalid_argument("envelope: knot abscissae must be strictly increasing");
  }
  if (knots.front().first > 0.0)
    throw std::invalid_argument("envelope: first knot must be at v <= 0");
  PHatEnvelope env(base);
  env.knots_ = std::move(knots);
  env.validate();
  return env;
}

double PHatEnvelope::operator()(double v) const {
  if (std::isnan(v) || v < 0.0)
    throw std::invalid_argument("envelope: interference power must be nonnegative");
  if (knots_.empty()) {
    if (std::isinf(v)) return 1.0;
    return failure_probability(v + psi_, base_);
  }
  if (v <= knots_.front().first) return knots_.front().second;
  if (v >= knots_.back().first) return knots_.back().second;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), v,
                             [](double x, const auto& k) { return x < k.first; });
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  const double s = (v - x0) / (x1 - x0);
  return y0 + s * (y1 - y0);
}

void PHatEnvelope::validate() const {
  const std::vector<double> grid = validation_grid();
  std::vector<double> ph(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ph[i] = (*this)(grid[i]);
    if (!(ph[i] >= 0.0 && ph[i] <= 1.0))
      throw std::invalid_argument("envelope: value outside [0,1] at v=" + std::to_string(grid[i]));
    const double p = failure_probability(grid[i], base_);
    if (ph[i] < p - 1e-15)
      throw std::invalid_argument("envelope: fails to dominate p at v=" + std::to_string(grid[i]));
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (ph[i + 1] < ph[i] - 1e-15)
      throw std::invalid_argument("envelope: not nondecreasing near v=" +
                                  std::to_string(grid[i]));
    const double mid = (*this)(0.5 * (grid[i] + grid[i + 1]));
    if (mid < 0.5 * (ph[i] + ph[i + 1]) - 1e-12)
      throw std::invalid_argument("envelope: midpoint concavity fails near v=" +
                                  std::to_string(grid[i]));
  }
}

int sample_failure(double v, const ChannelParams& params, double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw std::invalid_argument("sample_failure: uniform draw must lie in [0,1]");
  return u <= failure_probability(v, params) ? 1 : 0;
}

namespace {

void require_nonnegative_trace(std::span<const double> trace) {
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (std::isnan(trace[i]) || trace[i] < 0.0)
      throw std::invalid_argument("budget: trace has a negative or NaN power at t=" +
                                  std::to_string(i));
}

// Budgets that hold with exact equality (32*40 = 1280 = 1.28*1000) must
// pass even though prefix summation and rate*t round differently; one part
// in 1e9 absorbs that without masking real violations.
bool exceeds(double sum, double bound) { return sum > bound + 1e-9 * std::max(1.0, bound); }

}  // namespace

BudgetCheck verify_assumption1(std::span<const double> trace, double kappa, double vbar) {
  require_nonnegative_trace(trace);
  double prefix = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    prefix += trace[i];
    const auto t = static_cast<std::int64_t>(i) + 1;
    if (exceeds(prefix, kappa + vbar * static_cast<double>(t))) return {false, 0, t};
  }
  return {};
}

BudgetCheck verify_assumption2(std::span<const double> trace, double kappa, double vhat) {
  require_nonnegative_trace(trace);
  // Window sums obey sum - vhat*len <= kappa for all windows iff
  // s(t2) - min_{t1 < t2} s(t1) <= kappa with s(t) = prefix(t) - vhat*t,
  // which a running minimum covers in one pass. Candidate violations are
  // re-summed directly so boundary cases that hold with equality in the
  // original form are not lost to the transformation.
  double prefix = 0.0;
  double best = 0.0;  // min of s over 0..t, s(0) = 0
  std::int64_t best_at = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    prefix += trace[i];
    const auto t2 = static_cast<std::int64_t>(i) + 1;
    const double s = prefix - vhat * static_cast<double>(t2);
    if (exceeds(s - best, kappa)) {
      double direct = 0.0;
      for (std::int64_t j = best_at; j < t2; ++j) direct += trace[static_cast<std::size_t>(j)];
      if (exceeds(direct, kappa + vhat * static_cast<double>(t2 - best_at)))
        return {false, best_at, t2};
    }
    if (s < best) {
      best = s;
      best_at = t2;
    }
  }
  return {};
}

std::optional<std::int64_t> max_consecutive_duration(double kappa, double vhat, double vstar) {
  if (std::isnan(vstar) || vstar < 0.0)
    throw std::invalid_argument("max_consecutive_duration: vstar must be nonnegative");
  if (vstar <= vhat) return std::nullopt;
  const double q = kappa / (vstar - vhat);
  // Snap quotients within one part in 1e9 of an integer before flooring, so
  // decimal parameter sets that hit an integer exactly are not rounded down.
  const double nearest = std::round(q);
  if (std::fabs(q - nearest) <= 1e-9 * std::max(1.0, std::fabs(q)))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::floor(q));
}

double max_power_for_duration(double kappa, double vhat, std::int64_t duration) {
  if (duration < 1)
    throw std::invalid_argument("max_power_for_duration: duration must be positive");
  return vhat + kappa / static_cast<double>(duration);
}

}  // namespace jamsim
