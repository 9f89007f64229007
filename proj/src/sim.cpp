#include "jamsim/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace jamsim {

namespace {

constexpr std::int64_t kBlockSize = 64;
constexpr double kZ95 = 1.959963984540054;

/// Walks every step of one run, invoking on_step(t, x_before, v, l, xi, w)
/// before the state update. This is the single source of the closed-loop
/// recursion; trajectory recording and all aggregations share it.
template <typename OnStep>
void run_steps(const SimConfig& cfg, std::int64_t run, OnStep&& on_step) {
  const std::size_t n = cfg.plant.state_dim();
  const std::size_t m = cfg.plant.input_dim();
  const Matrix bk = cfg.plant.B * cfg.plant.K;

  Vector x = cfg.plant.x0;
  Vector x_next(n);

  int consec_failures = 0;
  int boost_left = 0;

  // p(v) changes only when (v, xi) changes; remember the last evaluation.
  double memo_v = -1.0, memo_xi = -1.0, memo_p = 0.0;

  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    const double v = cfg.strategy.power_at(t);
    const bool boosted = boost_left > 0;
    const double xi_t =
        boosted && cfg.countermeasure ? cfg.countermeasure->xi_c : cfg.channel.xi;

    if (v != memo_v || xi_t != memo_xi) {
      memo_p = failure_probability(v, ChannelParams(cfg.channel.c, xi_t, cfg.channel.sigma));
      memo_v = v;
      memo_xi = xi_t;
    }

    const RandomSource src{cfg.base_seed, static_cast<std::uint64_t>(run),
                           static_cast<std::uint64_t>(t)};
    int l;
    if (cfg.failure_override) {
      l = *cfg.failure_override;
    } else {
      const double u = src.uniform(rng::kFailureStream, 0);
      l = u <= memo_p ? 1 : 0;
    }

    Vector w;
    if (cfg.disturbance.kind() == DisturbanceModel::Kind::Composed) {
      w = cfg.disturbance.plant_part().sample(t, n, src, rng::kDisturbanceStream);
      if (l == 0) {
        const Vector wc =
            cfg.disturbance.control_part().sample(t, m, src, rng::kControlNoiseStream);
        const Vector bwc = matvec(cfg.plant.B, wc);
        for (std::size_t i = 0; i < n; ++i) w[i] += bwc[i];
      }
    } else {
      w = cfg.disturbance.sample(t, n, src);
    }

    on_step(t, x, v, l, xi_t, w);

    // x(t+1) = A x(t) + (1-l) BK x(t) + w(t)
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < n; ++c) acc += cfg.plant.A(r, c) * x[c];
      if (l == 0)
        for (std::size_t c = 0; c < n; ++c) acc += bk(r, c) * x[c];
      x_next[r] = acc + w[r];
    }
    std::swap(x, x_next);

    if (cfg.countermeasure) {
      if (boosted) {
        --boost_left;
      } else if (l == 1) {
        if (++consec_failures >= cfg.countermeasure->n_c) {
          boost_left = cfg.countermeasure->t_c;
          consec_failures = 0;
        }
      } else {
        consec_failures = 0;
      }
    }
  }
}

/// Hands out fixed-size blocks of runs to worker threads. Each block is
/// processed by exactly one thread in ascending run order, so per-block
/// aggregates are identical for any worker count.
template <typename PerBlock>
void parallel_blocks(std::int64_t n_runs, PerBlock&& per_block) {
  const std::int64_t n_blocks = (n_runs + kBlockSize - 1) / kBlockSize;
  const int workers = std::min<std::int64_t>(worker_count(), n_blocks);

  auto work = [&](std::atomic<std::int64_t>& next) {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= n_blocks) break;
      const std::int64_t begin = b * kBlockSize;
      const std::int64_t end = std::min(begin + kBlockSize, n_runs);
      per_block(b, begin, end);
    }
  };

  std::atomic<std::int64_t> next{0};
  if (workers <= 1) {
    work(next);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back([&] { work(next); });
  for (auto& th : pool) th.join();
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("JAMSIM_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed >= 1) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

CountermeasureParams::CountermeasureParams(double xi_c_in, int n_c_in, int t_c_in,
                                           double xi_nominal_in)
    : xi_c(xi_c_in), n_c(n_c_in), t_c(t_c_in), xi_nominal(xi_nominal_in) {
  if (!(std::isfinite(xi_nominal) && xi_nominal > 0.0))
    throw std::invalid_argument("countermeasure: xi_nominal must be positive");
  if (!(std::isfinite(xi_c) && xi_c > xi_nominal))
    throw std::invalid_argument("countermeasure: xi_c must exceed the nominal power");
  if (n_c < 1) throw std::invalid_argument("countermeasure: n_c must be positive");
  if (t_c < 1) throw std::invalid_argument("countermeasure: t_c must be positive");
}

void SimConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("sim: horizon must be at least 1");
  if (n_runs < 1) throw std::invalid_argument("sim: n_runs must be at least 1");
  if (countermeasure && countermeasure->xi_nominal != channel.xi)
    throw std::invalid_argument("sim: countermeasure xi_nominal must equal channel xi");
  if (failure_override && *failure_override != 0 && *failure_override != 1)
    throw std::invalid_argument("sim: failure_override must be 0 or 1");
}

Trajectory simulate_trajectory(const SimConfig& config, std::int64_t run_index) {
  config.validate();
  if (run_index < 0) throw std::invalid_argument("sim: run_index must be nonnegative");

  Trajectory traj;
  traj.seed = config.base_seed;
  traj.steps.reserve(static_cast<std::size_t>(config.horizon));
  run_steps(config, run_index,
            [&](std::int64_t t, const Vector& x, double v, int l, double xi_t, const Vector& w) {
              traj.steps.push_back({t, x, v, l, xi_t, w});
            });
  return traj;
}

MomentSeries monte_carlo_first_moment(const SimConfig& config) {
  config.validate();
  const auto h = static_cast<std::size_t>(config.horizon);
  const std::int64_t n_blocks = (config.n_runs + kBlockSize - 1) / kBlockSize;

  std::vector<std::vector<double>> block_sum(static_cast<std::size_t>(n_blocks));
  std::vector<std::vector<double>> block_sumsq(static_cast<std::size_t>(n_blocks));

  parallel_blocks(config.n_runs, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
    auto& sum = block_sum[static_cast<std::size_t>(b)];
    auto& sumsq = block_sumsq[static_cast<std::size_t>(b)];
    sum.assign(h, 0.0);
    sumsq.assign(h, 0.0);
    for (std::int64_t run = begin; run < end; ++run) {
      run_steps(config, run,
                [&](std::int64_t t, const Vector& x, double, int, double, const Vector&) {
                  const double nrm = norm2(x);
                  sum[static_cast<std::size_t>(t)] += nrm;
                  sumsq[static_cast<std::size_t>(t)] += nrm * nrm;
                });
    }
  });

  MomentSeries series;
  series.n_runs = config.n_runs;
  series.t.resize(h);
  series.mean_norm.assign(h, 0.0);
  series.std_err.assign(h, 0.0);

  std::vector<double> sum(h, 0.0), sumsq(h, 0.0);
  for (std::int64_t b = 0; b < n_blocks; ++b)
    for (std::size_t t = 0; t < h; ++t) {
      sum[t] += block_sum[static_cast<std::size_t>(b)][t];
      sumsq[t] += block_sumsq[static_cast<std::size_t>(b)][t];
    }

  const auto n = static_cast<double>(config.n_runs);
  for (std::size_t t = 0; t < h; ++t) {
    series.t[t] = static_cast<std::int64_t>(t);
    const double mean = sum[t] / n;
    series.mean_norm[t] = mean;
    if (config.n_runs > 1) {
      double var = std::max(sumsq[t] - n * mean * mean, 0.0) / (n - 1.0);
      // cancellation noise when every run produced the same value
      if (var < 1e-15 * mean * mean) var = 0.0;
      series.std_err[t] = std::sqrt(var / n);
    }
  }
  return series;
}

CumulativeTotals monte_carlo_totals(const SimConfig& config) {
  config.validate();
  CumulativeTotals totals;
  totals.total_norm.assign(static_cast<std::size_t>(config.n_runs), 0.0);
  totals.total_power.assign(static_cast<std::size_t>(config.n_runs), 0.0);

  parallel_blocks(config.n_runs, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
    for (std::int64_t run = begin; run < end; ++run) {
      double tn = 0.0, tp = 0.0;
      run_steps(config, run,
                [&](std::int64_t, const Vector& x, double, int, double xi_t, const Vector&) {
                  tn += norm2(x);
                  tp += xi_t;
                });
      totals.total_norm[static_cast<std::size_t>(run)] = tn;
      totals.total_power[static_cast<std::size_t>(run)] = tp;
    }
  });
  return totals;
}

ExceedanceEstimate estimate_exceedance_probability(const SimConfig& config, double z,
                                                   std::int64_t tau) {
  config.validate();
  if (tau < 0 || tau >= config.horizon)
    throw std::invalid_argument("exceedance: tau must lie in [0, horizon)");
  const bool scalar = config.plant.state_dim() == 1;

  const std::int64_t n_blocks = (config.n_runs + kBlockSize - 1) / kBlockSize;
  std::vector<std::int64_t> block_count(static_cast<std::size_t>(n_blocks), 0);

  parallel_blocks(config.n_runs, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
    std::int64_t count = 0;
    for (std::int64_t run = begin; run < end; ++run) {
      run_steps(config, run,
                [&](std::int64_t t, const Vector& x, double, int, double, const Vector&) {
                  if (t != tau) return;
                  const double value = scalar ? x[0] : norm2(x);
                  if (value > z) ++count;
                });
    }
    block_count[static_cast<std::size_t>(b)] = count;
  });

  std::int64_t exceed = 0;
  for (std::int64_t c : block_count) exceed += c;

  ExceedanceEstimate est;
  est.exceed_count = exceed;
  est.n_runs = config.n_runs;
  const auto n = static_cast<double>(config.n_runs);
  const double phat = static_cast<double>(exceed) / n;
  est.probability = phat;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = phat + z2 / (2.0 * n);
  const double half = kZ95 * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  est.wilson_low = std::max((center - half) / denom, 0.0);
  est.wilson_high = std::min((center + half) / denom, 1.0);
  return est;
}

MomentBoundReport moment_bound_check(const SimConfig& config, const StabilityCertificate& cert,
                                     double disturbance_moment) {
  config.validate();
  if (!cert.constants)
    throw std::invalid_argument("moment_bound_check: certificate carries no constants");
  const BoundConstants& k = *cert.constants;

  const std::vector<double> trace = config.strategy.trace(config.horizon);
  double disturbance_term = 0.0;
  switch (cert.condition) {
    case StabilityCondition::FirstMomentNoDisturbance: {
      if (!config.disturbance.is_none())
        throw std::invalid_argument(
            "moment_bound_check: disturbance-free bound requires a disturbance-free config");
      const BudgetCheck chk = verify_assumption1(trace, k.kappa, k.v);
      if (!chk.pass)
        throw std::runtime_error(
            "moment_bound_check: attack violates the from-zero budget at horizon " +
            std::to_string(chk.t2));
      break;
    }
    case StabilityCondition::BoundedDisturbance: {
      const BudgetCheck chk = verify_assumption2(trace, k.kappa, k.v);
      if (!chk.pass)
        throw std::runtime_error("moment_bound_check: attack violates the window budget on [" +
                                 std::to_string(chk.t1) + "," + std::to_string(chk.t2) + ")");
      disturbance_term = disturbance_moment;
      break;
    }
    case StabilityCondition::SecondMomentDisturbance: {
      const BudgetCheck chk = verify_assumption2(trace, k.kappa, k.v);
      if (!chk.pass)
        throw std::runtime_error("moment_bound_check: attack violates the window budget on [" +
                                 std::to_string(chk.t1) + "," + std::to_string(chk.t2) + ")");
      disturbance_term = std::sqrt(disturbance_moment);
      break;
    }
    case StabilityCondition::AlmostSure:
      throw std::invalid_argument(
          "moment_bound_check: the almost-sure condition has no first-moment bound");
  }

  MomentBoundReport report;
  report.series = monte_carlo_first_moment(config);
  const double x0_norm = norm2(config.plant.x0);
  const auto h = static_cast<std::size_t>(config.horizon);
  report.bound.resize(h);
  report.margin.resize(h);

  for (std::size_t t = 0; t < h; ++t) {
    report.bound[t] =
        moment_bound_at(k, static_cast<std::int64_t>(t), x0_norm, disturbance_term);
    const double lower = report.series.mean_norm[t] - 3.0 * report.series.std_err[t];
    report.margin[t] = report.bound[t] - lower;
    if (t >= 1 && lower > report.bound[t] && report.pass) {
      report.pass = false;
      report.first_violation = static_cast<std::int64_t>(t);
    }
  }
  return report;
}

}  // namespace jamsim
