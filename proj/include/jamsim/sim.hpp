#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "jamsim/analysis.hpp"
#include "jamsim/model.hpp"

namespace jamsim {

/// Adaptive-transmission-power countermeasure: after n_c consecutive
/// failures at nominal power, transmit at xi_c for the next t_c steps,
/// then revert and restart the failure count. Failures during a boost
/// window are not counted.
struct CountermeasureParams {
  double xi_c;
  int n_c;
  int t_c;
  double xi_nominal;

  CountermeasureParams(double xi_c_in, int n_c_in, int t_c_in, double xi_nominal_in);
};

struct SimConfig {
  PlantModel plant;
  ChannelParams channel;
  AttackStrategy strategy;
  DisturbanceModel disturbance = DisturbanceModel::none();
  std::optional<CountermeasureParams> countermeasure;
  std::int64_t horizon = 1;
  std::int64_t n_runs = 1;
  std::uint64_t base_seed = 0;
  /// Forces every failure indicator to 0 or 1; used for open-loop /
  /// closed-loop reference runs.
  std::optional<int> failure_override;

  void validate() const;
};

struct MomentSeries {
  std::vector<std::int64_t> t;
  std::vector<double> mean_norm;
  std::vector<double> std_err;
  std::int64_t n_runs = 0;
};

/// Per-run cumulative statistics over the horizon.
struct CumulativeTotals {
  std::vector<double> total_norm;   // sum_t ||x(t)||_2, one entry per run
  std::vector<double> total_power;  // sum_t xi(t)
};

struct ExceedanceEstimate {
  double probability = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 1.0;
  std::int64_t exceed_count = 0;
  std::int64_t n_runs = 0;
};

struct MomentBoundReport {
  bool pass = true;
  std::int64_t first_violation = -1;
  std::vector<double> bound;   // bound[t]; index 0 is not part of the claim
  std::vector<double> margin;  // bound[t] - (mean[t] - 3*se[t])
  MomentSeries series;
};

/// Simulates one closed-loop run, recording state, interference power,
/// failure indicator, transmission power, and disturbance at each step.
/// Identical (base_seed, run_index) give bitwise-identical trajectories.
Trajectory simulate_trajectory(const SimConfig& config, std::int64_t run_index);

/// Per-step sample mean and standard error of ||x(t)||_2 across
/// n_runs independent runs. Deterministic for a fixed config regardless
/// of worker count.
MomentSeries monte_carlo_first_moment(const SimConfig& config);

/// Per-run totals of state norm and transmission power.
CumulativeTotals monte_carlo_totals(const SimConfig& config);

/// Empirical P[x(tau) > z] (signed, scalar plants) or P[||x(tau)||_2 > z]
/// (vector plants), with a Wilson 95% interval. Requires tau < horizon.
ExceedanceEstimate estimate_exceedance_probability(const SimConfig& config, double z,
                                                   std::int64_t tau);

/// Checks the Monte Carlo first moment against the certificate's analytic
/// bound at every step, with one-sided 3-standard-error slack. Refuses to
/// run when the attack violates the budget the certificate was derived
/// for. disturbance_moment is the norm bound for the bounded-disturbance
/// bound or the second-moment bound (E||w||^2 cap) for the second-moment
/// bound; it is ignored in the disturbance-free case.
MomentBoundReport moment_bound_check(const SimConfig& config, const StabilityCertificate& cert,
                                     double disturbance_moment = 0.0);

/// Number of simulation workers: JAMSIM_THREADS when set, otherwise the
/// hardware concurrency.
int worker_count();

}  // namespace jamsim
