#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "jamsim/linalg.hpp"
#include "jamsim/rng.hpp"

namespace jamsim {

/// Discrete-time linear plant x(t+1) = A x(t) + (1-l(t)) B K x(t) + w(t),
/// where l(t) is the transmission-failure indicator. All types in this
/// header are immutable after construction and safe to share across workers.
struct PlantModel {
  Matrix A;   // n x n state transition
  Matrix B;   // n x m input
  Matrix K;   // m x n feedback gain
  Vector x0;  // initial state

  PlantModel(Matrix a, Matrix b, Matrix k, Vector x0_init);

  std::size_t state_dim() const { return A.rows(); }
  std::size_t input_dim() const { return B.cols(); }
  Matrix closed_loop() const { return A + B * K; }
};

/// Wireless-channel constants entering the failure probability
/// p(v) = 2 Q(sqrt(c*xi/(v+sigma))).
struct ChannelParams {
  double c;      // protocol constant
  double xi;     // transmission power
  double sigma;  // channel noise power

  ChannelParams(double c_in, double xi_in, double sigma_in);
};

enum class BudgetKind { Assumption1, Assumption2 };

/// Budget parameters an attack schedule claims to respect.
/// Assumption1 bounds the cumulative power from time zero; Assumption2
/// bounds it over every window.
struct DeclaredBudget {
  double kappa = 0.0;
  double rate = 0.0;  // vbar or vhat
  bool assumption1 = false;
  bool assumption2 = false;
};

/// Deterministic interference-power schedule t -> v(t) >= 0.
class AttackStrategy {
 public:
  AttackStrategy() = default;
  static AttackStrategy from_function(std::function<double(std::int64_t)> schedule,
                                      std::optional<DeclaredBudget> budget = {});

  double power_at(std::int64_t t) const;
  std::vector<double> trace(std::int64_t horizon) const;
  const std::optional<DeclaredBudget>& declared_budget() const { return budget_; }

 private:
  std::shared_ptr<const std::function<double(std::int64_t)>> schedule_;
  std::optional<DeclaredBudget> budget_;
};

/// Additive-disturbance process. The built-in kinds cover everything the
/// experiments need; Custom takes an arbitrary sampler of the step index
/// and a RandomSource. Composed splits w(t) into plant noise plus
/// (1-l(t)) B * control noise and is assembled inside the simulator.
class DisturbanceModel {
 public:
  enum class Kind : std::uint8_t {
    None,
    BoundedIid,       // per-coordinate uniform on [-half_width, half_width]
    SecondMomentIid,  // per-coordinate N(0, stddev^2)
    ConstantScalar,   // every coordinate equals wstar
    Composed,
    Custom,
  };

  using Sampler = std::function<Vector(std::int64_t t, std::size_t n, const RandomSource&)>;

  static DisturbanceModel none();
  static DisturbanceModel uniform_iid(double half_width);
  static DisturbanceModel gaussian_iid(double stddev);
  static DisturbanceModel constant(double wstar);
  static DisturbanceModel composed(DisturbanceModel plant_noise, DisturbanceModel control_noise);
  static DisturbanceModel custom(Sampler sampler, std::optional<double> norm_bound,
                                 std::optional<double> second_moment_bound);

  Kind kind() const { return kind_; }
  bool is_none() const { return kind_ == Kind::None; }

  /// Almost-sure bound on ||w(t)||_2 for an n-dimensional state, when one
  /// exists for this kind.
  std::optional<double> norm_bound(std::size_t n) const;
  /// Bound on E[||w(t)||_2^2] for an n-dimensional state.
  std::optional<double> second_moment_bound(std::size_t n) const;

  /// Draws w(t) on the given stream (the disturbance stream by default).
  /// Not valid for Composed (the simulator assembles that kind from its
  /// parts, pulling the control part from its own stream).
  Vector sample(std::int64_t t, std::size_t n, const RandomSource& src,
                std::uint32_t stream = rng::kDisturbanceStream) const;

  const DisturbanceModel& plant_part() const;
  const DisturbanceModel& control_part() const;
  double half_width() const { return param_; }
  double stddev() const { return param_; }
  double wstar() const { return param_; }

 private:
  DisturbanceModel() = default;

  Kind kind_ = Kind::None;
  double param_ = 0.0;
  Sampler sampler_;
  std::optional<double> custom_norm_bound_;
  std::optional<double> custom_second_moment_bound_;
  std::shared_ptr<const DisturbanceModel> plant_part_;
  std::shared_ptr<const DisturbanceModel> control_part_;
};

/// One simulated step: state before the update, the interference power,
/// failure indicator, transmission power, and disturbance applied at t.
struct TrajectoryStep {
  std::int64_t t = 0;
  Vector x;
  double v = 0.0;
  int l = 0;
  double xi = 0.0;
  Vector w;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::uint64_t seed = 0;
};

/// Replays the closed-loop recursion over consecutive stored steps and
/// checks each recorded successor state to the given relative tolerance.
bool replay_matches(const PlantModel& plant, const Trajectory& traj, double rel_tol = 1e-12);

}  // namespace jamsim
