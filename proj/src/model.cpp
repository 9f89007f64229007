#include "jamsim/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jamsim {

namespace {

void require_finite(const Matrix& m, const char* name) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!std::isfinite(m(r, c)))
        throw std::invalid_argument(std::string("plant: ") + name + " has a non-finite entry");
}

}  // namespace

PlantModel::PlantModel(Matrix a, Matrix b, Matrix k, Vector x0_init)
    : A(std::move(a)), B(std::move(b)), K(std::move(k)), x0(std::move(x0_init)) {
  if (A.rows() == 0 || A.rows() != A.cols())
    throw std::invalid_argument("plant: A must be square and nonempty, got " +
                                std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  const std::size_t n = A.rows();
  if (B.rows() != n || B.cols() == 0)
    throw std::invalid_argument("plant: B must be " + std::to_string(n) + "x m with m >= 1, got " +
                                std::to_string(B.rows()) + "x" + std::to_string(B.cols()));
  const std::size_t m = B.cols();
  if (K.rows() != m || K.cols() != n)
    throw std::invalid_argument("plant: K must be " + std::to_string(m) + "x" + std::to_string(n) +
                                ", got " + std::to_string(K.rows()) + "x" +
                                std::to_string(K.cols()));
  if (x0.size() != n)
    throw std::invalid_argument("plant: x0 must have length " + std::to_string(n) + ", got " +
                                std::to_string(x0.size()));
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(K, "K");
  for (double v : x0)
    if (!std::isfinite(v)) throw std::invalid_argument("plant: x0 has a non-finite entry");
}

ChannelParams::ChannelParams(double c_in, double xi_in, double sigma_in)
    : c(c_in), xi(xi_in), sigma(sigma_in) {
  if (!(std::isfinite(c) && c > 0.0))
    throw std::invalid_argument("channel: c must be positive and finite");
  if (!(std::isfinite(xi) && xi > 0.0))
    throw std::invalid_argument("channel: xi must be positive and finite");
  if (!(std::isfinite(sigma) && sigma > 0.0))
    throw std::invalid_argument("channel: sigma must be positive and finite");
}

AttackStrategy AttackStrategy::from_function(std::function<double(std::int64_t)> schedule,
                                             std::optional<DeclaredBudget> budget) {
  if (!schedule) throw std::invalid_argument("attack: schedule function is empty");
  AttackStrategy s;
  s.schedule_ =
      std::make_shared<const std::function<double(std::int64_t)>>(std::move(schedule));
  s.budget_ = budget;
  return s;
}

double AttackStrategy::power_at(std::int64_t t) const {
  if (!schedule_) return 0.0;
  const double v = (*schedule_)(t);
  if (std::isnan(v) || v < 0.0)
    throw std::invalid_argument("attack: schedule produced a negative or NaN power at t=" +
                                std::to_string(t));
  return v;
}

std::vector<double> AttackStrategy::trace(std::int64_t horizon) const {
  if (horizon < 0) throw std::invalid_argument("attack: trace horizon must be nonnegative");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 0; t < horizon; ++t) out.push_back(power_at(t));
  return out;
}

DisturbanceModel DisturbanceModel::none() { return DisturbanceModel{}; }

DisturbanceModel DisturbanceModel::uniform_iid(double half_width) {
  if (!(std::isfinite(half_width) && half_width >= 0.0))
    throw std::invalid_argument("disturbance: half_width must be nonnegative and finite");
  DisturbanceModel m;
  m.kind_ = Kind::BoundedIid;
  m.param_ = half_width;
  return m;
}

DisturbanceModel DisturbanceModel::gaussian_iid(double stddev) {
  if (!(std::isfinite(stddev) && stddev >= 0.0))
    throw std::invalid_argument("disturbance: stddev must be nonnegative and finite");
  DisturbanceModel m;
  m.kind_ = Kind::SecondMomentIid;
  m.param_ = stddev;
  return m;
}

DisturbanceModel DisturbanceModel::constant(double wstar) {
  if (!std::isfinite(wstar)) throw std::invalid_argument("disturbance: wstar must be finite");
  DisturbanceModel m;
  m.kind_ = Kind::ConstantScalar;
  m.param_ = wstar;
  return m;
}

DisturbanceModel DisturbanceModel::composed(DisturbanceModel plant_noise,
                                            DisturbanceModel control_noise) {
  if (plant_noise.kind_ == Kind::Composed || control_noise.kind_ == Kind::Composed)
    throw std::invalid_argument("disturbance: composed parts cannot themselves be composed");
  DisturbanceModel m;
  m.kind_ = Kind::Composed;
  m.plant_part_ = std::make_shared<const DisturbanceModel>(std::move(plant_noise));
  m.control_part_ = std::make_shared<const DisturbanceModel>(std::move(control_noise));
  return m;
}

DisturbanceModel DisturbanceModel::custom(Sampler sampler, std::optional<double> norm_bound,
                                          std::optional<double> second_moment_bound) {
  if (!sampler) throw std::invalid_argument("disturbance: custom sampler is empty");
  DisturbanceModel m;
  m.kind_ = Kind::Custom;
  m.sampler_ = std::move(sampler);
  m.custom_norm_bound_ = norm_bound;
  m.custom_second_moment_bound_ = second_moment_bound;
  return m;
}

std::optional<double> DisturbanceModel::norm_bound(std::size_t n) const {
  switch (kind_) {
    case Kind::None:
      return 0.0;
    case Kind::BoundedIid:
      return param_ * std::sqrt(static_cast<double>(n));
    case Kind::ConstantScalar:
      return std::fabs(param_) * std::sqrt(static_cast<double>(n));
    case Kind::SecondMomentIid:
      return std::nullopt;  // unbounded support
    case Kind::Custom:
      return custom_norm_bound_;
    case Kind::Composed:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> DisturbanceModel::second_moment_bound(std::size_t n) const {
  switch (kind_) {
    case Kind::None:
      return 0.0;
    case Kind::BoundedIid:
      // E[w_i^2] = half_width^2 / 3 per coordinate.
      return static_cast<double>(n) * param_ * param_ / 3.0;
    case Kind::ConstantScalar:
      return static_cast<double>(n) * param_ * param_;
    case Kind::SecondMomentIid:
      return static_cast<double>(n) * param_ * param_;
    case Kind::Custom:
      return custom_second_moment_bound_;
    case Kind::Composed:
      return std::nullopt;
  }
  return std::nullopt;
}

Vector DisturbanceModel::sample(std::int64_t t, std::size_t n, const RandomSource& src,
                                std::uint32_t stream) const {
  switch (kind_) {
    case Kind::None:
      return Vector(n, 0.0);
    case Kind::BoundedIid: {
      Vector w(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = src.uniform(stream, static_cast<std::uint32_t>(i));
        w[i] = param_ * (2.0 * u - 1.0);
      }
      return w;
    }
    case Kind::SecondMomentIid: {
      Vector w(n);
      for (std::size_t i = 0; i < n; ++i)
        w[i] = param_ * src.normal(stream, static_cast<std::uint32_t>(i));
      return w;
    }
    case Kind::ConstantScalar:
      return Vector(n, param_);
    case Kind::Custom:
      return sampler_(t, n, src);
    case Kind::Composed:
      throw std::logic_error("disturbance: composed models are sampled by the simulator");
  }
  return Vector(n, 0.0);
}

const DisturbanceModel& DisturbanceModel::plant_part() const {
  if (kind_ != Kind::Composed)
    throw std::logic_error("disturbance: plant_part only exists for composed models");
  return *plant_part_;
}

const DisturbanceModel& DisturbanceModel::control_part() const {
  if (kind_ != Kind::Composed)
    throw std::logic_error("disturbance: control_part only exists for composed models");
  return *control_part_;
}

bool replay_matches(const PlantModel& plant, const Trajectory& traj, double rel_tol) {
  const Matrix bk = plant.B * plant.K;
  for (std::size_t i = 0; i + 1 < traj.steps.size(); ++i) {
    const TrajectoryStep& cur = traj.steps[i];
    const TrajectoryStep& next = traj.steps[i + 1];
    if (next.t != cur.t + 1) continue;

    Vector pred = matvec(plant.A, cur.x);
    if (cur.l == 0) {
      const Vector fb = matvec(bk, cur.x);
      for (std::size_t k = 0; k < pred.size(); ++k) pred[k] += fb[k];
    }
    for (std::size_t k = 0; k < pred.size(); ++k) pred[k] += cur.w[k];

    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      err += (pred[k] - next.x[k]) * (pred[k] - next.x[k]);
      ref += next.x[k] * next.x[k];
    }
    if (std::sqrt(err) > rel_tol * std::max(1.0, std::sqrt(ref))) return false;
  }
  return true;
}

}  // namespace jamsim
