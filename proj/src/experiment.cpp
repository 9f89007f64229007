#include "jamsim/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "jamsim/presets.hpp"

namespace jamsim {

using nlohmann::json;

namespace {

constexpr std::int64_t kDefaultStepRunCap = 100'000'000;

[[noreturn]] void config_error(const std::string& message) {
  throw ExperimentError(kExitConfig, "config error: " + message);
}

const json* find_path(const json& root, const std::string& dotted) {
  const json* node = &root;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return node;
}

const json& require_field(const json& root, const std::string& dotted) {
  const json* node = find_path(root, dotted);
  if (node == nullptr) config_error(dotted + " is missing");
  return *node;
}

double require_number(const json& root, const std::string& dotted) {
  const json& node = require_field(root, dotted);
  if (!node.is_number()) config_error(dotted + " must be a number");
  return node.get<double>();
}

std::int64_t require_integer(const json& root, const std::string& dotted) {
  const json& node = require_field(root, dotted);
  if (!node.is_number_integer()) config_error(dotted + " must be an integer");
  return node.get<std::int64_t>();
}

std::string require_string(const json& root, const std::string& dotted) {
  const json& node = require_field(root, dotted);
  if (!node.is_string()) config_error(dotted + " must be a string");
  return node.get<std::string>();
}

std::optional<double> optional_number(const json& root, const std::string& dotted) {
  const json* node = find_path(root, dotted);
  if (node == nullptr || node->is_null()) return std::nullopt;
  if (!node->is_number()) config_error(dotted + " must be a number");
  return node->get<double>();
}

Matrix parse_matrix(const json& root, const std::string& dotted) {
  const json& node = require_field(root, dotted);
  if (!node.is_array() || node.empty()) config_error(dotted + " must be a nonempty array of rows");
  const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
  if (cols == 0) config_error(dotted + " rows must be nonempty arrays");
  Matrix m(node.size(), cols);
  for (std::size_t r = 0; r < node.size(); ++r) {
    if (!node[r].is_array() || node[r].size() != cols)
      config_error(dotted + " row " + std::to_string(r) + " has inconsistent length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!node[r][c].is_number())
        config_error(dotted + " entry (" + std::to_string(r) + "," + std::to_string(c) +
                     ") must be a number");
      m(r, c) = node[r][c].get<double>();
    }
  }
  return m;
}

Vector parse_vector(const json& root, const std::string& dotted) {
  const json& node = require_field(root, dotted);
  if (!node.is_array() || node.empty()) config_error(dotted + " must be a nonempty array");
  Vector v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) config_error(dotted + "[" + std::to_string(i) + "] must be a number");
    v[i] = node[i].get<double>();
  }
  return v;
}

template <typename Builder>
auto build_or_config_error(const std::string& where, Builder&& builder)
    -> decltype(builder()) {
  try {
    return builder();
  } catch (const std::invalid_argument& e) {
    config_error(where + ": " + e.what());
  }
}

PlantModel parse_plant(const json& root) {
  Matrix a = parse_matrix(root, "plant.A");
  Matrix b = parse_matrix(root, "plant.B");
  Matrix k = parse_matrix(root, "plant.K");
  Vector x0 = parse_vector(root, "plant.x0");
  return build_or_config_error("plant", [&] {
    return PlantModel(std::move(a), std::move(b), std::move(k), std::move(x0));
  });
}

ChannelParams parse_channel(const json& root) {
  const double c = require_number(root, "channel.c");
  const double xi = require_number(root, "channel.xi");
  const double sigma = require_number(root, "channel.sigma");
  return build_or_config_error("channel", [&] { return ChannelParams(c, xi, sigma); });
}

PHatEnvelope parse_envelope(const json& root, const ChannelParams& channel) {
  const double psi =
      optional_number(root, "envelope.psi").value_or(PHatEnvelope::default_psi(channel));
  return build_or_config_error("envelope", [&] { return PHatEnvelope::shifted(channel, psi); });
}

AttackStrategy parse_attack(const json& root, const ChannelParams& channel) {
  const std::string type = require_string(root, "attack.type");
  return build_or_config_error("attack", [&]() -> AttackStrategy {
    if (type == "constant") return constant_strategy(require_number(root, "attack.v"));
    if (type == "explicit") {
      std::optional<std::int64_t> period;
      if (const json* node = find_path(root, "attack.period"); node != nullptr && !node->is_null())
        period = require_integer(root, "attack.period");
      return explicit_strategy(require_integer(root, "attack.tau1"),
                               require_integer(root, "attack.tau2"),
                               require_number(root, "attack.vstar"), period);
    }
    if (type == "sleep_jam") {
      const SleepJamParams params(require_number(root, "attack.vbar"),
                                  require_number(root, "attack.rho"),
                                  require_number(root, "attack.z"),
                                  require_number(root, "attack.wstar"),
                                  require_number(root, "attack.a_scalar"));
      return sleep_jam_strategy(params, channel).strategy;
    }
    config_error("attack.type must be one of constant, explicit, sleep_jam (got " + type + ")");
  });
}

DisturbanceModel parse_disturbance(const json& root) {
  if (find_path(root, "disturbance") == nullptr) return DisturbanceModel::none();
  const std::string type = require_string(root, "disturbance.type");
  return build_or_config_error("disturbance", [&]() -> DisturbanceModel {
    if (type == "none") return DisturbanceModel::none();
    if (type == "uniform")
      return DisturbanceModel::uniform_iid(require_number(root, "disturbance.half_width"));
    if (type == "gaussian")
      return DisturbanceModel::gaussian_iid(require_number(root, "disturbance.stddev"));
    if (type == "constant")
      return DisturbanceModel::constant(require_number(root, "disturbance.value"));
    config_error("disturbance.type must be one of none, uniform, gaussian, constant (got " +
                 type + ")");
  });
}

std::optional<CountermeasureParams> parse_countermeasure(const json& root,
                                                         const ChannelParams& channel) {
  if (find_path(root, "countermeasure") == nullptr) return std::nullopt;
  const double xi_c = require_number(root, "countermeasure.xi_c");
  const auto n_c = static_cast<int>(require_integer(root, "countermeasure.n_c"));
  const auto t_c = static_cast<int>(require_integer(root, "countermeasure.t_c"));
  return build_or_config_error("countermeasure", [&] {
    return CountermeasureParams(xi_c, n_c, t_c, channel.xi);
  });
}

StabilityCondition parse_condition(const std::string& name, const std::string& field) {
  if (name == "first-moment") return StabilityCondition::FirstMomentNoDisturbance;
  if (name == "almost-sure") return StabilityCondition::AlmostSure;
  if (name == "bounded-disturbance") return StabilityCondition::BoundedDisturbance;
  if (name == "second-moment") return StabilityCondition::SecondMomentDisturbance;
  config_error(field +
               " must be one of first-moment, almost-sure, bounded-disturbance, second-moment "
               "(got " +
               name + ")");
}

void check_compute_cap(const json& root, std::int64_t horizon, std::int64_t runs) {
  std::int64_t cap = kDefaultStepRunCap;
  if (const json* node = find_path(root, "run.max_step_runs"); node != nullptr)
    cap = require_integer(root, "run.max_step_runs");
  if (horizon <= 0 || runs <= 0) config_error("run.horizon and run.runs must be positive");
  if (horizon > cap / runs)
    throw ExperimentError(kExitComputeCap,
                          "compute cap exceeded: horizon*runs = " + std::to_string(horizon) + "*" +
                              std::to_string(runs) + " > " + std::to_string(cap));
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ExperimentError(kExitIo, "cannot open " + path.string() + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw ExperimentError(kExitIo, "write failed for " + path.string());
}

std::filesystem::path prepare_out_dir(const json* root, const RunOverrides& overrides) {
  std::filesystem::path dir = ".";
  if (overrides.out_dir) {
    dir = *overrides.out_dir;
  } else if (root != nullptr) {
    if (const json* node = find_path(*root, "output_dir"); node != nullptr)
      dir = require_string(*root, "output_dir");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ExperimentError(kExitIo, "cannot create output directory " + dir.string());
  return dir;
}

struct BoundColumn {
  StabilityCertificate cert;
  double disturbance_moment = 0.0;
};

std::optional<BoundColumn> parse_bound_block(const json& root, const PlantModel& plant,
                                             const PHatEnvelope& env,
                                             const DisturbanceModel& disturbance) {
  if (find_path(root, "bound") == nullptr) return std::nullopt;
  const NormContext ctx = build_or_config_error(
      "bound.P", [&] { return NormContext::from_p_matrix(parse_matrix(root, "bound.P")); });
  const StabilityCondition cond =
      parse_condition(require_string(root, "bound.condition"), "bound.condition");
  const double kappa = require_number(root, "bound.kappa");
  const double v = require_number(root, "bound.v");

  BoundColumn out;
  try {
    switch (cond) {
      case StabilityCondition::FirstMomentNoDisturbance:
        out.cert = bound_constants_prop1(plant, ctx, env, kappa, v);
        break;
      case StabilityCondition::BoundedDisturbance:
        out.cert = bound_constants_thm1(plant, ctx, env, kappa, v);
        break;
      case StabilityCondition::SecondMomentDisturbance:
        out.cert = bound_constants_thm2(plant, ctx, env, kappa, v);
        break;
      case StabilityCondition::AlmostSure:
        config_error("bound.condition: the almost-sure condition has no first-moment bound");
    }
  } catch (const std::runtime_error& e) {
    config_error(std::string("bound: ") + e.what());
  }

  const std::size_t n = plant.state_dim();
  if (auto m = optional_number(root, "bound.disturbance_moment")) {
    out.disturbance_moment = *m;
  } else if (cond == StabilityCondition::BoundedDisturbance) {
    const auto w = disturbance.norm_bound(n);
    if (!w) config_error("bound.disturbance_moment is missing and the disturbance is unbounded");
    out.disturbance_moment = *w;
  } else if (cond == StabilityCondition::SecondMomentDisturbance) {
    const auto w = disturbance.second_moment_bound(n);
    if (!w) config_error("bound.disturbance_moment is missing for this disturbance");
    out.disturbance_moment = *w;
  }
  return out;
}

json load_spec(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ExperimentError(kExitIo, "cannot open spec file " + file.string());
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    config_error("spec file " + file.string() + " is not valid JSON: " + e.what());
  }
  if (!root.is_object()) config_error("spec file must contain a JSON object");
  return root;
}

int run_analyze(const json& root, const std::filesystem::path& out_dir) {
  const PlantModel plant = parse_plant(root);
  const ChannelParams channel = parse_channel(root);
  const PHatEnvelope env = parse_envelope(root, channel);
  const NormContext ctx = build_or_config_error(
      "analyze.P", [&] { return NormContext::from_p_matrix(parse_matrix(root, "analyze.P")); });
  const double v = require_number(root, "analyze.v");
  const double kappa = optional_number(root, "analyze.kappa").value_or(0.0);

  const std::filesystem::path path = out_dir / "certificate.txt";
  std::ofstream out = open_output(path);

  out << "condition            lhs                    holds  admissible-v\n";
  for (StabilityCondition cond :
       {StabilityCondition::FirstMomentNoDisturbance, StabilityCondition::AlmostSure,
        StabilityCondition::BoundedDisturbance, StabilityCondition::SecondMomentDisturbance}) {
    const StabilityCertificate cert = check_condition(cond, plant, ctx, env, v);
    const AdmissiblePower adm = max_admissible_v(cond, plant, ctx, env);
    char line[160];
    std::snprintf(line, sizeof line, "%-20s %-22s %-6s %s%s\n", condition_name(cond),
                  format_double(cert.lhs_value).c_str(), cert.holds ? "yes" : "no",
                  format_double(adm.value).c_str(),
                  adm.unbounded ? " (cap)" : (adm.never_stable ? " (never)" : ""));
    out << line;
  }

  const StabilityCertificate base =
      check_condition(StabilityCondition::FirstMomentNoDisturbance, plant, ctx, env, v);
  out << "\nzeta1 " << format_double(base.zeta1) << "\nzeta0 " << format_double(base.zeta0)
      << "\nc2/c1 " << format_double(ctx.c2 / ctx.c1) << "\n";

  for (StabilityCondition cond :
       {StabilityCondition::FirstMomentNoDisturbance, StabilityCondition::BoundedDisturbance,
        StabilityCondition::SecondMomentDisturbance}) {
    StabilityCertificate cert;
    try {
      switch (cond) {
        case StabilityCondition::FirstMomentNoDisturbance:
          cert = bound_constants_prop1(plant, ctx, env, kappa, v);
          break;
        case StabilityCondition::BoundedDisturbance:
          cert = bound_constants_thm1(plant, ctx, env, kappa, v);
          break;
        default:
          cert = bound_constants_thm2(plant, ctx, env, kappa, v);
          break;
      }
    } catch (const std::runtime_error&) {
      out << "\n" << condition_name(cond) << " constants: condition fails at v="
          << format_double(v) << "\n";
      continue;
    }
    const BoundConstants& k = *cert.constants;
    out << "\n" << condition_name(cond) << " constants (kappa=" << format_double(kappa)
        << ", v=" << format_double(v) << ")\n";
    out << "  theta " << format_double(k.theta_hat) << "\n";
    out << "  mu " << format_double(k.mu_hat) << " (log " << format_double(k.log_mu_hat) << ")\n";
    if (cond != StabilityCondition::FirstMomentNoDisturbance)
      out << "  gain " << format_double(k.gain) << " (log " << format_double(k.log_gain) << ")\n";
    out << "  t_star " << k.t_star << "\n";
    if (k.t_star_squared > 0) out << "  t_star_squared " << k.t_star_squared << "\n";
  }
  finish_output(out, path);
  std::printf("wrote %s\n", path.string().c_str());
  return kExitOk;
}

int run_simulate(const json& root, const std::filesystem::path& out_dir,
                 const RunOverrides& overrides) {
  const PlantModel plant = parse_plant(root);
  const ChannelParams channel = parse_channel(root);
  const PHatEnvelope env = parse_envelope(root, channel);
  const AttackStrategy attack = parse_attack(root, channel);
  const DisturbanceModel disturbance = parse_disturbance(root);
  const auto countermeasure = parse_countermeasure(root, channel);

  const std::int64_t horizon = require_integer(root, "run.horizon");
  std::int64_t runs = require_integer(root, "run.runs");
  std::uint64_t seed = 0;
  if (const json* node = find_path(root, "run.seed"); node != nullptr)
    seed = static_cast<std::uint64_t>(require_integer(root, "run.seed"));
  if (overrides.runs) runs = *overrides.runs;
  if (overrides.seed) seed = *overrides.seed;
  check_compute_cap(root, horizon, runs);

  SimConfig config{plant, channel, attack, disturbance, countermeasure,
                   horizon, runs,    seed,   {}};
  build_or_config_error("run", [&] { config.validate(); return 0; });

  const auto bound_column = parse_bound_block(root, plant, env, disturbance);

  const MomentSeries series = monte_carlo_first_moment(config);
  std::vector<double> bound;
  if (bound_column) {
    const BoundConstants& k = *bound_column->cert.constants;
    const double x0_norm = norm2(config.plant.x0);
    const double term = bound_column->cert.condition == StabilityCondition::SecondMomentDisturbance
                            ? std::sqrt(bound_column->disturbance_moment)
                            : bound_column->disturbance_moment;
    bound.reserve(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 0; t < horizon; ++t)
      bound.push_back(moment_bound_at(k, t, x0_norm, term));
  }

  const std::filesystem::path csv = out_dir / "moments.csv";
  emit_moment_csv(series, bound_column ? &bound : nullptr, csv);

  const std::filesystem::path manifest = out_dir / "manifest.txt";
  std::ofstream mf = open_output(manifest);
  mf << "base_seed " << seed << "\nruns " << runs << "\nhorizon " << horizon << "\n";
  finish_output(mf, manifest);

  if (const json* node = find_path(root, "run.emit_trajectory");
      node != nullptr && node->is_boolean() && node->get<bool>()) {
    emit_trajectory_csv(simulate_trajectory(config, 0), plant.state_dim(),
                        out_dir / "trajectory_run0.csv");
  }
  std::printf("wrote %s\n", csv.string().c_str());
  return kExitOk;
}

int run_verify_budget(const json& root, const std::filesystem::path& out_dir) {
  const ChannelParams channel = parse_channel(root);
  const AttackStrategy attack = parse_attack(root, channel);
  const std::string kind = require_string(root, "budget.kind");
  const double kappa = require_number(root, "budget.kappa");
  const double rate = require_number(root, "budget.rate");
  const std::int64_t horizon = require_integer(root, "budget.horizon");
  if (horizon < 1) config_error("budget.horizon must be positive");

  const std::vector<double> trace = attack.trace(horizon);
  BudgetCheck check;
  if (kind == "assumption1") {
    check = verify_assumption1(trace, kappa, rate);
  } else if (kind == "assumption2") {
    check = verify_assumption2(trace, kappa, rate);
  } else {
    config_error("budget.kind must be assumption1 or assumption2 (got " + kind + ")");
  }

  const std::filesystem::path path = out_dir / "budget.txt";
  std::ofstream out = open_output(path);
  out << "kind " << kind << "\nkappa " << format_double(kappa) << "\nrate "
      << format_double(rate) << "\nhorizon " << horizon << "\nresult "
      << (check.pass ? "pass" : "fail") << "\n";
  if (!check.pass) out << "violating_window [" << check.t1 << "," << check.t2 << ")\n";
  finish_output(out, path);
  std::printf("%s: %s\n", path.string().c_str(), check.pass ? "pass" : "fail");
  return check.pass ? kExitOk : kExitBudget;
}

int run_reproduce(const std::filesystem::path& out_dir, const RunOverrides& overrides) {
  const std::uint64_t seed = overrides.seed.value_or(42);
  const std::int64_t runs = overrides.runs.value_or(500);

  const PlantModel plant = presets::reference_plant();
  const ChannelParams channel = presets::reference_channel();
  const NormContext ctx = presets::reference_norm_context();
  const PHatEnvelope env = presets::reference_envelope();

  // Stability thresholds.
  const std::filesystem::path thresholds = out_dir / "thresholds.txt";
  {
    std::ofstream out = open_output(thresholds);
    out << "condition            admissible-v\n";
    for (StabilityCondition cond :
         {StabilityCondition::FirstMomentNoDisturbance, StabilityCondition::AlmostSure,
          StabilityCondition::SecondMomentDisturbance}) {
      const AdmissiblePower adm = max_admissible_v(cond, plant, ctx, env);
      char line[96];
      std::snprintf(line, sizeof line, "%-20s %s\n", condition_name(cond),
                    format_double(adm.value).c_str());
      out << line;
    }
    finish_output(out, thresholds);
  }

  // Burst-attack first moments under uniform disturbance.
  const DisturbanceModel uniform = DisturbanceModel::uniform_iid(0.5);
  const SimConfig top{plant, channel, presets::short_burst_attack(), uniform, {},
                      1200,  runs,    seed,                          {}};
  const SimConfig bottom{plant, channel, presets::long_burst_attack(), uniform, {},
                         1800,  runs,    seed + 1,                     {}};
  const MomentSeries top_series = monte_carlo_first_moment(top);
  const MomentSeries bottom_series = monte_carlo_first_moment(bottom);
  emit_moment_csv(top_series, nullptr, out_dir / "burst_short.csv");
  emit_moment_csv(bottom_series, nullptr, out_dir / "burst_long.csv");

  // Countermeasure grid against the long burst.
  const std::filesystem::path grid_path = out_dir / "countermeasure_grid.csv";
  std::ofstream grid = open_output(grid_path);
  grid << "xi_c,n_c,t_c,mean_total_norm,mean_total_power\n";
  const auto mean_of = [](const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
  };
  {
    SimConfig base = bottom;
    base.base_seed = seed + 2;
    const CumulativeTotals totals = monte_carlo_totals(base);
    grid << "0,0,0," << format_double(mean_of(totals.total_norm)) << ","
         << format_double(mean_of(totals.total_power)) << "\n";
    for (double xi_c : {6.0, 12.0})
      for (int n_c : {2, 4})
        for (int t_c : {4, 8}) {
          SimConfig cfg = base;
          cfg.countermeasure = CountermeasureParams(xi_c, n_c, t_c, channel.xi);
          const CumulativeTotals cm = monte_carlo_totals(cfg);
          grid << format_double(xi_c) << "," << n_c << "," << t_c << ","
               << format_double(mean_of(cm.total_norm)) << ","
               << format_double(mean_of(cm.total_power)) << "\n";
        }
  }
  finish_output(grid, grid_path);

  // Summary table.
  const std::filesystem::path summary_path = out_dir / "summary.txt";
  std::ofstream summary = open_output(summary_path);
  summary << "seed " << seed << "\nruns " << runs << "\n\n";
  summary << "thresholds: see thresholds.txt\n";
  const std::vector<double> top_trace = presets::short_burst_attack().trace(1000);
  const std::vector<double> bottom_trace = presets::long_burst_attack().trace(1500);
  summary << "short burst from-zero budget (0, 1.28): "
          << (verify_assumption1(top_trace, 0.0, presets::kReferenceVRate).pass ? "pass" : "fail")
          << "\n";
  summary << "long burst from-zero budget (0, 1.28): "
          << (verify_assumption1(bottom_trace, 0.0, presets::kReferenceVRate).pass ? "pass"
                                                                                   : "fail")
          << "\n";
  summary << "short burst window budget (1228.8, 1.28): "
          << (verify_assumption2(top_trace, presets::kReferenceKappaHat,
                                 presets::kReferenceVRate)
                      .pass
                  ? "pass"
                  : "fail")
          << "\n";
  summary << "long burst window budget (1228.8, 1.28): "
          << (verify_assumption2(bottom_trace, presets::kReferenceKappaHat,
                                 presets::kReferenceVRate)
                      .pass
                  ? "pass"
                  : "fail")
          << "\n";
  const auto argmax = [](const std::vector<double>& xs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (xs[i] > xs[best]) best = i;
    return best;
  };
  summary << "short burst peak mean norm " << format_double(top_series.mean_norm[argmax(
                 top_series.mean_norm)])
          << " at t=" << argmax(top_series.mean_norm) << "\n";
  summary << "long burst peak mean norm " << format_double(bottom_series.mean_norm[argmax(
                 bottom_series.mean_norm)])
          << " at t=" << argmax(bottom_series.mean_norm) << "\n";
  finish_output(summary, summary_path);

  std::printf("wrote %s\n", out_dir.string().c_str());
  return kExitOk;
}

}  // namespace

std::optional<ExperimentMode> parse_mode(const std::string& name) {
  if (name == "analyze") return ExperimentMode::Analyze;
  if (name == "simulate") return ExperimentMode::Simulate;
  if (name == "verify-budget") return ExperimentMode::VerifyBudget;
  if (name == "reproduce-paper") return ExperimentMode::ReproducePaper;
  return std::nullopt;
}

const char* mode_name(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::Analyze:
      return "analyze";
    case ExperimentMode::Simulate:
      return "simulate";
    case ExperimentMode::VerifyBudget:
      return "verify-budget";
    case ExperimentMode::ReproducePaper:
      return "reproduce-paper";
  }
  return "?";
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void emit_moment_csv(const MomentSeries& series, const std::vector<double>* bound,
                     const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "t,mean_norm,std_err";
  if (bound != nullptr) out << ",bound";
  out << "\n";
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    out << series.t[i] << "," << format_double(series.mean_norm[i]) << ","
        << format_double(series.std_err[i]);
    if (bound != nullptr) out << "," << format_double((*bound)[i]);
    out << "\n";
  }
  finish_output(out, path);
}

void emit_trajectory_csv(const Trajectory& traj, std::size_t state_dim,
                         const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "t";
  for (std::size_t i = 0; i < state_dim; ++i) out << ",x_" << i;
  out << ",v,l,xi";
  for (std::size_t i = 0; i < state_dim; ++i) out << ",w_" << i;
  out << "\n";
  for (const TrajectoryStep& step : traj.steps) {
    out << step.t;
    for (double x : step.x) out << "," << format_double(x);
    out << "," << format_double(step.v) << "," << step.l << "," << format_double(step.xi);
    for (double w : step.w) out << "," << format_double(w);
    out << "\n";
  }
  finish_output(out, path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

MomentSeries parse_moment_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExperimentError(kExitIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw ExperimentError(kExitIo, "empty moment CSV " + path.string());
  MomentSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 3)
      throw ExperimentError(kExitIo, "malformed moment CSV row in " + path.string());
    series.t.push_back(std::stoll(fields[0]));
    series.mean_norm.push_back(std::stod(fields[1]));
    series.std_err.push_back(std::stod(fields[2]));
  }
  return series;
}

Trajectory parse_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExperimentError(kExitIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw ExperimentError(kExitIo, "empty trajectory CSV " + path.string());
  const auto header = split_csv_line(line);
  std::size_t n = 0;
  for (const auto& h : header)
    if (h.rfind("x_", 0) == 0) ++n;

  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 1 + n + 3 + n)
      throw ExperimentError(kExitIo, "malformed trajectory CSV row in " + path.string());
    TrajectoryStep step;
    std::size_t i = 0;
    step.t = std::stoll(fields[i++]);
    step.x.resize(n);
    for (std::size_t k = 0; k < n; ++k) step.x[k] = std::stod(fields[i++]);
    step.v = std::stod(fields[i++]);
    step.l = std::stoi(fields[i++]);
    step.xi = std::stod(fields[i++]);
    step.w.resize(n);
    for (std::size_t k = 0; k < n; ++k) step.w[k] = std::stod(fields[i++]);
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

int run_experiment(ExperimentMode mode, const std::optional<std::filesystem::path>& spec_file,
                   const RunOverrides& overrides) {
  std::optional<json> root;
  if (spec_file) root = load_spec(*spec_file);

  if (mode != ExperimentMode::ReproducePaper && !root)
    config_error(std::string(mode_name(mode)) + " requires --spec");

  if (root && root->contains("mode")) {
    const std::string declared = require_string(*root, "mode");
    if (!parse_mode(declared)) config_error("mode must name a known mode (got " + declared + ")");
    if (declared != mode_name(mode))
      config_error("spec declares mode " + declared + " but " + mode_name(mode) +
                   " was requested");
  }

  const std::filesystem::path out_dir =
      prepare_out_dir(root ? &*root : nullptr, overrides);

  switch (mode) {
    case ExperimentMode::Analyze:
      return run_analyze(*root, out_dir);
    case ExperimentMode::Simulate:
      return run_simulate(*root, out_dir, overrides);
    case ExperimentMode::VerifyBudget:
      return run_verify_budget(*root, out_dir);
    case ExperimentMode::ReproducePaper:
      return run_reproduce(out_dir, overrides);
  }
  return kExitConfig;
}

}  // namespace jamsim
