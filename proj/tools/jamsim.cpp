#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jamsim/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Networked-control jamming simulator and stability analyzer"};
  app.require_subcommand(1);

  struct Options {
    std::string spec;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> runs;
  };

  auto add_common = [](CLI::App* sub, Options& opt, bool spec_required) {
    auto* spec_opt = sub->add_option("--spec", opt.spec, "experiment spec file (JSON)");
    if (spec_required) spec_opt->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "override the base seed");
    sub->add_option("--runs", opt.runs, "override the run count");
  };

  Options analyze_opt, simulate_opt, verify_opt, reproduce_opt;
  CLI::App* analyze = app.add_subcommand("analyze", "evaluate stability conditions and bounds");
  add_common(analyze, analyze_opt, true);
  CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo ensemble");
  add_common(simulate, simulate_opt, true);
  CLI::App* verify =
      app.add_subcommand("verify-budget", "check an attack schedule against a power budget");
  add_common(verify, verify_opt, true);
  CLI::App* reproduce =
      app.add_subcommand("reproduce-paper", "run the built-in reference study presets");
  add_common(reproduce, reproduce_opt, false);

  CLI11_PARSE(app, argc, argv);

  const auto run = [](jamsim::ExperimentMode mode, const Options& opt) {
    jamsim::RunOverrides overrides;
    if (!opt.out.empty()) overrides.out_dir = opt.out;
    overrides.seed = opt.seed;
    overrides.runs = opt.runs;
    std::optional<std::filesystem::path> spec;
    if (!opt.spec.empty()) spec = opt.spec;
    try {
      return jamsim::run_experiment(mode, spec, overrides);
    } catch (const jamsim::ExperimentError& e) {
      std::fprintf(stderr, "%s\n", e.what());
      return e.exit_code;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  };

  if (analyze->parsed()) return run(jamsim::ExperimentMode::Analyze, analyze_opt);
  if (simulate->parsed()) return run(jamsim::ExperimentMode::Simulate, simulate_opt);
  if (verify->parsed()) return run(jamsim::ExperimentMode::VerifyBudget, verify_opt);
  if (reproduce->parsed()) return run(jamsim::ExperimentMode::ReproducePaper, reproduce_opt);
  return 1;
}
