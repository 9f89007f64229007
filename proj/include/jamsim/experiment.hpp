#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "jamsim/sim.hpp"

namespace jamsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitComputeCap = 4;
inline constexpr int kExitIo = 5;

enum class ExperimentMode { Analyze, Simulate, VerifyBudget, ReproducePaper };

std::optional<ExperimentMode> parse_mode(const std::string& name);
const char* mode_name(ExperimentMode mode);

struct ExperimentError : std::runtime_error {
  ExperimentError(int code, const std::string& message)
      : std::runtime_error(message), exit_code(code) {}
  int exit_code;
};

struct RunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> runs;
};

/// Executes one experiment described by a JSON spec file (reproduce-paper
/// runs the built-in presets and needs no file). Outputs land in the
/// spec's output_dir unless overridden. Returns a process exit code;
/// failures raise ExperimentError carrying the matching code.
int run_experiment(ExperimentMode mode, const std::optional<std::filesystem::path>& spec_file,
                   const RunOverrides& overrides);

/// CSV with header t,mean_norm,std_err[,bound]; 17 significant digits.
void emit_moment_csv(const MomentSeries& series, const std::vector<double>* bound,
                     const std::filesystem::path& path);
/// CSV with header t,x_0..x_{n-1},v,l,xi,w_0..w_{n-1}.
void emit_trajectory_csv(const Trajectory& traj, std::size_t state_dim,
                         const std::filesystem::path& path);

MomentSeries parse_moment_csv(const std::filesystem::path& path);
Trajectory parse_trajectory_csv(const std::filesystem::path& path);

/// %.17g rendering used for every floating-point value we write.
std::string format_double(double value);

}  // namespace jamsim
