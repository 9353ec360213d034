#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fwdiss/core.hpp"
#include "fwdiss/error.hpp"
#include "fwdiss/keyvalue.hpp"
#include "fwdiss/solver.hpp"

namespace fwdiss::cli {

struct Options {
  std::string command;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = "fwdiss_out";
  std::optional<double> tolerance;
  std::string preset = "default";
};

[[nodiscard]] std::vector<std::string> commands();
[[nodiscard]] std::vector<std::string> preset_names();

/// Built-in settings; every key any command reads has a value here.
/// Throws ConfigError on an unknown name.
[[nodiscard]] KeyValues preset(std::string_view name);

/// Preset, then the config file (run.* and result.* keys dropped), then
/// --tolerance written to the command's tolerance key.
[[nodiscard]] KeyValues resolve(const Options& options);

/// Key that --tolerance overrides for a command.
[[nodiscard]] std::string tolerance_key(std::string_view command);

/// n log-spaced times from t0 to t1 (just t0 when n == 1).
[[nodiscard]] std::vector<double> log_spaced(double t0, double t1, long long n);

/// gaussian: a G(x - c, w); dipole: a d_x G(x - c, w); custom: FWS1 file on the same grid.
[[nodiscard]] Field initial_data(const KeyValues& kv, const Grid& grid, const Params& params);

/// Solve settings with snapshot times filled in: t = 0 plus solve.snapshot_count
/// log-spaced times from solve.snapshot_t_min to t_end unless listed explicitly.
/// The resolved list is written back to kv.
[[nodiscard]] solver::SolveConfig solve_config(KeyValues& kv);

/// Each command writes into `out` and returns an exit code
/// (0 pass, 2 verification failure). Library errors propagate.
int cmd_kernel_verify(KeyValues kv, const std::filesystem::path& out, std::ostream& log);
int cmd_profile_verify(KeyValues kv, const std::filesystem::path& out, std::ostream& log);
int cmd_simulate(KeyValues kv, const std::filesystem::path& out, std::ostream& log);
int cmd_theorem_verify(KeyValues kv, const std::filesystem::path& out, std::ostream& log);
int cmd_report(KeyValues kv, const std::filesystem::path& out, std::ostream& log);

/// Resolves the configuration, runs the command and maps errors to exit
/// codes (3 configuration, 4 numerical).
int dispatch(const Options& options, std::ostream& log, std::ostream& err);

}  // namespace fwdiss::cli
