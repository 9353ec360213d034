#pragma once

#include <filesystem>
#include <vector>

#include "fwdiss/core.hpp"
#include "fwdiss/keyvalue.hpp"

namespace fwdiss::solver {

struct SolveConfig {
  Params params;
  Grid grid{64.0, 1024};
  double t_end = 1.0;
  double dt = 0.01;
  /// Fraction of the wavenumber range kept in the nonlinear term.
  double dealias = 2.0 / 3.0;
  std::vector<double> snapshot_times;
  bool accumulate_calM = false;
  /// Test hook: false drops the nonlinear term, leaving the exact propagator.
  bool nonlinear = true;

  /// Throws ConfigError on dt <= 0, dt > t_end, dealias outside (0.5, 1],
  /// or snapshot times not sorted within [0, t_end].
  void validate() const;
};

struct TimedField {
  double t = 0.0;
  Field field;
};

/// Per-step record, taken from the state at the start of each step.
struct DiagnosticRow {
  double t = 0.0;
  double mass = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double calM_partial = 0.0;
};

struct Trajectory {
  SolveConfig config;
  std::vector<TimedField> snapshots;
  std::vector<DiagnosticRow> diagnostics;
  /// Trapezoid-rule value of int_0^t_end int sign(u)|u|^p dy dtau.
  double calM_partial = 0.0;
  /// Analytic tail int_{t_end}^inf C tau^{-(p-1)/2} dtau with C fit over the
  /// last decade; NaN unless p > 3 and enough samples exist.
  double calM_tail = 0.0;
  [[nodiscard]] double calM() const noexcept { return calM_partial + calM_tail; }
};

/// -d/dx (sign(u)|u|^p), differentiated spectrally with the dealias mask.
[[nodiscard]] Field nonlinear_term(const Field& u, const Params& params, double dealias = 2.0 / 3.0);

/// Fourth-order exponential time differencing (Cox-Matthews) with the
/// linear part applied through the exact symbol. Steps are shortened to land
/// on snapshot times. Throws StabilityError on blow-up and ConsistencyError
/// on mass drift beyond 1e-8 |M(0)| + 1e-12.
[[nodiscard]] Trajectory integrate(const Field& u0, const SolveConfig& config);

/// Nodes whose spectral tail (outer 10% of wavenumbers) stays below
/// 1e-12 of the peak coefficient.
[[nodiscard]] bool spectrum_resolved(const Field& u);

struct PicardOptions {
  /// Uniform tau-steps on [0, t]; 0 picks max(64, ceil(t / 0.005)).
  int tau_steps = 0;
  double tolerance = 1e-9;
  double dealias = 2.0 / 3.0;
};

struct PicardResult {
  Field solution;
  int iterations = 0;
  bool converged = false;
  /// ||u_{k+1} - u_k|| / ||u_k - u_{k-1}|| per iteration (sup over the tau grid).
  std::vector<double> contraction_ratios;
  /// Relative L^2 change per iteration.
  std::vector<double> increments;
};

/// Fixed point of u(t) = T(t)*u0 - int_0^t d_x T(t - tau) * (|u|^{p-1}u)(tau) dtau
/// on a uniform tau grid with the exponential trapezoid rule. Iterate 0 is
/// the linear solution. Throws DivergenceError when the contraction ratio
/// is >= 1 for 3 consecutive iterations; returns converged = false when
/// max_iter is exhausted.
[[nodiscard]] PicardResult picard_solve(const Field& u0, double t, const Params& params,
                                        const Grid& grid, int max_iter,
                                        const PicardOptions& options = {});

/// Relative L^2 distance ||a - b|| / ||b||.
[[nodiscard]] double relative_l2(const Field& a, const Field& b);

/// Trajectory directory: config.txt, snap_NNNN.fws, diagnostics.csv.
void save_trajectory(const std::filesystem::path& dir, const Trajectory& traj);
[[nodiscard]] Trajectory load_trajectory(const std::filesystem::path& dir);

/// Key-value form of a SolveConfig (params.*, grid.*, solve.* keys).
void write_config(KeyValues& kv, const SolveConfig& config);
[[nodiscard]] SolveConfig read_config(const KeyValues& kv);

[[nodiscard]] std::string diagnostics_csv_header();

}  // namespace fwdiss::solver
