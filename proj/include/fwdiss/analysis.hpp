#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fwdiss/core.hpp"
#include "fwdiss/keyvalue.hpp"
#include "fwdiss/profiles.hpp"
#include "fwdiss/solver.hpp"

namespace fwdiss::analysis {

struct Sample {
  double t = 0.0;
  double value = 0.0;
};

/// Least-squares line through (log t, log value) on a window.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double residual_rms = 0.0;
  bool with_log_factor = false;
  int points = 0;
};

/// Fits samples with t in [t_min, t_max]. with_log_factor divides each value
/// by log t first. Throws DomainError on nonpositive values (or t <= 1 with
/// the log factor) and InsufficientDataError on fewer than 8 points.
[[nodiscard]] RateFit rate_fit(std::span<const Sample> samples, double t_min, double t_max,
                               bool with_log_factor = false);

struct Constants {
  double M = 0.0;
  double m = 0.0;
  std::optional<double> calM;
  /// Initial data not decayed to 1e-10 of its peak at the box edge.
  bool truncation_warning = false;
};

/// M and m from u0; calM = traj.calM_partial + traj.calM_tail when a
/// trajectory is given. Requesting calM with p <= 3 throws ConfigError.
[[nodiscard]] Constants compute_constants(const Field& u0, const solver::Trajectory* traj,
                                          const Params& params);

struct HeatExpansionResult {
  /// Fit of ||G0(t)*u0 - M G0 + m d_x G0||_q.
  RateFit fit;
  double predicted_limit_rate = 0.0;  // -(1/2)(1-1/q) - 1/2; the residual must decay faster
  std::vector<Sample> residual;
  /// max_t t^{(1/2)(1-1/q)+1/2} ||G0(t)*u0 - M G0||_q / ||x u0||_1.
  double first_order_bound = 0.0;
};

/// Second-order heat expansion of G0(t) * u0 (convolution done spectrally).
[[nodiscard]] HeatExpansionResult heat_expansion_check(const Field& u0, const Params& params,
                                                       std::span<const double> t_list, double q);

/// Fit of ||u(., t)||_q over the trajectory snapshots in [t_min, t_max].
[[nodiscard]] RateFit solution_decay_fit(const solver::Trajectory& traj, double q, double t_min,
                                         double t_max);

struct ReportOptions {
  /// Limit statements pass when scaled(t_end) <= fraction * scaled(t_end / 10).
  double decay_fraction = 0.5;
  double critical_decay_fraction = 1.0;
  double corollary_tol = 0.2;
  double slope_tol = 0.05;
  double t_transient = 10.0;
  /// Window is [max(t_transient, t_end / 10^decades), t_end].
  double window_decades = 2.0;
  /// true: a q passes only if every check passes; false: the limit check or
  /// the limit constant suffices.
  bool require_all = false;
};

struct QReport {
  double q = 2.0;
  /// Decay of ||u - M G0||_q (divided by log t in the critical regime).
  double predicted_slope = 0.0;
  RateFit fit;
  /// Limit sequence: ||u - profile||_q and its scaled value per window time.
  std::vector<double> times;
  std::vector<double> raw_norm;
  std::vector<double> scaled_norm;
  double decay_ratio = 0.0;  // scaled at t_end over scaled near t_end / 10
  bool monotone = false;
  bool limit_pass = false;
  /// Critical regime: slope of t^{rate} ||u - profile||_q without the log division.
  std::optional<double> bound_slope;
  bool bound_pass = true;
  /// ||u - M G0||_q t^{rate} (/ log t) at the final time and its predicted limit.
  double corollary_final = 0.0;
  double corollary_predicted = 0.0;
  double corollary_rel_error = 0.0;
  bool corollary_skipped = false;
  bool corollary_pass = false;
  bool slope_pass = false;
  bool verdict = false;
};

struct RegimeReport {
  profiles::Regime regime = profiles::Regime::subcritical;
  profiles::ProfileSpec spec;
  ReportOptions options;
  double t_min = 0.0;
  double t_max = 0.0;
  double calM_partial = 0.0;
  double calM_tail = 0.0;
  /// M == 0: the leading profile vanishes and limit constants are skipped.
  bool degenerate = false;
  std::vector<QReport> per_q;
  bool verdict = false;
};

/// Power of t that normalizes ||u - profile||_q in the given regime.
[[nodiscard]] double limit_rate(profiles::Regime regime, double p, double q);

/// Predicted limit of ||u - M G0||_q t^{rate} (/ log t for p = 3).
[[nodiscard]] double corollary_constant(const profiles::ProfileSpec& spec, double q);

[[nodiscard]] RegimeReport theorem_report(const solver::Trajectory& traj,
                                          const profiles::ProfileSpec& spec,
                                          std::span<const double> q_list,
                                          const ReportOptions& options = {});

[[nodiscard]] KeyValues to_keyvalues(const RegimeReport& report);
/// Rows "t,q,raw_norm,scaled_norm".
[[nodiscard]] std::string to_csv(const RegimeReport& report);
[[nodiscard]] std::string report_csv_header();

}  // namespace fwdiss::analysis
