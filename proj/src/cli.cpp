#include "fwdiss/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "fwdiss/analysis.hpp"
#include "fwdiss/error.hpp"
#include "fwdiss/kernel.hpp"
#include "fwdiss/profiles.hpp"
#include "fwdiss/snapshot.hpp"

namespace fwdiss::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kBaseDefaults = R"(params.p = 2.5
params.B = 1
params.b = 1
params.mu = 1
grid.L = 256
grid.N = 16384
grid.frame = comoving
solve.t_end = 500
solve.dt = 0.05
solve.dealias = 0.66666666666666663
solve.snapshot_count = 60
solve.snapshot_t_min = 1
solve.nonlinear = true
initial.kind = gaussian
initial.amplitude = 0.05
initial.width = 1
initial.center = 0
initial.file =
initial.halve_on_instability = false
initial.max_halvings = 4
kernel.t_min = 10
kernel.t_max = 1000
kernel.samples = 30
kernel.q_list = 2
kernel.l_list = 0
kernel.orders = 1, 2
kernel.L = 400
kernel.N = 8192
profile.M = 1
profile.t_list = 1, 4, 16
profile.x_list = 0, 0.5, -0.5, 1, -1, 2, -2
profile.L = 64
profile.N = 8192
report.q_list = 2, inf
report.trajectory =
verify.slope_tol = 0.05
verify.duhamel_tol = 0.0001
verify.w_tol = 1e-07
verify.decay_fraction = 0.5
verify.critical_decay_fraction = 1
verify.corollary_tol = 0.2
verify.t_transient = 10
verify.window_decades = 2
verify.require_all = false
)";

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

Params read_params(const KeyValues& kv) {
  Params pr{kv.get_double("params.p", 2.5), kv.get_double("params.B", 1.0), kv.get_double("params.b", 1.0),
            kv.get_double("params.mu", 1.0)};
  pr.validate();
  return pr;
}

Grid read_grid(const KeyValues& kv, const std::string& prefix, Frame frame) {
  const long long n = kv.get_int(prefix + ".N", 0);
  if (n <= 0) throw ConfigError(prefix + ".N must be positive");
  return Grid(kv.get_double(prefix + ".L", 0.0), static_cast<std::size_t>(n), frame);
}

std::vector<int> read_ints(const KeyValues& kv, const std::string& key) {
  std::vector<int> out;
  for (double v : kv.get_doubles(key, {})) {
    if (v != std::floor(v)) throw ConfigError(key + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> read_list(const KeyValues& kv, const std::string& key) {
  auto v = kv.get_doubles(key, {});
  if (v.empty()) throw ConfigError(key + ": empty list");
  return v;
}

analysis::ReportOptions report_options(const KeyValues& kv) {
  analysis::ReportOptions o;
  o.decay_fraction = kv.get_double("verify.decay_fraction", o.decay_fraction);
  o.critical_decay_fraction = kv.get_double("verify.critical_decay_fraction", o.critical_decay_fraction);
  o.corollary_tol = kv.get_double("verify.corollary_tol", o.corollary_tol);
  o.slope_tol = kv.get_double("verify.slope_tol", o.slope_tol);
  o.t_transient = kv.get_double("verify.t_transient", o.t_transient);
  o.window_decades = kv.get_double("verify.window_decades", o.window_decades);
  o.require_all = kv.get_bool("verify.require_all", o.require_all);
  return o;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

void write_manifest(KeyValues kv, const fs::path& out, std::string_view command, const KeyValues& results) {
  kv.set("run.command", std::string(command));
  kv.merge(results);
  kv.save(out / "manifest.txt");
}

struct SolveOutcome {
  solver::Trajectory traj;
  Field u0;
  analysis::Constants constants;
};

SolveOutcome run_solve(KeyValues& kv, KeyValues& results, std::ostream& log) {
  solver::SolveConfig config = solve_config(kv);
  const bool halve = kv.get_bool("initial.halve_on_instability", false);
  const long long max_halvings = kv.get_int("initial.max_halvings", 4);
  KeyValues data = kv;
  double amplitude = kv.get_double("initial.amplitude", 0.05);
  for (long long halvings = 0;; ++halvings) {
    data.set("initial.amplitude", amplitude);
    Field u0 = initial_data(data, config.grid, config.params);
    try {
      log << "simulate: p = " << format_double(config.params.p) << ", N = " << config.grid.size()
          << ", t_end = " << format_double(config.t_end) << ", dt = " << format_double(config.dt) << '\n';
      solver::Trajectory traj = solver::integrate(u0, config);
      const bool want_calM = config.params.p > 3.0 && config.accumulate_calM;
      analysis::Constants c = analysis::compute_constants(u0, want_calM ? &traj : nullptr, config.params);
      results.set("result.amplitude_used", amplitude);
      results.set("result.halvings", halvings);
      results.set("result.M", c.M);
      results.set("result.m", c.m);
      results.set("result.truncation_warning", c.truncation_warning);
      if (c.calM) {
        results.set("result.calM", *c.calM);
        results.set("result.calM_partial", traj.calM_partial);
        results.set("result.calM_tail", traj.calM_tail);
      }
      const auto& last = traj.snapshots.back();
      results.set("result.final_t", last.t);
      results.set("result.final_mass", moment(last.field, 0).value);
      return {std::move(traj), std::move(u0), c};
    } catch (const StabilityError& e) {
      if (!halve || halvings >= max_halvings) throw;
      log << "simulate: " << e.what() << "; halving the amplitude\n";
      amplitude *= 0.5;
    }
  }
}

int finish_report(const analysis::RegimeReport& report, KeyValues kv, const fs::path& out,
                  std::string_view command, KeyValues results, std::ostream& log) {
  const KeyValues rkv = analysis::to_keyvalues(report);
  rkv.save(out / "report.txt");
  write_text(out / "report.csv", analysis::to_csv(report));
  for (const auto& q : report.per_q) {
    log << command << ": q = " << kernel::format_q(q.q) << " decay_ratio = " << format_double(q.decay_ratio);
    if (q.bound_slope) log << " bound_slope = " << format_double(*q.bound_slope);
    if (!q.corollary_skipped) log << " corollary_rel_error = " << format_double(q.corollary_rel_error);
    log << " measured_slope = " << format_double(q.fit.slope) << " predicted_slope = "
        << format_double(q.predicted_slope) << ' ' << pass_fail(q.verdict) << '\n';
  }
  results.set("result.verdict", pass_fail(report.verdict));
  write_manifest(std::move(kv), out, command, results);
  log << command << ": " << pass_fail(report.verdict) << '\n';
  return report.verdict ? 0 : 2;
}

analysis::RegimeReport build_report(const solver::Trajectory& traj, const analysis::Constants& c,
                                    const KeyValues& kv) {
  const Params& pr = traj.config.params;
  const double calM = c.calM.value_or(0.0);
  const auto spec = profiles::make_spec(pr, c.M, c.m, calM);
  const auto qs = read_list(kv, "report.q_list");
  return analysis::theorem_report(traj, spec, qs, report_options(kv));
}

}  // namespace

std::vector<std::string> commands() {
  return {"kernel-verify", "profile-verify", "simulate", "theorem-verify", "report"};
}

std::vector<std::string> preset_names() { return {"default", "kernel", "subcritical", "critical", "supercritical"}; }

KeyValues preset(std::string_view name) {
  KeyValues kv = KeyValues::parse(kBaseDefaults);
  if (name == "default" || name == "kernel" || name == "subcritical") {
    kv.set("params.p", 2.5);
  } else if (name == "critical") {
    kv.set("params.p", 3.0);
  } else if (name == "supercritical") {
    kv.set("params.p", 4.0);
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  kv.set("run.preset", std::string(name));
  return kv;
}

std::string tolerance_key(std::string_view command) {
  if (command == "kernel-verify") return "verify.slope_tol";
  if (command == "profile-verify") return "verify.duhamel_tol";
  if (command == "theorem-verify" || command == "report") return "verify.corollary_tol";
  if (command == "simulate") return "";
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

KeyValues resolve(const Options& options) {
  KeyValues kv = preset(options.preset);
  if (options.config) {
    KeyValues file = KeyValues::load(*options.config);
    file.erase_prefix("result.");
    file.erase_prefix("run.");
    kv.merge(file);
  }
  if (options.tolerance) {
    const std::string key = tolerance_key(options.command);
    if (key.empty()) throw ConfigError(options.command + " takes no --tolerance");
    if (!(*options.tolerance > 0.0)) throw ConfigError("--tolerance must be positive");
    kv.set(key, *options.tolerance);
  }
  return kv;
}

std::vector<double> log_spaced(double t0, double t1, long long n) {
  if (n < 1) throw ConfigError("log_spaced: need at least one sample");
  if (!(t0 > 0.0) || !(t1 >= t0)) throw ConfigError("log_spaced: need 0 < t0 <= t1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        n == 1 ? t0 : t0 * std::pow(t1 / t0, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.back() = n == 1 ? t0 : t1;
  return out;
}

Field initial_data(const KeyValues& kv, const Grid& grid, const Params& params) {
  const std::string kind = kv.get_string("initial.kind", "gaussian");
  if (kind == "custom") {
    const std::string file = kv.get_string("initial.file", "");
    if (file.empty()) throw ConfigError("initial.kind = custom needs initial.file");
    Snapshot s = read_snapshot(file);
    if (!(s.field.grid() == grid)) throw ConfigError(file + ": grid differs from grid.*");
    return std::move(s.field);
  }
  const double a = kv.get_double("initial.amplitude", 0.05);
  const double w = kv.get_double("initial.width", 1.0);
  const double c = kv.get_double("initial.center", 0.0);
  if (!std::isfinite(a)) throw ConfigError("initial.amplitude must be finite");
  if (!(w > 0.0)) throw ConfigError("initial.width must be positive");
  int l = 0;
  if (kind == "dipole") {
    l = 1;
  } else if (kind != "gaussian") {
    throw ConfigError("initial.kind must be gaussian, dipole or custom, got '" + kind + "'");
  }
  return Field::sample(grid, [&](double x) { return a * kernel::gauss_deriv(x - c, w, params.mu, l); });
}

solver::SolveConfig solve_config(KeyValues& kv) {
  auto times = kv.get_doubles("solve.snapshot_times", {});
  if (times.empty()) {
    const double t_end = kv.get_double("solve.t_end", 1.0);
    const double t_min = std::min(kv.get_double("solve.snapshot_t_min", 1.0), t_end);
    times = log_spaced(t_min, t_end, kv.get_int("solve.snapshot_count", 60));
    times.insert(times.begin(), 0.0);
    kv.set("solve.snapshot_times", times);
  }
  if (!kv.contains("solve.accumulate_calM")) kv.set("solve.accumulate_calM", kv.get_double("params.p", 2.5) > 3.0);
  return solver::read_config(kv);
}

int cmd_kernel_verify(KeyValues kv, const fs::path& out, std::ostream& log) {
  const Params pr = read_params(kv);
  const Grid grid = read_grid(kv, "kernel", Frame::comoving);
  const auto ts = log_spaced(kv.get_double("kernel.t_min", 10.0), kv.get_double("kernel.t_max", 1000.0),
                             kv.get_int("kernel.samples", 30));
  const auto qs = read_list(kv, "kernel.q_list");
  const auto ls = read_ints(kv, "kernel.l_list");
  const auto orders = read_ints(kv, "kernel.orders");
  const double tol = kv.get_double("verify.slope_tol", 0.05);

  std::string gaps = kernel::gap_csv_header() + "\n";
  std::string rates = "order,l,q,predicted_slope,measured_slope,residual_rms,verdict\n";
  KeyValues results;
  bool all = true;
  for (int order : orders) {
    for (int l : ls) {
      for (double q : qs) {
        std::vector<analysis::Sample> samples;
        for (double t : ts) {
          const kernel::GapRow row = kernel::gap_row(t, l, q, order, pr, grid);
          gaps += kernel::to_csv(row) + "\n";
          samples.push_back({t, row.gap});
        }
        const analysis::RateFit fit = analysis::rate_fit(samples, ts.front(), ts.back());
        const double predicted = kernel::gap_exponent(q, l, order);
        const bool ok = std::abs(fit.slope - predicted) <= tol;
        all = all && ok;
        const std::string name =
            "kernel.order" + std::to_string(order) + ".l" + std::to_string(l) + ".q" + kernel::format_q(q);
        rates += std::to_string(order) + "," + std::to_string(l) + "," + kernel::format_q(q) + "," +
                 format_double(predicted) + "," + format_double(fit.slope) + "," +
                 format_double(fit.residual_rms) + "," + pass_fail(ok) + "\n";
        results.set("result." + name + ".slope", fit.slope);
        results.set("result." + name + ".predicted", predicted);
        results.set("result." + name + ".verdict", pass_fail(ok));
        log << "kernel-verify: " << pass_fail(ok) << ' ' << name << " slope = " << format_double(fit.slope)
            << " predicted = " << format_double(predicted) << " tolerance = " << format_double(tol) << '\n';
      }
    }
  }
  write_text(out / "kernel_gaps.csv", gaps);
  write_text(out / "kernel_rates.csv", rates);
  results.set("result.verdict", pass_fail(all));
  write_manifest(std::move(kv), out, "kernel-verify", results);
  return all ? 0 : 2;
}

int cmd_profile_verify(KeyValues kv, const fs::path& out, std::ostream& log) {
  const Params pr = read_params(kv);
  const Grid grid = read_grid(kv, "profile", Frame::comoving);
  const double M = kv.get_double("profile.M", 1.0);
  const double duhamel_tol = kv.get_double("verify.duhamel_tol", 1e-4);
  const double w_tol = kv.get_double("verify.w_tol", 1e-7);
  KeyValues results;
  bool all = true;

  std::string wcsv = "x,reduced,definitional,abs_diff,verdict\n";
  for (double x : read_list(kv, "profile.x_list")) {
    const double reduced = profiles::w_p(x, pr);
    const double direct = profiles::w_p_definitional(x, pr);
    const double diff = std::abs(reduced - direct);
    const bool ok = diff <= w_tol;
    all = all && ok;
    wcsv += format_double(x) + "," + format_double(reduced) + "," + format_double(direct) + "," +
            format_double(diff) + "," + pass_fail(ok) + "\n";
    log << "profile-verify: " << pass_fail(ok) << " w_p(" << format_double(x) << ") reduced = "
        << format_double(reduced) << " definitional = " << format_double(direct) << '\n';
  }
  write_text(out / "w_p_oracle.csv", wcsv);

  const auto spec = profiles::make_spec(pr, M);
  std::string dcsv = "t,distance,reference_norm,relative,singularity_warning,verdict\n";
  for (double t : read_list(kv, "profile.t_list")) {
    const profiles::SelfSimilarCheck c = profiles::duhamel_selfsim_check(t, spec, grid);
    const bool ok = c.relative <= duhamel_tol;
    all = all && ok;
    dcsv += format_double(t) + "," + format_double(c.distance) + "," + format_double(c.reference_norm) + "," +
            format_double(c.relative) + "," + (c.singularity_warning ? "1" : "0") + "," + pass_fail(ok) + "\n";
    results.set("result.duhamel.t" + format_double(t) + ".relative", c.relative);
    log << "profile-verify: " << pass_fail(ok) << " duhamel t = " << format_double(t)
        << " relative = " << format_double(c.relative) << '\n';
  }
  write_text(out / "duhamel.csv", dcsv);
  results.set("result.verdict", pass_fail(all));
  write_manifest(std::move(kv), out, "profile-verify", results);
  return all ? 0 : 2;
}

int cmd_simulate(KeyValues kv, const fs::path& out, std::ostream& log) {
  KeyValues results;
  SolveOutcome s = run_solve(kv, results, log);
  solver::save_trajectory(out / "trajectory", s.traj);
  write_manifest(std::move(kv), out, "simulate", results);
  log << "simulate: M = " << format_double(s.constants.M) << " m = " << format_double(s.constants.m);
  if (s.constants.calM) log << " calM = " << format_double(*s.constants.calM);
  log << '\n';
  return 0;
}

int cmd_theorem_verify(KeyValues kv, const fs::path& out, std::ostream& log) {
  KeyValues results;
  SolveOutcome s = run_solve(kv, results, log);
  solver::save_trajectory(out / "trajectory", s.traj);
  const analysis::RegimeReport report = build_report(s.traj, s.constants, kv);
  return finish_report(report, std::move(kv), out, "theorem-verify", std::move(results), log);
}

int cmd_report(KeyValues kv, const fs::path& out, std::ostream& log) {
  std::string dir = kv.get_string("report.trajectory", "");
  const fs::path path = dir.empty() ? out / "trajectory" : fs::path(dir);
  const solver::Trajectory traj = solver::load_trajectory(path);
  if (traj.snapshots.empty() || traj.snapshots.front().t != 0.0) {
    throw ConfigError(path.string() + ": report needs the t = 0 snapshot for M and m");
  }
  const Params& pr = traj.config.params;
  const bool want_calM = pr.p > 3.0 && traj.config.accumulate_calM;
  const analysis::Constants c =
      analysis::compute_constants(traj.snapshots.front().field, want_calM ? &traj : nullptr, pr);
  KeyValues results;
  results.set("result.M", c.M);
  results.set("result.m", c.m);
  if (c.calM) results.set("result.calM", *c.calM);
  kv.set("report.trajectory", path.string());
  const analysis::RegimeReport report = build_report(traj, c, kv);
  return finish_report(report, std::move(kv), out, "report", std::move(results), log);
}

int dispatch(const Options& options, std::ostream& log, std::ostream& err) {
  try {
    KeyValues kv = resolve(options);
    fs::create_directories(options.out);
    if (options.command == "kernel-verify") return cmd_kernel_verify(std::move(kv), options.out, log);
    if (options.command == "profile-verify") return cmd_profile_verify(std::move(kv), options.out, log);
    if (options.command == "simulate") return cmd_simulate(std::move(kv), options.out, log);
    if (options.command == "theorem-verify") return cmd_theorem_verify(std::move(kv), options.out, log);
    if (options.command == "report") return cmd_report(std::move(kv), options.out, log);
    throw ConfigError("unknown command '" + options.command + "'");
  } catch (const Error& e) {
    err << options.command << ": error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const fs::filesystem_error& e) {
    err << options.command << ": error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::configuration);
  } catch (const std::exception& e) {
    err << options.command << ": error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical);
  }
}

}  // namespace fwdiss::cli
