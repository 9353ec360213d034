#include "fwdiss/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fwdiss/error.hpp"
#include "fwdiss/kernel.hpp"

namespace fwdiss::analysis {

using profiles::Regime;

namespace {

double log_distance(double a, double b) { return std::abs(std::log(a) - std::log(b)); }

std::string q_key(double q) { return "q." + kernel::format_q(q); }

// Grid for the limit-constant norms of d^l G(., 1).
Grid unit_time_grid(double mu) { return Grid(30.0 * std::sqrt(mu), 8192, Frame::comoving); }

}  // namespace

RateFit rate_fit(std::span<const Sample> samples, double t_min, double t_max, bool with_log_factor) {
  if (t_min > t_max) throw DomainError("rate_fit: window has t_min > t_max");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const Sample& s : samples) {
    if (s.t < t_min || s.t > t_max) continue;
    double v = s.value;
    if (!(s.t > 0.0)) throw DomainError("rate_fit: times must be positive");
    if (with_log_factor) {
      if (!(s.t > 1.0)) throw DomainError("rate_fit: log factor needs t > 1");
      v /= std::log(s.t);
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "rate_fit: nonpositive value " << s.value << " at t = " << s.t;
      throw DomainError(msg.str());
    }
    xs.push_back(std::log(s.t));
    ys.push_back(std::log(v));
  }
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 8) {
    throw InsufficientDataError("rate_fit: " + std::to_string(xs.size()) +
                                " samples in window, need at least 8");
  }
  if (!(t_min < t_max)) throw InsufficientDataError("rate_fit: window needs t_min < t_max");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("rate_fit: all samples share one time");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / n);
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.with_log_factor = with_log_factor;
  fit.points = static_cast<int>(xs.size());
  return fit;
}

Constants compute_constants(const Field& u0, const solver::Trajectory* traj, const Params& params) {
  params.validate();
  const auto m0 = moment(u0, 0);
  const auto m1 = moment(u0, 1);
  Constants c{m0.value, m1.value, std::nullopt, m0.truncation_warning || m1.truncation_warning};
  if (traj) {
    if (!(params.p > 3.0)) {
      throw ConfigError("compute_constants: the nonlinear mass is only defined for p > 3");
    }
    if (!traj->config.accumulate_calM) {
      throw ConfigError("compute_constants: trajectory did not accumulate the nonlinear mass");
    }
    c.calM = traj->calM();
  }
  return c;
}

HeatExpansionResult heat_expansion_check(const Field& u0, const Params& params,
                                         std::span<const double> t_list, double q) {
  params.validate();
  if (!decays_at_boundary(u0.values())) {
    throw DomainError("heat_expansion_check: x u0 is not integrable on the grid (no decay at the edge)");
  }
  const Grid& grid = u0.grid();
  const double M = moment(u0, 0).value;
  const double m = moment(u0, 1).value;
  double xu1 = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) xu1 += std::abs(grid.x(j) * u0[j]) * grid.dx();

  const Spectrum base = transform(u0);
  HeatExpansionResult out;
  out.predicted_limit_rate = -(kernel::heat_rate(q) + 0.5);
  for (double t : t_list) {
    if (!(t > 0.0)) throw DomainError("heat_expansion_check: times must be positive");
    Spectrum s = base;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double xi = s.wavenumber(i);
      cplx factor = std::exp(-params.mu * t * xi * xi);
      if (grid.frame() == Frame::lab) factor *= std::polar(1.0, -params.drift_speed() * t * xi);
      s.coeffs()[i] *= factor;
    }
    const Field conv = inverse_transform(s);
    Field first = conv - M * kernel::sample_g0(grid, t, params, 0);
    const Field second = first + m * kernel::sample_g0(grid, t, params, 1);
    out.residual.push_back({t, lq_norm(second, q)});
    if (xu1 > 0.0) {
      out.first_order_bound = std::max(
          out.first_order_bound, lq_norm(first, q) * std::pow(t, kernel::heat_rate(q) + 0.5) / xu1);
    }
  }
  if (out.residual.empty()) throw InsufficientDataError("heat_expansion_check: empty time list");
  const auto [lo, hi] = std::minmax_element(t_list.begin(), t_list.end());
  out.fit = rate_fit(out.residual, *lo, *hi, false);
  return out;
}

RateFit solution_decay_fit(const solver::Trajectory& traj, double q, double t_min, double t_max) {
  std::vector<Sample> samples;
  for (const auto& s : traj.snapshots) {
    if (s.t >= t_min && s.t <= t_max && s.t > 0.0) samples.push_back({s.t, lq_norm(s.field, q)});
  }
  return rate_fit(samples, t_min, t_max, false);
}

double limit_rate(Regime regime, double p, double q) {
  switch (regime) {
    case Regime::subcritical:
      return kernel::heat_rate(q) + (p - 2.0) / 2.0;
    case Regime::critical:
    case Regime::supercritical:
      return kernel::heat_rate(q) + 0.5;
  }
  return 0.0;
}

double corollary_constant(const profiles::ProfileSpec& spec, double q) {
  spec.validate();
  const Params& pr = spec.params;
  const Grid g = unit_time_grid(pr.mu);
  switch (spec.regime) {
    case Regime::subcritical:
      return std::pow(std::abs(spec.M), pr.p) * profiles::w_p_norm(pr, q);
    case Regime::critical: {
      const Field dg = Field::sample(g, [&](double x) { return kernel::gauss_deriv(x, 1.0, pr.mu, 1); });
      return std::pow(std::abs(spec.M), 3) / (4.0 * std::sqrt(3.0) * kPi * pr.mu) * lq_norm(dg, q);
    }
    case Regime::supercritical: {
      const double kdv = 2.0 * pr.B * spec.M / (pr.b * pr.b * pr.b);
      const Field f = Field::sample(g, [&](double x) {
        return (spec.m + spec.calM) * kernel::gauss_deriv(x, 1.0, pr.mu, 1) +
               kdv * kernel::gauss_deriv(x, 1.0, pr.mu, 3);
      });
      return lq_norm(f, q);
    }
  }
  return 0.0;
}

RegimeReport theorem_report(const solver::Trajectory& traj, const profiles::ProfileSpec& spec,
                            std::span<const double> q_list, const ReportOptions& options) {
  spec.validate();
  const Params& pr = traj.config.params;
  if (pr.p != spec.params.p || pr.B != spec.params.B || pr.b != spec.params.b || pr.mu != spec.params.mu) {
    throw ConfigError("theorem_report: profile parameters differ from the trajectory's");
  }
  if (profiles::regime_for(pr.p) != spec.regime) throw ConfigError("theorem_report: regime mismatch");
  if (traj.snapshots.empty()) throw InsufficientDataError("theorem_report: trajectory has no snapshots");
  if (q_list.empty()) throw ConfigError("theorem_report: empty q list");

  RegimeReport report;
  report.regime = spec.regime;
  report.spec = spec;
  report.options = options;
  report.calM_partial = traj.calM_partial;
  report.calM_tail = traj.calM_tail;
  report.degenerate = spec.M == 0.0;
  const double t_end = traj.snapshots.back().t;
  report.t_max = t_end;
  report.t_min = std::max(options.t_transient, t_end / std::pow(10.0, options.window_decades));

  std::vector<const solver::TimedField*> window;
  for (const auto& s : traj.snapshots) {
    if (s.t >= report.t_min && s.t <= t_end && s.t > 0.0) window.push_back(&s);
  }
  if (window.size() < 8) {
    throw InsufficientDataError("theorem_report: " + std::to_string(window.size()) +
                                " snapshots in [" + std::to_string(report.t_min) + ", " +
                                std::to_string(t_end) + "], need at least 8");
  }

  const bool critical = spec.regime == Regime::critical;
  std::vector<std::vector<Sample>> corollary(q_list.size());
  std::vector<std::vector<double>> bound(q_list.size());
  report.per_q.resize(q_list.size());
  for (std::size_t iq = 0; iq < q_list.size(); ++iq) report.per_q[iq].q = q_list[iq];

  for (const auto* snap : window) {
    const double t = snap->t;
    const Field profile = profiles::sample_theorem_profile(snap->field.grid(), t, spec);
    const Field heat = profiles::sample_modified_heat(snap->field.grid(), t, spec.M, pr);
    const Field diff = snap->field - profile;
    const Field lead = snap->field - heat;
    const double log_t = std::log(t);
    for (std::size_t iq = 0; iq < q_list.size(); ++iq) {
      QReport& qr = report.per_q[iq];
      const double rate = limit_rate(spec.regime, pr.p, qr.q);
      const double raw = lq_norm(diff, qr.q);
      const double scale = std::pow(t, rate);
      qr.times.push_back(t);
      qr.raw_norm.push_back(raw);
      qr.scaled_norm.push_back(critical ? raw * scale / log_t : raw * scale);
      bound[iq].push_back(raw * scale);
      corollary[iq].push_back({t, lq_norm(lead, qr.q)});
    }
  }

  bool all_pass = true;
  for (std::size_t iq = 0; iq < q_list.size(); ++iq) {
    QReport& qr = report.per_q[iq];
    const double rate = limit_rate(spec.regime, pr.p, qr.q);
    qr.predicted_slope = -rate;

    // Limit sequence over the final decade.
    const std::size_t last = qr.times.size() - 1;
    std::size_t ref = 0;
    for (std::size_t i = 0; i < qr.times.size(); ++i) {
      if (log_distance(qr.times[i], t_end / 10.0) < log_distance(qr.times[ref], t_end / 10.0)) ref = i;
    }
    qr.decay_ratio = qr.scaled_norm[last] / qr.scaled_norm[ref];
    qr.monotone = true;
    for (std::size_t i = ref + 1; i <= last; ++i) {
      if (qr.scaled_norm[i] > qr.scaled_norm[i - 1] * (1.0 + 1e-12)) qr.monotone = false;
    }
    const double fraction = critical ? options.critical_decay_fraction : options.decay_fraction;
    qr.limit_pass = qr.decay_ratio <= fraction && qr.decay_ratio < 1.0;
    if (critical) {
      std::vector<Sample> b;
      for (std::size_t i = 0; i < qr.times.size(); ++i) b.push_back({qr.times[i], bound[iq][i]});
      qr.bound_slope = rate_fit(b, report.t_min, t_end, false).slope;
      qr.bound_pass = *qr.bound_slope <= options.slope_tol;
      qr.limit_pass = qr.limit_pass && qr.bound_pass;
    }

    // Limit constant: rate of ||u - M G0||_q and its scaled limit.
    qr.fit = rate_fit(corollary[iq], report.t_min, t_end, critical);
    qr.slope_pass = std::abs(qr.fit.slope - qr.predicted_slope) <= options.slope_tol;
    const double t_last = qr.times[last];
    qr.corollary_final = corollary[iq].back().value * std::pow(t_last, rate) /
                         (critical ? std::log(t_last) : 1.0);
    if (report.degenerate) {
      qr.corollary_skipped = true;
      qr.corollary_pass = false;
    } else {
      qr.corollary_predicted = corollary_constant(spec, qr.q);
      qr.corollary_rel_error = std::abs(qr.corollary_final - qr.corollary_predicted) / qr.corollary_predicted;
      qr.corollary_pass = qr.corollary_rel_error <= options.corollary_tol;
    }
    if (options.require_all) {
      qr.verdict = qr.limit_pass && (qr.corollary_skipped || qr.corollary_pass);
    } else {
      qr.verdict = qr.limit_pass || qr.corollary_pass;
    }
    all_pass = all_pass && qr.verdict;
  }
  report.verdict = all_pass;
  return report;
}

std::string report_csv_header() { return "t,q,raw_norm,scaled_norm"; }

std::string to_csv(const RegimeReport& report) {
  std::string out = report_csv_header() + "\n";
  for (const auto& qr : report.per_q) {
    for (std::size_t i = 0; i < qr.times.size(); ++i) {
      out += format_double(qr.times[i]) + "," + kernel::format_q(qr.q) + "," +
             format_double(qr.raw_norm[i]) + "," + format_double(qr.scaled_norm[i]) + "\n";
    }
  }
  return out;
}

KeyValues to_keyvalues(const RegimeReport& r) {
  KeyValues kv;
  kv.set("report.regime", std::string(profiles::to_string(r.regime)));
  kv.set("report.p", r.spec.params.p);
  kv.set("report.M", r.spec.M);
  kv.set("report.m", r.spec.m);
  kv.set("report.calM", r.spec.calM);
  kv.set("report.calM_partial", r.calM_partial);
  kv.set("report.calM_tail", r.calM_tail);
  kv.set("report.window.t_min", r.t_min);
  kv.set("report.window.t_max", r.t_max);
  kv.set("report.degenerate", r.degenerate);
  kv.set("report.require_all", r.options.require_all);
  std::string qs;
  for (const auto& qr : r.per_q) qs += (qs.empty() ? "" : ", ") + kernel::format_q(qr.q);
  kv.set("report.q_list", qs);
  for (const auto& qr : r.per_q) {
    const std::string k = "report." + q_key(qr.q);
    kv.set(k + ".predicted_slope", qr.predicted_slope);
    kv.set(k + ".measured_slope", qr.fit.slope);
    kv.set(k + ".slope_residual_rms", qr.fit.residual_rms);
    kv.set(k + ".slope_pass", qr.slope_pass);
    kv.set(k + ".decay_ratio", qr.decay_ratio);
    kv.set(k + ".monotone", qr.monotone);
    kv.set(k + ".limit_pass", qr.limit_pass);
    if (qr.bound_slope) {
      kv.set(k + ".bound_slope", *qr.bound_slope);
      kv.set(k + ".bound_pass", qr.bound_pass);
    }
    kv.set(k + ".scaled_first", qr.scaled_norm.front());
    kv.set(k + ".scaled_last", qr.scaled_norm.back());
    kv.set(k + ".corollary_final", qr.corollary_final);
    if (qr.corollary_skipped) {
      kv.set(k + ".corollary_skipped", true);
    } else {
      kv.set(k + ".corollary_predicted", qr.corollary_predicted);
      kv.set(k + ".corollary_rel_error", qr.corollary_rel_error);
      kv.set(k + ".corollary_pass", qr.corollary_pass);
    }
    kv.set(k + ".verdict", std::string(qr.verdict ? "PASS" : "FAIL"));
  }
  kv.set("report.verdict", std::string(r.verdict ? "PASS" : "FAIL"));
  return kv;
}

}  // namespace fwdiss::analysis
