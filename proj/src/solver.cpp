#include "fwdiss/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fwdiss/error.hpp"
#include "fwdiss/kernel.hpp"
#include "fwdiss/snapshot.hpp"
#include "fwdiss/spectral.hpp"

namespace fwdiss::solver {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kContourPoints = 64;
constexpr double kGrowthLimit = 10.0;

double signed_power(double u, double p) {
  const double a = std::abs(u);
  if (a == 0.0) return 0.0;
  if (p == 3.0) return u * u * u;
  if (p == 4.0) return u * u * u * a;
  if (p == 2.5) return u * a * std::sqrt(a);
  return std::copysign(std::exp(p * std::log(a)), u);
}

// Norm of a real field from its half spectrum (Parseval).
double half_l2(std::span<const cplx> v, double dxi) {
  double s = std::norm(v.front()) + std::norm(v.back());
  for (std::size_t k = 1; k + 1 < v.size(); ++k) s += 2.0 * std::norm(v[k]);
  return std::sqrt(s * dxi);
}

struct StageStats {
  double mass = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double flux_mass = 0.0;  // int sign(u)|u|^p dx
};

// Nonlinear right-hand side on the half spectrum.
class Nonlinearity {
 public:
  Nonlinearity(const Grid& grid, const Params& params, double dealias)
      : ws_(grid), p_(params.p), dx_(grid.dx()), u_(grid.size()), w_(grid.size()),
        what_(ws_.half_size()), factor_(ws_.half_size()) {
    const double cutoff = dealias * static_cast<double>(grid.size() / 2);
    const auto xi = ws_.wavenumbers();
    for (std::size_t k = 0; k < factor_.size(); ++k) {
      factor_[k] = static_cast<double>(k) <= cutoff ? -kI * xi[k] : cplx(0.0, 0.0);
    }
  }

  const SpectralWorkspace& workspace() const noexcept { return ws_; }

  // out = N(v); stats from the physical-space state.
  void operator()(std::span<const cplx> v, std::span<cplx> out, StageStats* stats) {
    ws_.inverse(v, u_);
    for (std::size_t j = 0; j < u_.size(); ++j) w_[j] = signed_power(u_[j], p_);
    if (stats) {
      StageStats s;
      for (std::size_t j = 0; j < u_.size(); ++j) {
        s.mass += u_[j];
        s.l2 += u_[j] * u_[j];
        s.linf = std::max(s.linf, std::abs(u_[j]));
        s.flux_mass += w_[j];
        if (!std::isfinite(u_[j])) s.linf = std::nan("");
      }
      s.mass *= dx_;
      s.l2 = std::sqrt(s.l2 * dx_);
      s.flux_mass *= dx_;
      *stats = s;
    }
    ws_.forward(w_, what_);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = factor_[k] * what_[k];
  }

  std::span<const double> physical() const noexcept { return u_; }

 private:
  SpectralWorkspace ws_;
  double p_;
  double dx_;
  std::vector<double> u_;
  std::vector<double> w_;
  std::vector<cplx> what_;
  std::vector<cplx> factor_;
};

// Cox-Matthews coefficients for one step size, by contour averaging.
struct EtdCoefficients {
  std::vector<cplx> E, E2, Q, f1, f2, f3;
};

EtdCoefficients etd_coefficients(std::span<const cplx> L, double h) {
  const std::size_t n = L.size();
  EtdCoefficients c{std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n),
                    std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
  std::vector<cplx> roots(kContourPoints);
  for (int j = 0; j < kContourPoints; ++j) {
    roots[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * kPi * (j + 0.5) / kContourPoints);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const cplx z = L[k] * h;
    c.E[k] = std::exp(z);
    c.E2[k] = std::exp(0.5 * z);
    cplx q(0.0), a(0.0), b(0.0), d(0.0);
    for (const cplx& r : roots) {
      const cplx lr = z + r;
      const cplx e = std::exp(lr);
      const cplx lr3 = lr * lr * lr;
      q += (std::exp(0.5 * lr) - 1.0) / lr;
      a += (-4.0 - lr + e * (4.0 - 3.0 * lr + lr * lr)) / lr3;
      b += (2.0 + lr + e * (lr - 2.0)) / lr3;
      d += (-4.0 - 3.0 * lr - lr * lr + e * (4.0 - lr)) / lr3;
    }
    const double scale = h / kContourPoints;
    c.Q[k] = q * scale;
    c.f1[k] = a * scale;
    c.f2[k] = b * scale;
    c.f3[k] = d * scale;
  }
  return c;
}

// phi-function weights of the exponential trapezoid rule:
// w0 = h (phi1 - phi2)(Lh), w1 = h phi2(Lh), phi2(z) = (e^z - 1 - z) / z^2.
struct TrapezoidWeights {
  std::vector<cplx> E, w0, w1;
};

TrapezoidWeights trapezoid_weights(std::span<const cplx> L, double h) {
  const std::size_t n = L.size();
  TrapezoidWeights tw{std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
  std::vector<cplx> roots(kContourPoints);
  for (int j = 0; j < kContourPoints; ++j) {
    roots[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * kPi * (j + 0.5) / kContourPoints);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const cplx z = L[k] * h;
    tw.E[k] = std::exp(z);
    cplx phi1(0.0), phi2(0.0);
    for (const cplx& r : roots) {
      const cplx lr = z + r;
      const cplx e = std::exp(lr);
      phi1 += (e - 1.0) / lr;
      phi2 += (e - 1.0 - lr) / (lr * lr);
    }
    phi1 /= static_cast<double>(kContourPoints);
    phi2 /= static_cast<double>(kContourPoints);
    tw.w0[k] = h * (phi1 - phi2);
    tw.w1[k] = h * phi2;
  }
  return tw;
}

std::vector<cplx> generator_half(const SpectralWorkspace& ws, const Params& params) {
  const auto xi = ws.wavenumbers();
  std::vector<cplx> L(xi.size());
  for (std::size_t k = 0; k < L.size(); ++k) L[k] = kernel::generator(xi[k], params, ws.grid().frame());
  return L;
}

double mass_tolerance(double mass0) { return 1e-8 * std::abs(mass0) + 1e-12; }

}  // namespace

void SolveConfig::validate() const {
  params.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("solve: t_end must be positive");
  if (!(dt > 0.0) || !(dt <= t_end)) throw ConfigError("solve: need 0 < dt <= t_end");
  if (!(dealias > 0.5 && dealias <= 1.0)) throw ConfigError("solve: dealias must lie in (0.5, 1]");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double s = snapshot_times[i];
    if (!(s >= 0.0 && s <= t_end)) throw ConfigError("solve: snapshot times must lie in [0, t_end]");
    if (i > 0 && !(s > snapshot_times[i - 1])) {
      throw ConfigError("solve: snapshot times must be strictly increasing");
    }
  }
}

Field nonlinear_term(const Field& u, const Params& params, double dealias) {
  params.validate();
  Nonlinearity nl(u.grid(), params, dealias);
  const auto& ws = nl.workspace();
  std::vector<cplx> v(ws.half_size()), out(ws.half_size());
  ws.forward(u.values(), v);
  for (double x : u.values()) {
    if (!std::isfinite(signed_power(x, params.p))) {
      throw ConsistencyError("nonlinear_term: |u|^p overflows");
    }
  }
  nl(v, out, nullptr);
  return Field(u.grid(), ws.inverse(out));
}

bool spectrum_resolved(const Field& u) {
  const SpectralWorkspace ws(u.grid());
  const auto v = ws.forward(u.values());
  double peak = 0.0;
  for (const auto& c : v) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return true;
  const std::size_t start = v.size() - v.size() / 10;
  for (std::size_t k = start; k < v.size(); ++k) {
    if (std::abs(v[k]) > 1e-12 * peak) return false;
  }
  return true;
}

Trajectory integrate(const Field& u0, const SolveConfig& config) {
  config.validate();
  if (!(u0.grid() == config.grid)) throw ConfigError("integrate: u0 grid differs from config grid");
  if (!spectrum_resolved(u0)) {
    throw ResolutionError("integrate: grid does not resolve the initial data (spectral tail above 1e-12)");
  }

  const Params& pr = config.params;
  Nonlinearity nl(config.grid, pr, config.dealias);
  const SpectralWorkspace& ws = nl.workspace();
  const std::vector<cplx> L = generator_half(ws, pr);
  const std::size_t nh = ws.half_size();

  Trajectory traj;
  traj.config = config;
  std::vector<cplx> v = ws.forward(u0.values());
  std::vector<cplx> nv(nh), na(nh), nb(nh), nc(nh), a(nh), b(nh), c(nh);
  std::vector<double> flux_t, flux_v;

  std::vector<double> targets;
  for (double s : config.snapshot_times) {
    if (s > 0.0) targets.push_back(s);
  }
  if (targets.empty() || targets.back() < config.t_end) targets.push_back(config.t_end);
  auto is_snapshot = [&](double s) {
    return std::binary_search(config.snapshot_times.begin(), config.snapshot_times.end(), s);
  };
  if (is_snapshot(0.0)) traj.snapshots.push_back({0.0, u0});

  std::map<double, EtdCoefficients> cache;
  double t = 0.0;
  double mass0 = 0.0;
  double prev_linf = -1.0;
  double prev_t = 0.0;
  double prev_flux = 0.0;
  double calM = 0.0;
  bool first = true;

  auto record = [&](const StageStats& s) {
    if (!(s.linf <= kGrowthLimit * prev_linf) && prev_linf > 0.0) {
      std::ostringstream msg;
      msg << "integrate: max norm grew from " << prev_linf << " to " << s.linf << " at t = " << t
          << "; reduce dt";
      throw StabilityError(msg.str(), config.dt / 4.0);
    }
    if (!std::isfinite(s.linf)) throw StabilityError("integrate: non-finite state at t = " + std::to_string(t), config.dt / 4.0);
    if (first) {
      mass0 = s.mass;
    } else if (std::abs(s.mass - mass0) > mass_tolerance(mass0)) {
      std::ostringstream msg;
      msg << "integrate: mass drifted from " << mass0 << " to " << s.mass << " at t = " << t;
      throw ConsistencyError(msg.str());
    }
    if (config.accumulate_calM && !first) calM += 0.5 * (t - prev_t) * (prev_flux + s.flux_mass);
    prev_t = t;
    prev_flux = s.flux_mass;
    prev_linf = s.linf;
    first = false;
    flux_t.push_back(t);
    flux_v.push_back(s.flux_mass);
    traj.diagnostics.push_back({t, s.mass, s.l2, s.linf, calM});
  };

  for (double target : targets) {
    const double span = target - t;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / config.dt - 1e-9)));
    const double h = span / static_cast<double>(steps);
    auto it = cache.find(h);
    if (it == cache.end()) it = cache.emplace(h, etd_coefficients(L, h)).first;
    const EtdCoefficients& co = it->second;
    const double t_start = t;
    for (long step = 0; step < steps; ++step) {
      StageStats stats;
      if (config.nonlinear) {
        nl(v, nv, &stats);
        record(stats);
        for (std::size_t k = 0; k < nh; ++k) a[k] = co.E2[k] * v[k] + co.Q[k] * nv[k];
        nl(a, na, nullptr);
        for (std::size_t k = 0; k < nh; ++k) b[k] = co.E2[k] * v[k] + co.Q[k] * na[k];
        nl(b, nb, nullptr);
        for (std::size_t k = 0; k < nh; ++k) c[k] = co.E2[k] * a[k] + co.Q[k] * (2.0 * nb[k] - nv[k]);
        nl(c, nc, nullptr);
        for (std::size_t k = 0; k < nh; ++k) {
          v[k] = co.E[k] * v[k] + nv[k] * co.f1[k] + 2.0 * (na[k] + nb[k]) * co.f2[k] + nc[k] * co.f3[k];
        }
      } else {
        nl(v, nv, &stats);
        record(stats);
        for (std::size_t k = 0; k < nh; ++k) v[k] *= co.E[k];
      }
      t = (step + 1 == steps) ? target : t_start + static_cast<double>(step + 1) * h;
    }
    if (is_snapshot(target)) traj.snapshots.push_back({target, Field(config.grid, ws.inverse(v))});
  }
  StageStats last;
  nl(v, nv, &last);
  record(last);

  traj.calM_partial = calM;
  traj.calM_tail = std::nan("");
  const double p = pr.p;
  if (config.accumulate_calM && p > 3.0) {
    const double a_exp = (p - 1.0) / 2.0;
    double num = 0.0;
    double den = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < flux_t.size(); ++i) {
      if (flux_t[i] >= config.t_end / 10.0 && flux_t[i] > 0.0) {
        const double basis = std::pow(flux_t[i], -a_exp);
        num += flux_v[i] * basis;
        den += basis * basis;
        ++count;
      }
    }
    if (count >= 2 && den > 0.0) {
      traj.calM_tail = (num / den) * std::pow(config.t_end, 1.0 - a_exp) / (a_exp - 1.0);
    }
  }
  return traj;
}

PicardResult picard_solve(const Field& u0, double t, const Params& params, const Grid& grid,
                          int max_iter, const PicardOptions& options) {
  params.validate();
  if (!(u0.grid() == grid)) throw ConfigError("picard: u0 grid differs from grid");
  if (!(t > 0.0)) throw DomainError("picard: t must be > 0");
  if (max_iter < 1) throw ConfigError("picard: max_iter must be >= 1");
  const int steps = options.tau_steps > 0
                        ? options.tau_steps
                        : std::max(64, static_cast<int>(std::ceil(t / 0.005)));
  const double h = t / steps;

  Nonlinearity nl(grid, params, options.dealias);
  const SpectralWorkspace& ws = nl.workspace();
  const std::vector<cplx> L = generator_half(ws, params);
  const std::size_t nh = ws.half_size();
  const TrapezoidWeights tw = trapezoid_weights(L, h);
  const double dxi = grid.dxi();

  // Linear solution on the tau grid; iterate 0.
  std::vector<std::vector<cplx>> lin(static_cast<std::size_t>(steps) + 1, std::vector<cplx>(nh));
  lin[0] = ws.forward(u0.values());
  for (int i = 1; i <= steps; ++i) {
    for (std::size_t k = 0; k < nh; ++k) lin[i][k] = tw.E[k] * lin[i - 1][k];
  }
  std::vector<std::vector<cplx>> cur = lin;
  std::vector<std::vector<cplx>> next(cur.size(), std::vector<cplx>(nh));
  std::vector<cplx> n_prev(nh), n_curr(nh), integral(nh), diff(nh);

  PicardResult result{u0, 0, false, {}, {}};
  int rising = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    std::fill(integral.begin(), integral.end(), cplx(0.0));
    nl(cur[0], n_prev, nullptr);
    next[0] = lin[0];
    double worst = 0.0;
    double scale = 0.0;
    for (int i = 1; i <= steps; ++i) {
      nl(cur[static_cast<std::size_t>(i)], n_curr, nullptr);
      for (std::size_t k = 0; k < nh; ++k) {
        // The Duhamel integral enters with a minus sign; N already carries it.
        integral[k] = tw.E[k] * integral[k] + tw.w0[k] * n_prev[k] + tw.w1[k] * n_curr[k];
        next[i][k] = lin[i][k] + integral[k];
        diff[k] = next[i][k] - cur[i][k];
      }
      worst = std::max(worst, half_l2(diff, dxi));
      scale = std::max(scale, half_l2(next[i], dxi));
      std::swap(n_prev, n_curr);
    }
    std::swap(cur, next);
    const double increment = scale > 0.0 ? worst / scale : 0.0;
    if (!std::isfinite(increment)) throw DivergenceError("picard: iterates became non-finite");
    if (!result.increments.empty()) {
      const double prev = result.increments.back();
      const double ratio = prev > 0.0 ? increment / prev : 0.0;
      result.contraction_ratios.push_back(ratio);
      rising = ratio >= 1.0 ? rising + 1 : 0;
    }
    result.increments.push_back(increment);
    result.iterations = iter;
    if (increment < options.tolerance) {
      result.converged = true;
      break;
    }
    if (rising >= 3) {
      std::ostringstream msg;
      msg << "picard: contraction ratio >= 1 for 3 consecutive iterations (last increment "
          << increment << "); data too large for the fixed-point map";
      throw DivergenceError(msg.str());
    }
  }
  result.solution = Field(grid, ws.inverse(cur.back()));
  return result;
}

double relative_l2(const Field& a, const Field& b) {
  const double ref = lq_norm(b, 2.0);
  const double d = lq_norm(a - b, 2.0);
  return ref > 0.0 ? d / ref : d;
}

std::string diagnostics_csv_header() { return "t,mass,l2,linf,calM_partial"; }

void write_config(KeyValues& kv, const SolveConfig& c) {
  kv.set("params.p", c.params.p);
  kv.set("params.B", c.params.B);
  kv.set("params.b", c.params.b);
  kv.set("params.mu", c.params.mu);
  kv.set("grid.L", c.grid.half_length());
  kv.set("grid.N", c.grid.size());
  kv.set("grid.frame", std::string(to_string(c.grid.frame())));
  kv.set("solve.t_end", c.t_end);
  kv.set("solve.dt", c.dt);
  kv.set("solve.dealias", c.dealias);
  kv.set("solve.snapshot_times", c.snapshot_times);
  kv.set("solve.accumulate_calM", c.accumulate_calM);
  kv.set("solve.nonlinear", c.nonlinear);
}

SolveConfig read_config(const KeyValues& kv) {
  SolveConfig c;
  c.params = Params{kv.get_double("params.p", 2.5), kv.get_double("params.B", 1.0),
                    kv.get_double("params.b", 1.0), kv.get_double("params.mu", 1.0)};
  const long long n = kv.get_int("grid.N", 16384);
  if (n <= 0) throw ConfigError("grid.N must be positive");
  c.grid = Grid(kv.get_double("grid.L", 256.0), static_cast<std::size_t>(n),
                parse_frame(kv.get_string("grid.frame", "comoving")));
  c.t_end = kv.get_double("solve.t_end", 1.0);
  c.dt = kv.get_double("solve.dt", 0.05);
  c.dealias = kv.get_double("solve.dealias", 2.0 / 3.0);
  c.snapshot_times = kv.get_doubles("solve.snapshot_times", {});
  c.accumulate_calM = kv.get_bool("solve.accumulate_calM", c.params.p > 3.0);
  c.nonlinear = kv.get_bool("solve.nonlinear", true);
  c.validate();
  return c;
}

void save_trajectory(const std::filesystem::path& dir, const Trajectory& traj) {
  std::filesystem::create_directories(dir);
  KeyValues kv;
  write_config(kv, traj.config);
  kv.set("result.calM_partial", traj.calM_partial);
  kv.set("result.calM_tail", traj.calM_tail);
  kv.set("result.snapshots", traj.snapshots.size());
  kv.save(dir / "config.txt");
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04zu.fws", i);
    write_snapshot(dir / name, {traj.snapshots[i].t, traj.snapshots[i].field, std::nullopt});
  }
  std::ofstream csv(dir / "diagnostics.csv");
  if (!csv) throw ConfigError("cannot write " + (dir / "diagnostics.csv").string());
  csv << diagnostics_csv_header() << '\n';
  for (const auto& r : traj.diagnostics) {
    csv << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.l2) << ','
        << format_double(r.linf) << ',' << format_double(r.calM_partial) << '\n';
  }
}

Trajectory load_trajectory(const std::filesystem::path& dir) {
  const KeyValues kv = KeyValues::load(dir / "config.txt");
  Trajectory traj;
  traj.config = read_config(kv);
  traj.calM_partial = kv.get_double("result.calM_partial", 0.0);
  traj.calM_tail = kv.get_double("result.calM_tail", std::nan(""));
  const long long count = kv.get_int("result.snapshots", 0);
  for (long long i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04lld.fws", i);
    Snapshot s = read_snapshot(dir / name);
    if (!(s.field.grid() == traj.config.grid)) throw ConfigError(std::string(name) + ": grid differs from config");
    traj.snapshots.push_back({s.t, std::move(s.field)});
  }
  std::ifstream csv(dir / "diagnostics.csv");
  if (csv) {
    std::string line;
    std::getline(csv, line);
    if (line != diagnostics_csv_header()) throw ConfigError("diagnostics.csv: unexpected header");
    while (std::getline(csv, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string cell;
      double vals[5];
      for (double& v : vals) {
        if (!std::getline(ss, cell, ',')) throw ConfigError("diagnostics.csv: short row");
        v = parse_double(cell);
      }
      traj.diagnostics.push_back({vals[0], vals[1], vals[2], vals[3], vals[4]});
    }
  }
  return traj;
}

}  // namespace fwdiss::solver
