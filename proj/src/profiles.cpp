#include "fwdiss/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "fwdiss/error.hpp"
#include "fwdiss/kernel.hpp"
#include "fwdiss/quadrature.hpp"
#include "fwdiss/spectral.hpp"

namespace fwdiss::profiles {

namespace {

constexpr cplx kI{0.0, 1.0};

// Number of Gauss-Legendre panels and nodes per panel for the tau-integral.
constexpr int kTauPanels = 12;
constexpr int kTauNodes = 16;
// Nodes for the endpoint segment handled by moments.
constexpr int kEndpointNodes = 24;
// G^p(., tau) is taken as resolved once mu tau xi_max^2 / p exceeds this.
constexpr double kSpikeResolution = 37.0;

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(what) + ": t must be > 0");
}

double heat_power_prefactor(double p, double mu) {
  return std::pow(p, -0.5) * std::pow(4.0 * kPi * mu, -(p - 1.0) / 2.0);
}

// int_0^1 c_p(s) d^l G(x, 1 - s + s/p) ds for l = 0 or 1.
double reduced_integral(double x, const Params& pr, int l) {
  const double p = pr.p;
  const double shrink = 1.0 - 1.0 / p;
  const double pre = heat_power_prefactor(p, pr.mu);
  if (p < 3.0) {
    const double beta = 2.0 / (3.0 - p);
    auto f = [&](double sigma) {
      return kernel::gauss_deriv(x, 1.0 - shrink * std::pow(sigma, beta), pr.mu, l);
    };
    return pre * beta * quad::integrate_adaptive(f, 0.0, 1.0).value;
  }
  auto f = [&](double s) {
    return pre * std::pow(s, -(p - 1.0) / 2.0) * kernel::gauss_deriv(x, 1.0 - shrink * s, pr.mu, l);
  };
  try {
    return quad::integrate_adaptive(f, 0.0, 0.5).value + quad::integrate_adaptive(f, 0.5, 1.0).value;
  } catch (const AccuracyError& e) {
    std::ostringstream msg;
    msg << "w_p: the s-integral diverges at s = 0 for p = " << p << " >= 3 (x = " << x
        << "); " << e.what();
    throw AccuracyError(msg.str());
  }
}

SelfSimilarCheck compare(const Field& numeric, const Field& reference, bool warning) {
  const double dist = lq_norm(numeric - reference, 2.0);
  const double ref = lq_norm(reference, 2.0);
  return {dist, ref, ref > 0.0 ? dist / ref : (dist > 0.0 ? kInf : 0.0), warning};
}

// amplitude * int_0^t d^l G(t - tau) * G^p(tau) dtau centred at `centre` on the grid.
std::vector<double> duhamel_integral(double t, double amplitude, const Params& pr, const Grid& grid,
                                     double centre, int l, bool& endpoint_used) {
  const double p = pr.p;
  const double mu = pr.mu;
  const std::size_t n = grid.size();
  std::vector<double> out(n, 0.0);
  endpoint_used = false;
  if (amplitude == 0.0) return out;
  if (!(p < 3.0)) {
    std::ostringstream msg;
    msg << "duhamel check: the tau-integral of G0^p diverges at tau = 0 for p = " << p << " >= 3";
    throw AccuracyError(msg.str());
  }

  const double xi_max = grid.xi_max();
  const double tau_c = kSpikeResolution * p / (mu * xi_max * xi_max);
  if (tau_c > 0.25 * t) {
    std::ostringstream msg;
    msg << "duhamel check: grid too coarse for t = " << t << " (G^p resolved only for tau > " << tau_c
        << ")";
    throw ResolutionError(msg.str());
  }
  const double beta = 2.0 / (3.0 - p);
  const SpectralWorkspace ws(grid);
  const auto xi = ws.wavenumbers();

  // Resolved part tau in [tau_c, t], with tau = t sigma^beta.
  const double sigma_c = std::pow(tau_c / t, 1.0 / beta);
  const auto& rule = quad::gauss_legendre(kTauNodes);
  std::vector<cplx> acc(ws.half_size(), cplx(0.0, 0.0));
  std::vector<cplx> fhat(ws.half_size());
  std::vector<double> samples(n);
  const double width = (1.0 - sigma_c) / kTauPanels;
  for (int panel = 0; panel < kTauPanels; ++panel) {
    const double a = sigma_c + panel * width;
    for (int i = 0; i < kTauNodes; ++i) {
      const double sigma = a + 0.5 * width * (1.0 + rule.nodes[static_cast<std::size_t>(i)]);
      const double weight = 0.5 * width * rule.weights[static_cast<std::size_t>(i)];
      const double tau = t * std::pow(sigma, beta);
      const double jac = t * beta * std::pow(sigma, beta - 1.0);
      for (std::size_t j = 0; j < n; ++j) {
        samples[j] = std::pow(kernel::gauss_deriv(grid.x(j) - centre, tau, mu, 0), p);
      }
      ws.forward(samples, fhat);
      for (std::size_t k = 0; k < acc.size(); ++k) {
        acc[k] += weight * jac * std::exp(-mu * (t - tau) * xi[k] * xi[k]) * fhat[k];
      }
    }
  }
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] *= std::pow(kI * xi[k], l);
  out = ws.inverse(acc);

  // Endpoint tau in (0, tau_c): G^p(tau) is replaced by its mass and second
  // moment, both from spatial quadrature.
  endpoint_used = true;
  const auto& erule = quad::gauss_legendre(kEndpointNodes);
  const double sigma_top = std::pow(tau_c, 1.0 / beta);
  for (int i = 0; i < kEndpointNodes; ++i) {
    const double sigma = 0.5 * sigma_top * (1.0 + erule.nodes[static_cast<std::size_t>(i)]);
    const double weight = 0.5 * sigma_top * erule.weights[static_cast<std::size_t>(i)];
    const double tau = std::pow(sigma, beta);
    const double jac = beta * std::pow(sigma, beta - 1.0);
    const double spread = std::sqrt(2.0 * mu * tau / p);
    auto power = [&](double z) { return std::pow(kernel::gauss_deriv(z, tau, mu, 0), p); };
    const double m0 =
        quad::integrate_adaptive(power, -40.0 * spread, 40.0 * spread).value;
    const double m2 =
        quad::integrate_adaptive([&](double z) { return z * z * power(z); }, -40.0 * spread, 40.0 * spread)
            .value;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = grid.x(j) - centre;
      out[j] += weight * jac *
                (m0 * kernel::gauss_deriv(y, t - tau, mu, l) +
                 0.5 * m2 * kernel::gauss_deriv(y, t - tau, mu, l + 2));
    }
  }
  for (double& v : out) v *= amplitude;
  return out;
}

double grid_centre(const Grid& grid, double t, const Params& pr) {
  return grid.frame() == Frame::comoving ? 0.0 : pr.drift_speed() * t;
}

}  // namespace

Regime regime_for(double p) {
  if (!(p > 2.0) || !std::isfinite(p)) throw ConfigError("regime: p must be > 2");
  if (p < 3.0) return Regime::subcritical;
  if (p == 3.0) return Regime::critical;
  return Regime::supercritical;
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::subcritical:
      return "subcritical";
    case Regime::critical:
      return "critical";
    case Regime::supercritical:
      return "supercritical";
  }
  return "unknown";
}

Regime parse_regime(std::string_view text) {
  if (text == "subcritical") return Regime::subcritical;
  if (text == "critical") return Regime::critical;
  if (text == "supercritical") return Regime::supercritical;
  throw ConfigError("unknown regime '" + std::string(text) + "'");
}

void ProfileSpec::validate() const {
  params.validate();
  if (regime_for(params.p) != regime) {
    throw ConfigError("profile: regime " + std::string(to_string(regime)) +
                      " does not match p = " + std::to_string(params.p));
  }
  if (!std::isfinite(M) || !std::isfinite(m)) throw ConfigError("profile: M and m must be finite");
  if (regime == Regime::supercritical && !std::isfinite(calM)) {
    throw ConfigError("profile: nonlinear mass must be finite in the supercritical regime");
  }
}

ProfileSpec make_spec(const Params& params, double M, double m, double calM) {
  ProfileSpec spec{params, M, m, calM, regime_for(params.p)};
  spec.validate();
  return spec;
}

double gaussian_power_mass(double p, double tau, double mu) {
  require_positive_time(tau, "gaussian_power_mass");
  return std::pow(p, -0.5) * std::pow(4.0 * kPi * mu * tau, -(p - 1.0) / 2.0);
}

double w_p(double x, const Params& params) { return reduced_integral(x, params, 1); }

double w_p_primitive(double x, const Params& params) { return reduced_integral(x, params, 0); }

double w_p_definitional(double x, const Params& pr) {
  pr.validate();
  const double p = pr.p;
  const double mu = pr.mu;
  quad::AdaptiveOptions inner_opt;
  inner_opt.abs_tol = 1e-13;
  inner_opt.rel_tol = 1e-10;
  inner_opt.max_panels = 400;
  // int d_x G(x - y, 1 - s) G(y, s)^p dy, split at the centres and spike widths.
  auto inner = [&](double s) {
    const double w1 = std::sqrt(2.0 * mu * s / p);
    const double w2 = std::sqrt(2.0 * mu * (1.0 - s));
    std::vector<double> cuts{-60.0 * std::sqrt(mu), 60.0 * std::sqrt(mu), 0.0, x};
    for (double k : {-12.0, -4.0, 4.0, 12.0}) {
      cuts.push_back(k * w1);
      cuts.push_back(x + k * w2);
    }
    std::sort(cuts.begin(), cuts.end());
    auto f = [&](double y) {
      return kernel::gauss_deriv(x - y, 1.0 - s, mu, 1) * std::pow(kernel::gauss_deriv(y, s, mu, 0), p);
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] > cuts[i]) sum += quad::integrate_adaptive(f, cuts[i], cuts[i + 1], inner_opt).value;
    }
    return sum;
  };
  quad::AdaptiveOptions outer_opt;
  outer_opt.abs_tol = 1e-11;
  outer_opt.max_panels = 200;
  if (p < 3.0) {
    const double beta = 2.0 / (3.0 - p);
    auto g = [&](double sigma) { return inner(std::pow(sigma, beta)) * beta * std::pow(sigma, beta - 1.0); };
    return quad::integrate_adaptive(g, 0.0, 1.0, outer_opt).value;
  }
  try {
    return quad::integrate_adaptive(inner, 0.0, 0.5, outer_opt).value +
           quad::integrate_adaptive(inner, 0.5, 1.0, outer_opt).value;
  } catch (const AccuracyError& e) {
    std::ostringstream msg;
    msg << "w_p (definitional): the s-integral diverges at s = 0 for p = " << p << " >= 3 (x = " << x
        << "); " << e.what();
    throw AccuracyError(msg.str());
  }
}

double W_p(double x, double t, const Params& params) {
  require_positive_time(t, "W_p");
  const double root = std::sqrt(t);
  return std::pow(t, -(params.p - 1.0) / 2.0) * w_p((x - params.drift_speed() * t) / root, params);
}

double w_p_norm(const Params& params, double q) {
  const double half = 20.0 * std::sqrt(params.mu);
  return lq_norm(sample_w_p(Grid(half, 8192, Frame::comoving), params), q);
}

double profile_correction(double x, double t, const ProfileSpec& spec) {
  const Params& pr = spec.params;
  switch (spec.regime) {
    case Regime::subcritical:
      if (spec.M == 0.0) return 0.0;
      return std::pow(std::abs(spec.M), pr.p - 1.0) * spec.M * W_p(x, t, pr);
    case Regime::critical:
      if (!(t > 1.0)) throw DomainError("theorem profile: critical regime needs t > 1");
      return spec.M * spec.M * spec.M / (4.0 * std::sqrt(3.0) * kPi * pr.mu) * std::log(t) *
             kernel::g0_deriv(x, t, pr, 1);
    case Regime::supercritical: {
      const double kdv = 2.0 * pr.B * spec.M / (pr.b * pr.b * pr.b);
      return (spec.m + spec.calM) * kernel::g0_deriv(x, t, pr, 1) +
             kdv * t * kernel::g0_deriv(x, t, pr, 3);
    }
  }
  throw ConfigError("theorem profile: unknown regime");
}

double theorem_profile(double x, double t, const ProfileSpec& spec) {
  require_positive_time(t, "theorem_profile");
  return spec.M * kernel::g0_deriv(x, t, spec.params, 0) - profile_correction(x, t, spec);
}

Field sample_modified_heat(const Grid& grid, double t, double M, const Params& params) {
  Field f = kernel::sample_g0(grid, t, params, 0);
  f *= M;
  return f;
}

Field sample_W_p(const Grid& grid, double t, const Params& params) {
  require_positive_time(t, "W_p");
  std::vector<double> v(grid.size());
  const double c = params.drift_speed();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = W_p(grid.lab_x(j, t, c), t, params);
  return Field(grid, std::move(v));
}

Field sample_theorem_profile(const Grid& grid, double t, const ProfileSpec& spec) {
  spec.validate();
  std::vector<double> v(grid.size());
  const double c = spec.params.drift_speed();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = theorem_profile(grid.lab_x(j, t, c), t, spec);
  return Field(grid, std::move(v));
}

Field sample_w_p(const Grid& grid, const Params& params) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = w_p(grid.x(j), params);
  return Field(grid, std::move(v));
}

SelfSimilarCheck duhamel_selfsim_check(double t, const ProfileSpec& spec, const Grid& grid) {
  require_positive_time(t, "duhamel check");
  spec.validate();
  const Params& pr = spec.params;
  const double amplitude = std::pow(std::abs(spec.M), pr.p - 1.0) * spec.M;
  if (amplitude == 0.0) return {0.0, 0.0, 0.0, false};
  bool endpoint = false;
  const double centre = grid_centre(grid, t, pr);
  Field numeric(grid, duhamel_integral(t, amplitude, pr, grid, centre, 1, endpoint));
  Field reference = sample_W_p(grid, t, pr);
  reference *= amplitude;
  return compare(numeric, reference, endpoint);
}

SelfSimilarCheck duhamel_primitive_check(double t, const Params& params, const Grid& grid) {
  require_positive_time(t, "duhamel check");
  params.validate();
  bool endpoint = false;
  const double centre = grid_centre(grid, t, params);
  Field numeric(grid, duhamel_integral(t, 1.0, params, grid, centre, 0, endpoint));
  const double scale = std::pow(t, -(params.p - 2.0) / 2.0);
  const double root = std::sqrt(t);
  std::vector<double> ref(grid.size());
  for (std::size_t j = 0; j < ref.size(); ++j) {
    ref[j] = scale * w_p_primitive((grid.x(j) - centre) / root, params);
  }
  return compare(numeric, Field(grid, std::move(ref)), endpoint);
}

}  // namespace fwdiss::profiles
