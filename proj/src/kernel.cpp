#include "fwdiss/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fwdiss/error.hpp"
#include "fwdiss/spectral.hpp"

namespace fwdiss::kernel {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("kernel: t must be >= 0");
}

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("kernel: t must be > 0");
}

void require_order(int l, int max_l) {
  if (l < 0 || l > max_l) {
    throw DomainError("kernel: derivative order " + std::to_string(l) + " outside 0.." +
                      std::to_string(max_l));
  }
}

// Phase of the comoving symbol, 2B t xi^3 / (b (b^2 + xi^2)).
double comoving_phase(double xi, double t, const Params& pr) {
  return 2.0 * pr.B * t * xi * xi * xi / (pr.b * (pr.b * pr.b + xi * xi));
}

// e^{i phi} - 1 without cancellation for small phi.
cplx expm1_i(double phi) {
  const double s = std::sin(0.5 * phi);
  return {-2.0 * s * s, std::sin(phi)};
}

}  // namespace

double heat_rate(double q) noexcept { return std::isinf(q) ? 0.5 : 0.5 * (1.0 - 1.0 / q); }

cplx symbol(double xi, double t, const Params& pr, Frame frame) {
  require_time(t);
  return std::exp(t * generator(xi, pr, frame));
}

cplx generator(double xi, const Params& pr, Frame frame) {
  const double diffusion = -pr.mu * xi * xi;
  if (frame == Frame::comoving) return {diffusion, comoving_phase(xi, 1.0, pr)};
  return {diffusion, -2.0 * pr.B * pr.b * xi / (pr.b * pr.b + xi * xi)};
}

cplx symbol_form(double xi, double t, const Params& pr, SymbolForm form) {
  require_time(t);
  const double B = pr.B;
  const double b = pr.b;
  const double heat = -pr.mu * t * xi * xi;
  const double xi2 = xi * xi;
  switch (form) {
    case SymbolForm::full:
      return std::exp(cplx(heat, -2.0 * B * b * t * xi / (b * b + xi2)));
    case SymbolForm::drift_extracted:
      return std::exp(cplx(heat, -2.0 * B * t * xi / b + 2.0 * B * t * xi * xi2 / (b * (b * b + xi2))));
    case SymbolForm::cubic_extracted: {
      const double b3 = b * b * b;
      const double phase = -2.0 * B * t * xi / b + 2.0 * B * t * xi * xi2 / b3 -
                           2.0 * B * t * xi2 * xi2 * xi / (b3 * (b * b + xi2));
      return std::exp(cplx(heat, phase));
    }
  }
  throw DomainError("kernel: unknown symbol form");
}

Field apply_semigroup(const Field& f, double t, const Params& pr) {
  require_time(t);
  Spectrum spec = transform(f);
  const Frame frame = f.grid().frame();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    spec.coeffs()[i] *= symbol(spec.wavenumber(i), t, pr, frame);
  }
  return inverse_transform(spec);
}

double gauss_deriv(double x, double t, double mu, int l) {
  require_positive_time(t);
  require_order(l, 3);
  const double var = 2.0 * mu * t;
  const double s = std::sqrt(var);
  const double y = x / s;
  const double g = std::exp(-0.5 * y * y) / (s * std::sqrt(2.0 * kPi));
  // d^l/dx^l e^{-y^2/2} = (-1)^l He_l(y) e^{-y^2/2} / s^l (probabilists' Hermite).
  switch (l) {
    case 0:
      return g;
    case 1:
      return -y * g / s;
    case 2:
      return (y * y - 1.0) * g / var;
    default:
      return -(y * y * y - 3.0 * y) * g / (var * s);
  }
}

double g0_deriv(double x, double t, const Params& pr, int l) {
  return gauss_deriv(x - pr.drift_speed() * t, t, pr.mu, l);
}

double g0_time_deriv(double x, double t, const Params& pr, int l) {
  require_order(l, 1);
  return pr.mu * g0_deriv(x, t, pr, l + 2) - pr.drift_speed() * g0_deriv(x, t, pr, l + 1);
}

Field sample_g0(const Grid& grid, double t, const Params& pr, int l) {
  require_positive_time(t);
  std::vector<double> v(grid.size());
  const double c = pr.drift_speed();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = g0_deriv(grid.lab_x(j, t, c), t, pr, l);
  return Field(grid, std::move(v));
}

Field sample_kernel(const Grid& grid, double t, const Params& pr, int l) {
  require_positive_time(t);
  require_order(l, 8);
  const SpectralWorkspace ws(grid);
  const Frame frame = grid.frame();
  const double inv_root = 1.0 / std::sqrt(2.0 * kPi);
  auto values = ws.synthesize([&](double xi) {
    return symbol(xi, t, pr, frame) * std::pow(kI * xi, l) * inv_root;
  });
  return Field(grid, std::move(values));
}

double gap_exponent(double q, int l, int order) {
  if (order != 1 && order != 2) throw DomainError("kernel_gap: order must be 1 or 2");
  return -(heat_rate(q) + 0.5 * order + 0.5 * l);
}

double kernel_gap(double t, int l, double q, int order, const Params& pr, const Grid& grid) {
  require_positive_time(t);
  require_order(l, 1);
  if (order != 1 && order != 2) throw DomainError("kernel_gap: order must be 1 or 2");
  if (!(std::isinf(q) || q == 2.0)) throw DomainError("kernel_gap: q must be 2 or infinity");
  const double xi_max = grid.xi_max();
  if (!(pr.mu * t * xi_max * xi_max > 30.0)) {
    std::ostringstream msg;
    msg << "kernel_gap: grid does not resolve exp(-mu t xi^2) at t=" << t
        << " (mu t xi_max^2 = " << pr.mu * t * xi_max * xi_max << " <= 30)";
    throw ResolutionError(msg.str());
  }

  const SpectralWorkspace ws(grid);
  const double drift = pr.drift_speed();
  const double kdv = 2.0 * pr.B / (pr.b * pr.b * pr.b);
  const bool lab = grid.frame() == Frame::lab;
  const double inv_root = 1.0 / std::sqrt(2.0 * kPi);
  auto values = ws.synthesize([&](double xi) {
    // Heat factor of G0 in the grid's frame.
    cplx g0hat = std::exp(-pr.mu * t * xi * xi) * inv_root;
    if (lab) g0hat *= std::exp(cplx(0.0, -drift * t * xi));
    cplx diff = expm1_i(comoving_phase(xi, t, pr));
    if (order == 2) diff -= kI * (kdv * t * xi * xi * xi);
    return g0hat * diff * std::pow(kI * xi, l);
  });
  return lq_norm(values, grid.dx(), q);
}

GapRow gap_row(double t, int l, double q, int order, const Params& pr, const Grid& grid) {
  const double gap = kernel_gap(t, l, q, order, pr, grid);
  return {t, l, q, order, gap, gap * std::pow(t, -gap_exponent(q, l, order))};
}

std::string format_q(double q) {
  if (std::isinf(q)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", q);
  return buf;
}

std::string gap_csv_header() { return "t,l,q,order,gap,scaled_gap"; }

std::string to_csv(const GapRow& row) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.17g,%d,%s,%d,%.17g,%.17g", row.t, row.l,
                format_q(row.q).c_str(), row.order, row.gap, row.scaled_gap);
  return buf;
}

}  // namespace fwdiss::kernel
