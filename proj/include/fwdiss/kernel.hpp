#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fwdiss/core.hpp"

namespace fwdiss::kernel {

/// Algebraically distinct but equal ways of writing the lab-frame symbol.
enum class SymbolForm {
  full,             // exp(-mu t xi^2 - i 2Bb t xi/(b^2+xi^2))
  drift_extracted,  // drift -i(2B/b) t xi split off, remainder i 2B t xi^3/(b(b^2+xi^2))
  cubic_extracted,  // drift and the KdV term i 2B t xi^3/b^3 split off
};

/// (1/2)(1 - 1/q); the heat-kernel L^q decay exponent. q = kInf allowed.
[[nodiscard]] double heat_rate(double q) noexcept;

/// Fourier symbol of the linear propagator T(t) in the given frame.
/// The comoving value equals the lab value times e^{i (2B/b) t xi}.
[[nodiscard]] cplx symbol(double xi, double t, const Params& params, Frame frame);

/// Lab-frame symbol evaluated through one of the three rewritings.
[[nodiscard]] cplx symbol_form(double xi, double t, const Params& params, SymbolForm form);

/// Rate of the linear evolution: symbol(xi, t) = exp(t * generator(xi)).
[[nodiscard]] cplx generator(double xi, const Params& params, Frame frame);

/// T(t) * f, evaluated spectrally. The field's grid fixes the frame.
[[nodiscard]] Field apply_semigroup(const Field& f, double t, const Params& params);

/// d^l/dx^l of the heat kernel G(x,t) = (4 pi mu t)^{-1/2} exp(-x^2/(4 mu t)), l = 0..3.
[[nodiscard]] double gauss_deriv(double x, double t, double mu, int l);

/// d^l/dx^l of the modified heat kernel G0(x,t) = G(x - (2B/b)t, t); x is a lab coordinate.
[[nodiscard]] double g0_deriv(double x, double t, const Params& params, int l);

/// d/dt d^l/dx^l G0, using G_t = mu G_xx and the drift; l = 0..1.
[[nodiscard]] double g0_time_deriv(double x, double t, const Params& params, int l);

/// d^l G0(., t) sampled on the grid (frame-aware).
[[nodiscard]] Field sample_g0(const Grid& grid, double t, const Params& params, int l);

/// d^l T(., t) synthesized on the grid from its symbol.
[[nodiscard]] Field sample_kernel(const Grid& grid, double t, const Params& params, int l);

/// Predicted power of t for the gap: order 1 -> -(heat_rate + 1/2 + l/2),
/// order 2 -> -(heat_rate + 1 + l/2).
[[nodiscard]] double gap_exponent(double q, int l, int order);

/// Order 1: ||d^l (T - G0)(., t)||_q.
/// Order 2: ||d^l (T - G0 + (2B/b^3) t d^3 G0)(., t)||_q.
/// Kernels are synthesized from their symbols; throws ResolutionError when
/// mu t xi_max^2 <= 30.
[[nodiscard]] double kernel_gap(double t, int l, double q, int order, const Params& params,
                                const Grid& grid);

struct GapRow {
  double t = 0.0;
  int l = 0;
  double q = 2.0;
  int order = 1;
  double gap = 0.0;
  double scaled_gap = 0.0;  // gap * t^{-gap_exponent}
};

[[nodiscard]] GapRow gap_row(double t, int l, double q, int order, const Params& params,
                             const Grid& grid);

[[nodiscard]] std::string gap_csv_header();
[[nodiscard]] std::string to_csv(const GapRow& row);
[[nodiscard]] std::string format_q(double q);

}  // namespace fwdiss::kernel
