#pragma once

#include <string>
#include <string_view>

#include "fwdiss/core.hpp"

namespace fwdiss::profiles {

enum class Regime { subcritical, critical, supercritical };

/// 2 < p < 3 -> subcritical, p == 3 -> critical, p > 3 -> supercritical.
[[nodiscard]] Regime regime_for(double p);
[[nodiscard]] std::string_view to_string(Regime regime) noexcept;
[[nodiscard]] Regime parse_regime(std::string_view text);

/// Constants of the two-term large-time profile.
struct ProfileSpec {
  Params params;
  double M = 0.0;     // mass of the initial data
  double m = 0.0;     // first moment of the initial data
  double calM = 0.0;  // time-space integral of the nonlinearity (supercritical only)
  Regime regime = Regime::subcritical;

  /// Throws ConfigError if the regime disagrees with params.p or calM is
  /// not finite in the supercritical regime.
  void validate() const;
};

/// Spec with the regime derived from params.p.
[[nodiscard]] ProfileSpec make_spec(const Params& params, double M, double m = 0.0,
                                    double calM = 0.0);

/// int G(y, tau)^p dy = p^{-1/2} (4 pi mu tau)^{-(p-1)/2}.
[[nodiscard]] double gaussian_power_mass(double p, double tau, double mu);

/// Self-similar profile w_p(x) = d/dx int_0^1 (G(1-s) * G^p(s))(x) ds.
///
/// Uses G^p(., s) = p^{-1/2} (4 pi mu s)^{-(p-1)/2} G(., s/p), so the
/// integrand is a single Gaussian derivative. For p < 3 the s -> 0
/// singularity is removed by s = sigma^{2/(3-p)}; for p >= 3 the integral
/// diverges for x != 0 and AccuracyError is thrown.
[[nodiscard]] double w_p(double x, const Params& params);

/// Primitive of w_p: int_0^1 (G(1-s) * G^p(s))(x) ds. Same convergence rules.
[[nodiscard]] double w_p_primitive(double x, const Params& params);

/// w_p straight from its definition as a 2D quadrature: s-integral of
/// int d_x G(x - y, 1 - s) G(y, s)^p dy, no Gaussian product identities.
/// p < 3 uses s = sigma^{2/(3-p)}; p >= 3 throws AccuracyError for x != 0.
[[nodiscard]] double w_p_definitional(double x, const Params& params);

/// W_p(x, t) = t^{-(p-1)/2} w_p((x - (2B/b) t) / sqrt(t)); x is a lab coordinate.
[[nodiscard]] double W_p(double x, double t, const Params& params);

/// ||w_p||_q over the similarity variable, by the rectangle rule on a
/// fine grid covering the Gaussian tails.
[[nodiscard]] double w_p_norm(const Params& params, double q);

/// M G0 minus the regime's second-order correction; x is a lab coordinate.
/// The critical regime requires t > 1.
[[nodiscard]] double theorem_profile(double x, double t, const ProfileSpec& spec);

/// Second-order correction alone, so theorem_profile = M G0 - correction.
[[nodiscard]] double profile_correction(double x, double t, const ProfileSpec& spec);

/// Profiles sampled on a grid (frame-aware).
[[nodiscard]] Field sample_modified_heat(const Grid& grid, double t, double M, const Params& params);
[[nodiscard]] Field sample_W_p(const Grid& grid, double t, const Params& params);
[[nodiscard]] Field sample_theorem_profile(const Grid& grid, double t, const ProfileSpec& spec);
/// w_p on the grid nodes, taken as the similarity variable.
[[nodiscard]] Field sample_w_p(const Grid& grid, const Params& params);

struct SelfSimilarCheck {
  double distance = 0.0;        // L^2 distance between the two sides
  double reference_norm = 0.0;  // L^2 norm of |M|^{p-1} M W_p
  double relative = 0.0;        // distance / reference_norm (0 when both vanish)
  /// The tau -> 0 endpoint, where G0^p is too narrow for the grid, was
  /// handled by the local moment sub-quadrature.
  bool singularity_warning = false;
};

/// Compares int_0^t d_x G0(t - tau) * (|M G0|^{p-1} M G0)(tau) dtau, computed by
/// spectral convolution and tau-quadrature, with |M|^{p-1} M W_p(., t).
/// Throws AccuracyError for p >= 3, where the tau-integral diverges.
[[nodiscard]] SelfSimilarCheck duhamel_selfsim_check(double t, const ProfileSpec& spec,
                                                     const Grid& grid);

/// Same comparison without the x-derivative:
/// int_0^t G0(t - tau) * G0^p(tau) dtau against t^{-(p-2)/2} w_p_primitive.
[[nodiscard]] SelfSimilarCheck duhamel_primitive_check(double t, const Params& params,
                                                       const Grid& grid);

}  // namespace fwdiss::profiles
