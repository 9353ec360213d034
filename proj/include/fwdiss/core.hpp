#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fwdiss {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Physical parameters of u_t + (|u|^{p-1}u)_x + (B e^{-b|x|} * u_x) = mu u_xx.
struct Params {
  double p = 2.5;
  double B = 1.0;
  double b = 1.0;
  double mu = 1.0;

  /// Throws ConfigError unless p > 2 and B, b, mu > 0.
  void validate() const;

  /// Propagation speed 2B/b of the modified heat kernel.
  [[nodiscard]] double drift_speed() const noexcept { return 2.0 * B / b; }
};

enum class Frame : std::uint8_t { lab = 0, comoving = 1 };

[[nodiscard]] std::string_view to_string(Frame frame) noexcept;
[[nodiscard]] Frame parse_frame(std::string_view text);

/// Uniform periodic grid on [-L, L) with N = 2^k nodes.
///
/// Nodes are x_j = -L + j dx, wavenumbers xi_k = pi k / L for
/// k = -N/2 .. N/2-1. In the comoving frame the node coordinate is the
/// shifted variable x - (2B/b) t.
class Grid {
 public:
  Grid(double half_length, std::size_t n_points, Frame frame = Frame::comoving);

  [[nodiscard]] double half_length() const noexcept { return half_length_; }
  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] Frame frame() const noexcept { return frame_; }
  [[nodiscard]] double dx() const noexcept { return 2.0 * half_length_ / static_cast<double>(n_); }
  [[nodiscard]] double dxi() const noexcept { return kPi / half_length_; }
  [[nodiscard]] double x(std::size_t j) const noexcept {
    return -half_length_ + static_cast<double>(j) * dx();
  }
  [[nodiscard]] double xi(std::ptrdiff_t k) const noexcept { return static_cast<double>(k) * dxi(); }
  /// Largest resolved wavenumber, pi N / (2L).
  [[nodiscard]] double xi_max() const noexcept { return xi(static_cast<std::ptrdiff_t>(n_ / 2)); }

  /// Lab coordinate of node j at time t.
  [[nodiscard]] double lab_x(std::size_t j, double t, double drift_speed) const noexcept {
    return frame_ == Frame::comoving ? x(j) + drift_speed * t : x(j);
  }

  [[nodiscard]] std::vector<double> nodes() const;

  /// Same box and frame with a different resolution.
  [[nodiscard]] Grid with_size(std::size_t n_points) const { return Grid(half_length_, n_points, frame_); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double half_length_;
  std::size_t n_;
  Frame frame_;
};

/// Real samples u(x_j) on a grid.
class Field {
 public:
  Field(Grid grid, std::vector<double> values);

  static Field zeros(const Grid& grid);
  static Field sample(const Grid& grid, const std::function<double(double)>& f);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t j) const noexcept { return values_[j]; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double c) noexcept;

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double c, Field a) { return a *= c; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Continuous-transform approximations c_k ~ (2 pi)^{-1/2} int e^{-i x xi_k} f(x) dx,
/// stored in centred order: index i holds wavenumber k = i - N/2.
class Spectrum {
 public:
  Spectrum(Grid grid, std::vector<cplx> coeffs);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] std::span<cplx> coeffs() noexcept { return coeffs_; }
  [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }

  /// Signed wavenumber index of storage slot i.
  [[nodiscard]] std::ptrdiff_t index_k(std::size_t i) const noexcept {
    return static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(coeffs_.size() / 2);
  }
  [[nodiscard]] double wavenumber(std::size_t i) const noexcept { return grid_.xi(index_k(i)); }
  [[nodiscard]] cplx at(std::ptrdiff_t k) const;
  [[nodiscard]] cplx& at(std::ptrdiff_t k);

 private:
  Grid grid_;
  std::vector<cplx> coeffs_;
};

[[nodiscard]] Spectrum transform(const Field& field);

/// Inverse of transform. The imaginary part of the synthesized samples is
/// discarded once checked to be below 1e-9 of the field's max magnitude;
/// larger residues throw ConsistencyError.
[[nodiscard]] Field inverse_transform(const Spectrum& spectrum);

/// Rectangle-rule L^q norm; q = kInf gives the max norm.
[[nodiscard]] double lq_norm(const Field& field, double q);
[[nodiscard]] double lq_norm(std::span<const double> values, double dx, double q);

struct MomentResult {
  double value = 0.0;
  /// The field does not decay to 1e-10 of its peak at the box edge.
  bool truncation_warning = false;
};

/// Order 0: sum u_j dx. Order 1: sum x_j u_j dx (x_j the grid coordinate).
[[nodiscard]] MomentResult moment(const Field& field, int order);

/// True when |u| over the outer max(2, N/256) nodes at each edge stays
/// below rel_tol * max|u|.
[[nodiscard]] bool decays_at_boundary(std::span<const double> values, double rel_tol = 1e-10);

[[nodiscard]] bool is_power_of_two(std::size_t n) noexcept;

}  // namespace fwdiss
