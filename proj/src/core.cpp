#include "fwdiss/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fwdiss/error.hpp"
#include "fwdiss/spectral.hpp"
#include "spectral_detail.hpp"

namespace fwdiss {

void Params::validate() const {
  if (!(p > 2.0) || !std::isfinite(p)) {
    throw ConfigError("params: p must be > 2 (got " + std::to_string(p) + ")");
  }
  if (!(B > 0.0) || !(b > 0.0) || !(mu > 0.0) || !std::isfinite(B) || !std::isfinite(b) ||
      !std::isfinite(mu)) {
    throw ConfigError("params: B, b and mu must be positive and finite");
  }
}

std::string_view to_string(Frame frame) noexcept {
  return frame == Frame::lab ? "lab" : "comoving";
}

Frame parse_frame(std::string_view text) {
  if (text == "lab") return Frame::lab;
  if (text == "comoving") return Frame::comoving;
  throw ConfigError("unknown frame '" + std::string(text) + "' (expected lab or comoving)");
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

Grid::Grid(double half_length, std::size_t n_points, Frame frame)
    : half_length_(half_length), n_(n_points), frame_(frame) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw ConfigError("grid: half length must be positive");
  }
  if (n_points < 8 || !is_power_of_two(n_points)) {
    throw ConfigError("grid: N must be a power of two >= 8 (got " + std::to_string(n_points) + ")");
  }
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

Field::Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ConfigError("field: " + std::to_string(values_.size()) + " values for a grid of " +
                      std::to_string(grid_.size()));
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw ConsistencyError("field: non-finite sample");
  }
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<double>(grid.size(), 0.0)); }

Field Field::sample(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
  return Field(grid, std::move(v));
}

Field& Field::operator+=(const Field& other) {
  if (!(other.grid_ == grid_)) throw ConfigError("field: grid mismatch");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(other.grid_ == grid_)) throw ConfigError("field: grid mismatch");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

Field& Field::operator*=(double c) noexcept {
  for (double& v : values_) v *= c;
  return *this;
}

Spectrum::Spectrum(Grid grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) throw ConfigError("spectrum: size mismatch");
}

cplx Spectrum::at(std::ptrdiff_t k) const {
  const auto half = static_cast<std::ptrdiff_t>(coeffs_.size() / 2);
  if (k < -half || k >= half) throw DomainError("spectrum: wavenumber index out of range");
  return coeffs_[static_cast<std::size_t>(k + half)];
}

cplx& Spectrum::at(std::ptrdiff_t k) {
  const auto half = static_cast<std::ptrdiff_t>(coeffs_.size() / 2);
  if (k < -half || k >= half) throw DomainError("spectrum: wavenumber index out of range");
  return coeffs_[static_cast<std::size_t>(k + half)];
}

Spectrum transform(const Field& field) {
  const Grid& grid = field.grid();
  const std::size_t n = grid.size();
  const SpectralWorkspace ws(grid);
  const std::vector<cplx> half = ws.forward(field.values());
  std::vector<cplx> full(n);
  const std::size_t mid = n / 2;
  // Real input: c_{-k} = conj(c_k). The Nyquist slot k = -N/2 is real.
  for (std::size_t k = 0; k < mid; ++k) {
    full[mid + k] = half[k];
    if (k > 0) full[mid - k] = std::conj(half[k]);
  }
  full[0] = half[mid];
  return Spectrum(grid, std::move(full));
}

Field inverse_transform(const Spectrum& spectrum) {
  const std::vector<cplx> samples = detail::complex_inverse(spectrum.grid(), spectrum.coeffs());
  double peak = 0.0;
  double residue = 0.0;
  for (const cplx& s : samples) {
    peak = std::max(peak, std::abs(s.real()));
    residue = std::max(residue, std::abs(s.imag()));
  }
  if (residue > 1e-9 * peak && residue > 1e-300) {
    std::ostringstream msg;
    msg << "inverse_transform: imaginary residue " << residue << " exceeds 1e-9 of field norm "
        << peak;
    throw ConsistencyError(msg.str());
  }
  std::vector<double> values(samples.size());
  std::transform(samples.begin(), samples.end(), values.begin(), [](cplx s) { return s.real(); });
  return Field(spectrum.grid(), std::move(values));
}

double lq_norm(std::span<const double> values, double dx, double q) {
  if (std::isnan(q) || q < 1.0) throw DomainError("lq_norm: q must be >= 1 or infinity");
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  if (std::isinf(q) || peak == 0.0) return peak;
  double sum = 0.0;
  if (q == 2.0) {
    for (double v : values) sum += (v / peak) * (v / peak);
    return peak * std::sqrt(sum * dx);
  }
  for (double v : values) sum += std::pow(std::abs(v) / peak, q);
  return peak * std::pow(sum * dx, 1.0 / q);
}

double lq_norm(const Field& field, double q) { return lq_norm(field.values(), field.grid().dx(), q); }

bool decays_at_boundary(std::span<const double> values, double rel_tol) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return true;
  const std::size_t band = std::max<std::size_t>(2, values.size() / 256);
  for (std::size_t j = 0; j < band; ++j) {
    if (std::abs(values[j]) > rel_tol * peak) return false;
    if (std::abs(values[values.size() - 1 - j]) > rel_tol * peak) return false;
  }
  return true;
}

MomentResult moment(const Field& field, int order) {
  if (order != 0 && order != 1) throw DomainError("moment: order must be 0 or 1");
  const Grid& grid = field.grid();
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    sum += (order == 0 ? 1.0 : grid.x(j)) * field[j];
  }
  return {sum * grid.dx(), !decays_at_boundary(field.values())};
}

}  // namespace fwdiss
