#include "fwdiss/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>

#include "fwdiss/error.hpp"
#include "spectral_detail.hpp"

namespace fwdiss {

namespace detail {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

struct SpectralWorkspace::Plans {
  double* real = nullptr;
  fftw_complex* half = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Plans(std::size_t n) {
    std::lock_guard lock(detail::fftw_planner_mutex());
    real = fftw_alloc_real(n);
    half = fftw_alloc_complex(n / 2 + 1);
    const int ni = static_cast<int>(n);
    r2c = fftw_plan_dft_r2c_1d(ni, real, half, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_1d(ni, half, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(half);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

SpectralWorkspace::SpectralWorkspace(const Grid& grid)
    : grid_(grid), xi_(grid.size() / 2 + 1), sign_(grid.size() / 2 + 1),
      plans_(std::make_unique<Plans>(grid.size())) {
  for (std::size_t k = 0; k < xi_.size(); ++k) {
    xi_[k] = grid.xi(static_cast<std::ptrdiff_t>(k));
    sign_[k] = (k % 2 == 0) ? 1.0 : -1.0;
  }
}

SpectralWorkspace::~SpectralWorkspace() = default;
SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&&) noexcept = default;
SpectralWorkspace& SpectralWorkspace::operator=(SpectralWorkspace&&) noexcept = default;

void SpectralWorkspace::forward(std::span<const double> values, std::span<cplx> half) const {
  const std::size_t n = grid_.size();
  if (values.size() != n || half.size() != half_size()) {
    throw ConfigError("SpectralWorkspace::forward: size mismatch");
  }
  std::copy(values.begin(), values.end(), plans_->real);
  fftw_execute(plans_->r2c);
  const double scale = grid_.dx() / std::sqrt(2.0 * kPi);
  for (std::size_t k = 0; k < half.size(); ++k) {
    half[k] = cplx(plans_->half[k][0], plans_->half[k][1]) * (scale * sign_[k]);
  }
}

void SpectralWorkspace::inverse(std::span<const cplx> half, std::span<double> values) const {
  const std::size_t n = grid_.size();
  if (values.size() != n || half.size() != half_size()) {
    throw ConfigError("SpectralWorkspace::inverse: size mismatch");
  }
  const double scale = grid_.dxi() / std::sqrt(2.0 * kPi);
  for (std::size_t k = 0; k < half.size(); ++k) {
    const cplx c = half[k] * (scale * sign_[k]);
    plans_->half[k][0] = c.real();
    plans_->half[k][1] = c.imag();
  }
  fftw_execute(plans_->c2r);
  std::copy(plans_->real, plans_->real + n, values.begin());
}

std::vector<cplx> SpectralWorkspace::forward(std::span<const double> values) const {
  std::vector<cplx> half(half_size());
  forward(values, half);
  return half;
}

std::vector<double> SpectralWorkspace::inverse(std::span<const cplx> half) const {
  std::vector<double> values(grid_.size());
  inverse(half, values);
  return values;
}

// Full complex inverse used by inverse_transform, which must see the
// imaginary residue of spectra that are not conjugate-symmetric.
std::vector<cplx> detail::complex_inverse(const Grid& grid, std::span<const cplx> centred) {
  const std::size_t n = grid.size();
  fftw_complex* buf = nullptr;
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(fftw_planner_mutex());
    buf = fftw_alloc_complex(n);
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  const double scale = grid.dxi() / std::sqrt(2.0 * kPi);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i) - half;
    const std::size_t slot = static_cast<std::size_t>((k + static_cast<std::ptrdiff_t>(n)) %
                                                      static_cast<std::ptrdiff_t>(n));
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const cplx c = centred[i] * (scale * sign);
    buf[slot][0] = c.real();
    buf[slot][1] = c.imag();
  }
  fftw_execute(plan);
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = cplx(buf[j][0], buf[j][1]);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(buf);
  }
  return out;
}

}  // namespace fwdiss
