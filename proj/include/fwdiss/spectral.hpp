#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fwdiss/core.hpp"

namespace fwdiss {

/// Real-to-half-spectrum transforms on one grid, normalized like `transform`.
///
/// Slot k = 0..N/2 holds the continuous-transform approximation at xi_k.
/// Each workspace owns its FFTW plans and scratch buffers, so one instance
/// must not be shared between threads; separate instances are independent.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid& grid);
  ~SpectralWorkspace();
  SpectralWorkspace(SpectralWorkspace&&) noexcept;
  SpectralWorkspace& operator=(SpectralWorkspace&&) noexcept;
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t half_size() const noexcept { return grid_.size() / 2 + 1; }
  /// xi_k for k = 0..N/2.
  [[nodiscard]] std::span<const double> wavenumbers() const noexcept { return xi_; }

  void forward(std::span<const double> values, std::span<cplx> half) const;
  void inverse(std::span<const cplx> half, std::span<double> values) const;

  [[nodiscard]] std::vector<cplx> forward(std::span<const double> values) const;
  [[nodiscard]] std::vector<double> inverse(std::span<const cplx> half) const;

  /// Synthesizes samples of the function whose continuous transform is
  /// `symbol(xi)`; the symbol must satisfy symbol(-xi) = conj(symbol(xi)).
  template <class Symbol>
  [[nodiscard]] std::vector<double> synthesize(Symbol&& symbol) const {
    std::vector<cplx> half(half_size());
    for (std::size_t k = 0; k < half.size(); ++k) half[k] = symbol(xi_[k]);
    // The Nyquist slot is shared by +xi and -xi.
    half.back() = cplx(half.back().real(), 0.0);
    half.front() = cplx(half.front().real(), 0.0);
    return inverse(half);
  }

 private:
  struct Plans;
  Grid grid_;
  std::vector<double> xi_;
  std::vector<double> sign_;  // (-1)^k, from the x_0 = -L origin
  std::unique_ptr<Plans> plans_;
};

}  // namespace fwdiss
