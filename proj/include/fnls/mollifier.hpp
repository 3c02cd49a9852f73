#pragma once

// Fourier-multiplier mollification of initial data with a kernel that is
// flat at the origin: phi(xi) = exp(-xi^2 exp(-1/xi^2)), phi(0) = 1.

#include <cmath>
#include <stdexcept>

#include "fnls/spectral.hpp"

namespace fnls {

/// Kernel value in [0, 1]; every derivative vanishes at 0 and the decay is
/// Gaussian for |xi| >> 1.
inline double kernel_value(double xi) {
  if (xi == 0.0) return 1.0;
  const double x2 = xi * xi;
  return std::exp(-x2 * std::exp(-1.0 / x2));
}

/// Coefficient n multiplied by kernel_value(eps * n).
inline SpectralField mollify(const SpectralField& data, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("mollify: epsilon must lie in (0, 1]");
  }
  return apply_multiplier(data, [epsilon](int n) { return Complex(kernel_value(epsilon * n)); });
}

/// Data with psi_hat(n) = <n>^{-(m + excess)}: in H^m, but not in H^{m + excess + 1/2}.
/// The Nyquist mode is left empty.
inline SpectralField critical_decay_data(const GridSpec& grid, int m, double excess = 0.6) {
  SpectralField psi(grid);
  for (int n = grid.min_mode() + 1; n <= grid.max_mode(); ++n) {
    psi[n] = std::pow(japanese_bracket(n), -(m + excess));
  }
  return psi;
}

}  // namespace fnls
