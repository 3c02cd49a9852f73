#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fnls/spectral.hpp"

namespace fnls {

enum class DecayKind {
  Exponential,  ///< |psi_hat(n)| ~ exp(-rate |n|)
  Algebraic,    ///< |psi_hat(n)| ~ <n>^{-rate}
};

/// Shape of the coefficient envelope of a random field.
struct FieldProfile {
  int band = 8;  ///< modes with |n| <= band are populated
  double rate = 0.5;
  DecayKind kind = DecayKind::Exponential;

  double envelope(int n) const {
    return kind == DecayKind::Exponential ? std::exp(-rate * std::abs(n))
                                          : std::pow(japanese_bracket(n), -rate);
  }
};

/// Complex Gaussian coefficients times the profile envelope on |n| <= band.
/// Modes are drawn in the order -band..band, so the same generator state
/// yields the same field on every grid that resolves the band.
inline SpectralField random_field(const GridSpec& grid, const FieldProfile& profile,
                                  std::mt19937_64& rng) {
  if (profile.band < 0) throw std::invalid_argument("random_field: band must be >= 0");
  const int band = std::min(profile.band, grid.max_mode());
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField psi(grid);
  for (int n = -band; n <= band; ++n) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    psi[n] = Complex(re, im) * profile.envelope(n);
  }
  return psi;
}

/// psi scaled to the given H^m norm (zero fields are returned unchanged).
inline SpectralField normalized_hm(SpectralField psi, int m, double target) {
  const double norm = sobolev_norm(psi, m);
  if (norm > 0.0) psi *= Complex(target / norm);
  return psi;
}

}  // namespace fnls
