#pragma once

// Closed-form solutions and special coefficient sets.

#include <cmath>
#include <stdexcept>

#include "fnls/dynamics.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

/// The coefficient set for which the equation is completely integrable:
/// l1 = -1/2, l2 = -3nu/8, l3 = -3nu/2, l4 = -nu, l5 = -nu/2, l6 = -2nu.
inline CoefficientSet integrable_coefficients(double nu) {
  if (nu == 0.0) throw std::invalid_argument("integrable_coefficients: nu must be nonzero");
  return CoefficientSet(nu, {-0.5, -3.0 * nu / 8.0, -1.5 * nu, -nu, -0.5 * nu, -2.0 * nu});
}

struct StandingWave {
  SpectralField initial;
  double omega;
  double kappa;
  int tau;
};

/// Frequency omega for which kappa e^{i tau x + i omega t} is an exact solution:
///   omega = -tau^2 + nu tau^4 - l1 kappa^2 - l2 kappa^4 + (l3 - l4 + l5 + l6) tau^2 kappa^2.
inline double standing_wave_frequency(double kappa, int tau, const CoefficientSet& c) {
  const double t2 = double(tau) * tau;
  const double k2 = kappa * kappa;
  return -t2 + c.nu() * t2 * t2 - c.lambda(1) * k2 - c.lambda(2) * k2 * k2 +
         (c.lambda(3) - c.lambda(4) + c.lambda(5) + c.lambda(6)) * t2 * k2;
}

inline StandingWave standing_wave(double kappa, int tau, const CoefficientSet& c,
                                  const GridSpec& grid) {
  if (!grid.resolves(tau) || tau == grid.nyquist_mode()) {
    throw std::invalid_argument("standing_wave: tau not resolved on grid");
  }
  return {SpectralField::plane_wave(grid, tau, kappa), standing_wave_frequency(kappa, tau, c),
          kappa, tau};
}

/// L^2 norm of i psi_t + psi_xx + nu psi_xxxx - N(psi) at t = 0 for
/// psi = psi0 e^{i omega t}, i.e. psi_t = i omega psi0.
inline double standing_wave_residual(const SpectralField& psi0, double omega,
                                     const CoefficientSet& c, int pad = 3) {
  SpectralField r = derivative(psi0, 2);
  r += Complex(c.nu()) * derivative(psi0, 4);
  r -= Complex(omega) * psi0;
  r -= eval_nonlinearity(psi0, c, pad);
  return l2_norm(r);
}

/// Free evolution without regularization; valid for any real t.
inline SpectralField linear_solution(const SpectralField& psi0, double t, double nu) {
  return semigroup_apply(psi0, t, 0.0, nu);
}

}  // namespace fnls
