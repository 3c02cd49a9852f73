#pragma once

// Independent reference computations used by the tests: O(N^2) discrete
// Fourier sums and pointwise evaluation of trigonometric polynomials, with
// no FFT involved.

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "fnls/dynamics.hpp"
#include "fnls/spectral.hpp"

namespace oracle {

using fnls::Complex;

inline fnls::SpectralField direct_forward(const fnls::PhysicalField& f) {
  const auto& g = f.grid();
  fnls::SpectralField out(g);
  for (int n = g.min_mode(); n <= g.max_mode(); ++n) {
    Complex acc{0.0, 0.0};
    for (int j = 0; j < g.size(); ++j) acc += f[j] * std::polar(1.0, -n * g.node(j));
    out[n] = acc * (fnls::kSqrtTwoPi / g.size());
  }
  return out;
}

inline fnls::PhysicalField direct_backward(const fnls::SpectralField& psi) {
  const auto& g = psi.grid();
  fnls::PhysicalField out(g);
  for (int j = 0; j < g.size(); ++j) {
    Complex acc{0.0, 0.0};
    for (int n = g.min_mode(); n <= g.max_mode(); ++n) acc += psi[n] * std::polar(1.0, n * g.node(j));
    out[j] = acc / fnls::kSqrtTwoPi;
  }
  return out;
}

inline std::vector<Complex> abs_sq(std::span<const Complex> v) {
  std::vector<Complex> out;
  for (const auto& z : v) out.emplace_back(std::norm(z));
  return out;
}

/// k-th derivative of the trigonometric polynomial with coefficients psi, at x.
inline Complex eval_derivative(const fnls::SpectralField& psi, int k, double x) {
  const auto& g = psi.grid();
  Complex acc{0.0, 0.0};
  for (int n = g.min_mode(); n <= g.max_mode(); ++n) {
    if (psi[n] == Complex(0.0)) continue;
    acc += std::pow(Complex(0.0, double(n)), k) * psi[n] * std::polar(1.0, n * x);
  }
  return acc / fnls::kSqrtTwoPi;
}

/// Pointwise N(psi) from direct trigonometric sums.
inline Complex nonlinearity_at(const fnls::SpectralField& psi, const fnls::CoefficientSet& c, double x) {
  const Complex v = eval_derivative(psi, 0, x);
  const Complex vx = eval_derivative(psi, 1, x);
  const Complex vxx = eval_derivative(psi, 2, x);
  const double a = std::norm(v);
  return c.lambda(1) * a * v + c.lambda(2) * a * a * v + c.lambda(3) * vx * vx * std::conj(v) +
         c.lambda(4) * std::norm(vx) * v + c.lambda(5) * v * v * std::conj(vxx) + c.lambda(6) * a * vxx;
}

/// Coefficients of N(psi) on psi's grid (Nyquist dropped), computed by a
/// direct DFT of pointwise values on a grid fine enough to be alias free.
inline fnls::SpectralField nonlinearity_coefficients(const fnls::SpectralField& psi,
                                                     const fnls::CoefficientSet& c, int refine) {
  const fnls::GridSpec fine(psi.size() * refine);
  const auto values = fnls::PhysicalField::from_function(fine, [&](double x) { return nonlinearity_at(psi, c, x); });
  const auto coeffs = direct_forward(values);
  fnls::SpectralField out(psi.grid());
  for (int n = psi.grid().min_mode() + 1; n <= psi.grid().max_mode(); ++n) out[n] = coeffs[n];
  return out;
}

/// Trapezoid rule on M points for a smooth periodic integrand; exact for
/// trigonometric polynomials of degree < M.
inline Complex quadrature(const std::function<Complex(double)>& f, int points) {
  Complex acc{0.0, 0.0};
  for (int j = 0; j < points; ++j) acc += f(fnls::kTwoPi * j / points);
  return acc * (fnls::kTwoPi / points);
}

inline double max_abs_diff(const fnls::SpectralField& a, const fnls::SpectralField& b) {
  double mx = 0.0;
  for (int n = a.grid().min_mode(); n <= a.grid().max_mode(); ++n) mx = std::max(mx, std::abs(a[n] - b[n]));
  return mx;
}

}  // namespace oracle
