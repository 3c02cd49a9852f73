#pragma once

// Periodic grids on [0, 2pi), Fourier coefficients and the norms used
// throughout the library.
//
// Coefficient convention: psi_hat(n) = (2 pi)^{-1/2} int_0^{2pi} psi(x) e^{-inx} dx,
// so that psi(x) = (2 pi)^{-1/2} sum_n psi_hat(n) e^{inx} and
// int |psi|^2 dx = sum_n |psi_hat(n)|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fnls/fft.hpp"

namespace fnls {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline const double kSqrtTwoPi = std::sqrt(kTwoPi);

/// Uniform grid of N nodes x_j = 2 pi j / N on the torus.
class GridSpec {
 public:
  explicit GridSpec(int num_modes) : n_(num_modes) {
    if (num_modes < 4 || num_modes % 2 != 0) {
      throw std::invalid_argument("GridSpec: num_modes must be even and >= 4, got " +
                                  std::to_string(num_modes));
    }
  }

  int size() const noexcept { return n_; }
  int min_mode() const noexcept { return -n_ / 2; }
  int max_mode() const noexcept { return n_ / 2 - 1; }
  int nyquist_mode() const noexcept { return -n_ / 2; }
  bool resolves(int n) const noexcept { return n >= min_mode() && n <= max_mode(); }

  double node(int j) const noexcept { return kTwoPi * j / n_; }
  double spacing() const noexcept { return kTwoPi / n_; }

  /// Storage slot of signed mode n (FFT order).
  std::size_t index_of(int n) const {
    if (!resolves(n)) {
      throw std::out_of_range("mode " + std::to_string(n) +
                              " not resolved on grid of size " + std::to_string(n_));
    }
    return static_cast<std::size_t>(n >= 0 ? n : n + n_);
  }

  /// Signed mode stored at FFT-order slot idx.
  int mode_at(std::size_t idx) const noexcept {
    const int i = static_cast<int>(idx);
    return i < n_ / 2 ? i : i - n_;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int n_;
};

/// Visit every resolved mode in ascending |n| (0, 1, -1, 2, -2, ..., -N/2).
/// All norms sum in this order so results do not depend on storage layout.
template <class F>
void for_each_mode_by_magnitude(const GridSpec& grid, F&& f) {
  f(0);
  for (int k = 1; k < grid.size() / 2; ++k) {
    f(k);
    f(-k);
  }
  f(grid.nyquist_mode());
}

/// Sampled values psi(x_j) on a grid.
class PhysicalField {
 public:
  explicit PhysicalField(GridSpec grid)
      : grid_(grid), samples_(static_cast<std::size_t>(grid.size())) {}

  PhysicalField(GridSpec grid, std::vector<Complex> samples)
      : grid_(grid), samples_(std::move(samples)) {
    if (static_cast<int>(samples_.size()) != grid_.size()) {
      throw std::invalid_argument("PhysicalField: sample count must equal N");
    }
  }

  template <class F>
  static PhysicalField from_function(GridSpec grid, F&& f) {
    PhysicalField out(grid);
    for (int j = 0; j < grid.size(); ++j) out.samples_[j] = f(grid.node(j));
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const Complex> samples() const noexcept { return samples_; }
  std::span<Complex> samples() noexcept { return samples_; }
  const Complex& operator[](std::size_t j) const { return samples_[j]; }
  Complex& operator[](std::size_t j) { return samples_[j]; }

 private:
  GridSpec grid_;
  std::vector<Complex> samples_;
};

/// Fourier coefficients psi_hat(n), n = -N/2 .. N/2-1, stored in FFT order.
class SpectralField {
 public:
  explicit SpectralField(GridSpec grid)
      : grid_(grid), coeffs_(static_cast<std::size_t>(grid.size())) {}

  SpectralField(GridSpec grid, std::vector<Complex> coeffs)
      : grid_(grid), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != grid_.size()) {
      throw std::invalid_argument("SpectralField: coefficient count must equal N");
    }
  }

  /// amplitude * e^{i n x} as a field: psi_hat(n) = sqrt(2 pi) * amplitude.
  static SpectralField plane_wave(GridSpec grid, int n, Complex amplitude) {
    SpectralField out(grid);
    out[n] = kSqrtTwoPi * amplitude;
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.size(); }

  Complex operator[](int n) const { return coeffs_[grid_.index_of(n)]; }
  Complex& operator[](int n) { return coeffs_[grid_.index_of(n)]; }

  /// Raw FFT-order storage.
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }

  bool is_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  SpectralField& operator+=(const SpectralField& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(Complex a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, Complex s) { return a *= s; }

 private:
  void check_same_grid(const SpectralField& o) const {
    if (!(o.grid_ == grid_)) throw std::invalid_argument("SpectralField: grid mismatch");
  }

  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

/// Multiply each coefficient by f(n). f returns a Complex (or something convertible).
template <class F>
SpectralField apply_multiplier(SpectralField psi, F&& f) {
  auto c = psi.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= f(psi.grid().mode_at(i));
  return psi;
}

// ---------------------------------------------------------------------------
// Transforms

/// Trapezoid/DFT approximation of the coefficient integral:
/// psi_hat(n) = sqrt(2 pi)/N * sum_j psi(x_j) e^{-i n x_j}.
inline SpectralField to_spectral(const PhysicalField& f) {
  const int n = f.grid().size();
  std::vector<Complex> out(static_cast<std::size_t>(n));
  detail::DftPlan::get(n).forward(f.samples(), out);
  const double scale = kSqrtTwoPi / n;
  for (auto& c : out) c *= scale;
  return SpectralField(f.grid(), std::move(out));
}

/// psi(x_j) = (2 pi)^{-1/2} sum_n psi_hat(n) e^{i n x_j}.
inline PhysicalField to_physical(const SpectralField& psi) {
  const int n = psi.size();
  std::vector<Complex> out(static_cast<std::size_t>(n));
  detail::DftPlan::get(n).backward(psi.coeffs(), out);
  const double scale = 1.0 / kSqrtTwoPi;
  for (auto& c : out) c *= scale;
  return PhysicalField(psi.grid(), std::move(out));
}

/// Embed the coefficients of psi in a grid `pad` times finer (zero padding).
/// The Nyquist mode of the coarse grid maps to -N/2 on the fine grid.
inline SpectralField zero_pad(const SpectralField& psi, int pad) {
  if (pad < 1) throw std::invalid_argument("zero_pad: pad must be >= 1");
  if (pad == 1) return psi;
  GridSpec fine(psi.size() * pad);
  SpectralField out(fine);
  for (int n = psi.grid().min_mode(); n <= psi.grid().max_mode(); ++n) out[n] = psi[n];
  return out;
}

/// Keep the modes resolved on `coarse`; the coarse Nyquist mode is set to zero.
inline SpectralField truncate(const SpectralField& psi, GridSpec coarse) {
  if (coarse.size() > psi.size()) throw std::invalid_argument("truncate: target grid is finer");
  SpectralField out(coarse);
  for (int n = coarse.min_mode() + 1; n <= coarse.max_mode(); ++n) out[n] = psi[n];
  return out;
}

/// Samples of psi on the grid refined by `pad`.
inline PhysicalField to_physical_padded(const SpectralField& psi, int pad) {
  return to_physical(zero_pad(psi, pad));
}

/// Trapezoid rule for int_0^{2pi} f dx over the samples of f.
inline Complex integrate_samples(std::span<const Complex> f) {
  Complex acc{0.0, 0.0};
  for (const auto& v : f) acc += v;
  return acc * (kTwoPi / static_cast<double>(f.size()));
}

// ---------------------------------------------------------------------------
// Derivatives and norms

/// Coefficient n multiplied by (i n)^k.
inline SpectralField derivative(const SpectralField& psi, int k) {
  if (k < 0) throw std::invalid_argument("derivative: order must be >= 0");
  if (k == 0) return psi;
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = kIPow[k % 4];
  return apply_multiplier(psi, [&](int n) {
    return phase * std::pow(static_cast<double>(n), k);
  });
}

/// <n> = sqrt(1 + n^2).
inline double japanese_bracket(double n) { return std::sqrt(1.0 + n * n); }

/// sum_n w(n) |psi_hat(n)|^2, summed in ascending |n|.
template <class W>
double weighted_norm_sq(const SpectralField& psi, W&& weight) {
  double acc = 0.0;
  for_each_mode_by_magnitude(psi.grid(), [&](int n) { acc += weight(n) * std::norm(psi[n]); });
  return acc;
}

/// ||psi||_{H^m}^2 = sum <n>^{2m} |psi_hat(n)|^2 over resolved modes.
inline double sobolev_norm_sq(const SpectralField& psi, int m) {
  if (m < 0) throw std::invalid_argument("sobolev_norm: m must be >= 0");
  return weighted_norm_sq(psi, [m](int n) { return std::pow(1.0 + double(n) * n, m); });
}

inline double sobolev_norm(const SpectralField& psi, int m) {
  return std::sqrt(sobolev_norm_sq(psi, m));
}

/// ||psi||_{L^2}^2 = int |psi|^2 dx.
inline double l2_norm_sq(const SpectralField& psi) { return sobolev_norm_sq(psi, 0); }
inline double l2_norm(const SpectralField& psi) { return std::sqrt(l2_norm_sq(psi)); }

/// ||d^k psi||_{L^2}^2 = sum n^{2k} |psi_hat(n)|^2.
inline double derivative_norm_sq(const SpectralField& psi, int k) {
  if (k < 0) throw std::invalid_argument("derivative_norm: order must be >= 0");
  return weighted_norm_sq(psi, [k](int n) { return std::pow(double(n), 2 * k); });
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Trapezoid approximation of (int |f|^p dx)^{1/p}; p = infinity gives max |f(x_j)|.
inline double lp_norm(const PhysicalField& f, double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("lp_norm: p must be >= 2");
  const auto s = f.samples();
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& v : s) mx = std::max(mx, std::abs(v));
    return mx;
  }
  double acc = 0.0;
  for (const auto& v : s) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid().spacing(), 1.0 / p);
}

/// Interpolation exponent of the periodic Gagliardo-Nirenberg inequality,
/// alpha = (l + 1/2 - 1/p) / m.
inline double gn_exponent(int l, int m, double p) {
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  return (l + 0.5 - inv_p) / m;
}

/// ||d^l psi||_{L^p} divided by the interpolation bound with unit constant:
///   ||psi||^{1-alpha} ||d^m psi||^alpha              (l >= 1)
///   ||psi||^{1-alpha} ||d^m psi||^alpha + ||psi||    (l = 0)
/// Norms on the right are L^2.
inline double gn_ratio(const SpectralField& psi, int l, int m, double p) {
  if (l < 0 || m < 1 || l > m - 1) {
    throw std::invalid_argument("gn_ratio: need 0 <= l <= m-1");
  }
  if (!(p >= 2.0)) throw std::invalid_argument("gn_ratio: p must be >= 2");
  const double l2 = l2_norm(psi);
  if (l2 == 0.0) throw std::invalid_argument("gn_ratio: zero field");

  const double numerator = lp_norm(to_physical(derivative(psi, l)), p);
  if (numerator == 0.0) return 0.0;
  const double alpha = gn_exponent(l, m, p);
  const double top = std::sqrt(derivative_norm_sq(psi, m));
  double rhs = std::pow(l2, 1.0 - alpha) * std::pow(top, alpha);
  if (l == 0) rhs += l2;
  return numerator / rhs;
}

}  // namespace fnls
