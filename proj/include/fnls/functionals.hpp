#pragma once

// Energy-type functionals: the modified energy E_m and its correction
// integrals, the first three conserved quantities of the integrable case,
// and the difference energies used for uniqueness and continuity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "fnls/dynamics.hpp"
#include "fnls/random_fields.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

/// Refinement used for every quadrature below; exact for integrands up to
/// degree 7 in band-limited fields.
inline constexpr int kQuadraturePad = 4;

// ---------------------------------------------------------------------------
// Modified energy

struct CorrectionTerms {
  double quadratic_phase;  ///< (l5/nu) Re int (d^{m-1} psi)^2 conj(psi)^2
  double modulus;          ///< (2 l3 + l4 + 2(m-1) l6)/(4 nu) int |d^{m-1} psi|^2 |psi|^2

  double sum() const noexcept { return quadratic_phase + modulus; }
};

/// Weight of the |d^{m-1} psi|^2 |psi|^2 correction.
inline double modulus_weight(int m, const CoefficientSet& c) {
  return (2.0 * c.lambda(3) + c.lambda(4) + 2.0 * (m - 1) * c.lambda(6)) / (4.0 * c.nu());
}

inline double phase_weight(const CoefficientSet& c) { return c.lambda(5) / c.nu(); }

inline CorrectionTerms correction_terms(const SpectralField& psi, int m, const CoefficientSet& c) {
  if (m < 1) throw std::invalid_argument("correction_terms: m must be >= 1");
  const double wp = phase_weight(c);
  const double wm = modulus_weight(m, c);
  if (wp == 0.0 && wm == 0.0) return {0.0, 0.0};

  const auto u = to_physical_padded(psi, kQuadraturePad);
  const auto d = to_physical_padded(derivative(psi, m - 1), kQuadraturePad);
  const auto us = u.samples();
  const auto ds = d.samples();
  double phase_acc = 0.0, mod_acc = 0.0;
  for (std::size_t j = 0; j < us.size(); ++j) {
    const Complex cu = std::conj(us[j]);
    phase_acc += (ds[j] * ds[j] * cu * cu).real();
    mod_acc += std::norm(ds[j]) * std::norm(us[j]);
  }
  const double h = u.grid().spacing();
  return {wp * phase_acc * h, wm * mod_acc * h};
}

/// ||d^m psi||^2 + ||psi||^2, the energy without corrections.
inline double raw_energy(const SpectralField& psi, int m) {
  return derivative_norm_sq(psi, m) + l2_norm_sq(psi);
}

/// E_m = ||d^m psi||^2 + ||psi||^2 + c_m ||psi||^{4m+2} + corrections.
inline double modified_energy(const SpectralField& psi, int m, const CoefficientSet& c,
                              double c_m) {
  if (m < 1) throw std::invalid_argument("modified_energy: m must be >= 1");
  if (!(c_m >= 0.0)) throw std::invalid_argument("modified_energy: c_m must be >= 0");
  const double l2sq = l2_norm_sq(psi);
  return derivative_norm_sq(psi, m) + l2sq + c_m * std::pow(l2sq, 2 * m + 1) +
         correction_terms(psi, m, c).sum();
}

/// Evidence that c_m keeps E_m >= (||d^m psi||^2 + ||psi||^2)/2 on a sample set.
struct CmCertificate {
  int m;
  CoefficientSet coefficients;
  double c_m;
  int trials;
  double worst_margin;  ///< min over samples of E_m - (||d^m psi||^2 + ||psi||^2)/2
  double l2_ceiling;
};

/// Resolutions cycled through by certify_cm.
inline constexpr int kCertifyGrids[] = {32, 64, 128};

/// Random sample used by certify_cm: random band, decay and L^2 size.
inline SpectralField certification_sample(int num_modes, double l2_ceiling, std::mt19937_64& rng) {
  GridSpec grid(num_modes);
  std::uniform_int_distribution<int> band_dist(1, num_modes / 4);
  std::uniform_real_distribution<double> rate_dist(0.0, 1.0);
  std::uniform_real_distribution<double> size_dist(0.0, 1.0);
  FieldProfile profile{band_dist(rng), rate_dist(rng), DecayKind::Exponential};
  SpectralField psi = random_field(grid, profile, rng);
  const double target = l2_ceiling * size_dist(rng);
  const double l2 = l2_norm(psi);
  if (l2 > 0.0) psi *= Complex(target / l2);
  return psi;
}

/// Randomized search for a constant c_m making E_m coercive.
///
/// For each sample the smallest admissible constant is
///   (-(A + B)/2 - corrections) / ||psi||^{4m+2},  A = ||d^m psi||^2, B = ||psi||^2;
/// the certificate keeps twice the largest such value (or 0).
inline CmCertificate certify_cm(int m, const CoefficientSet& c, double l2_ceiling, int trials,
                                std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("certify_cm: trials must be >= 1");
  if (m < 1) throw std::invalid_argument("certify_cm: m must be >= 1");
  if (!(l2_ceiling > 0.0)) throw std::invalid_argument("certify_cm: l2_ceiling must be positive");

  std::mt19937_64 rng(seed);
  struct Sample {
    double top, l2sq, corr;
  };
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(trials));
  double needed = 0.0;
  for (int k = 0; k < trials; ++k) {
    const int n = kCertifyGrids[k % std::size(kCertifyGrids)];
    const SpectralField psi = certification_sample(n, l2_ceiling, rng);
    Sample s{derivative_norm_sq(psi, m), l2_norm_sq(psi), correction_terms(psi, m, c).sum()};
    const double deficit = -0.5 * (s.top + s.l2sq) - s.corr;
    if (deficit > 0.0 && s.l2sq > 0.0) needed = std::max(needed, deficit / std::pow(s.l2sq, 2 * m + 1));
    samples.push_back(s);
  }
  const double c_m = 2.0 * needed;
  double worst = kInfinity;
  for (const auto& s : samples) {
    const double energy = s.top + s.l2sq + c_m * std::pow(s.l2sq, 2 * m + 1) + s.corr;
    worst = std::min(worst, energy - 0.5 * (s.top + s.l2sq));
  }
  return {m, c, c_m, trials, worst, l2_ceiling};
}

// ---------------------------------------------------------------------------
// Conserved quantities of the integrable case

struct ConservedQuantities {
  double i0;
  double i1;
  double i2;
  double i2_imag_residual;  ///< imaginary part left by the raw I_2 quadrature
};

/// I_0 = 1/2 int |psi|^2
/// I_1 = 1/2 int |psi_x|^2 - 1/8 int |psi|^4
/// I_2 = 1/2 int |psi_xx|^2 + 3/4 int |psi|^2 conj(psi) psi_xx + 1/8 int |psi|^2 psi conj(psi_xx)
///       + 5/8 int (psi_x)^2 conj(psi)^2 + 3/4 int |psi_x|^2 |psi|^2 + 1/16 int |psi|^6
inline ConservedQuantities conserved_quantities(const SpectralField& psi) {
  const auto u = to_physical_padded(psi, kQuadraturePad);
  const auto ux = to_physical_padded(derivative(psi, 1), kQuadraturePad);
  const auto uxx = to_physical_padded(derivative(psi, 2), kQuadraturePad);
  const auto us = u.samples();
  const auto uxs = ux.samples();
  const auto uxxs = uxx.samples();

  double quartic = 0.0;
  Complex i2_nonlinear{0.0, 0.0};
  for (std::size_t j = 0; j < us.size(); ++j) {
    const Complex v = us[j], vx = uxs[j], vxx = uxxs[j];
    const Complex cv = std::conj(v);
    const double a = std::norm(v);
    quartic += a * a;
    i2_nonlinear += 0.75 * a * cv * vxx + 0.125 * a * v * std::conj(vxx) +
                    0.625 * vx * vx * cv * cv + 0.75 * std::norm(vx) * a + a * a * a / 16.0;
  }
  const double h = u.grid().spacing();
  i2_nonlinear *= h;

  ConservedQuantities q{};
  q.i0 = 0.5 * l2_norm_sq(psi);
  q.i1 = 0.5 * derivative_norm_sq(psi, 1) - 0.125 * quartic * h;
  q.i2 = 0.5 * derivative_norm_sq(psi, 2) + i2_nonlinear.real();
  q.i2_imag_residual = i2_nonlinear.imag();
  return q;
}

// ---------------------------------------------------------------------------
// Difference energies

/// Weights on the quartic terms of the difference energy for m >= 2.
enum class DifferenceWeights {
  LambdaWeighted,  ///< same weights as the E_m corrections
  Unit,            ///< unit weights on both quartic terms
};

/// Energy of the difference psi measured against a reference solution `ref`:
///   ||d^m psi||^2 + c_tilde ||psi||^2 + w_mod int |ref|^2 |d^{m-1} psi|^2
///     + w_phase Re int ref^2 conj(d^{m-1} psi)^2
/// For m = 1 the weights are always (2 l3 + l4)/(4 nu) and l5/nu.
inline double difference_energy(const SpectralField& psi, const SpectralField& ref, int m,
                                const CoefficientSet& c, double c_tilde,
                                DifferenceWeights weights = DifferenceWeights::LambdaWeighted) {
  if (m < 1) throw std::invalid_argument("difference_energy: m must be >= 1");
  if (!(psi.grid() == ref.grid())) throw std::invalid_argument("difference_energy: grid mismatch");

  double w_mod = modulus_weight(m, c);
  double w_phase = phase_weight(c);
  if (m >= 2 && weights == DifferenceWeights::Unit) w_mod = w_phase = 1.0;

  double quartic = 0.0;
  if (w_mod != 0.0 || w_phase != 0.0) {
    const auto r = to_physical_padded(ref, kQuadraturePad);
    const auto d = to_physical_padded(derivative(psi, m - 1), kQuadraturePad);
    const auto rs = r.samples();
    const auto ds = d.samples();
    double mod_acc = 0.0, phase_acc = 0.0;
    for (std::size_t j = 0; j < rs.size(); ++j) {
      const Complex cd = std::conj(ds[j]);
      mod_acc += std::norm(rs[j]) * std::norm(ds[j]);
      phase_acc += (rs[j] * rs[j] * cd * cd).real();
    }
    quartic = (w_mod * mod_acc + w_phase * phase_acc) * r.grid().spacing();
  }
  return derivative_norm_sq(psi, m) + c_tilde * l2_norm_sq(psi) + quartic;
}

/// A constant c_tilde for which the m = 1 difference energy dominates
/// ||psi||_{H^1}^2 whenever sup |ref|^2 <= ref_sup_sq:
///   1 + (|2 l3 + l4|/(4|nu|) + |l5/nu|) * ref_sup_sq.
inline double difference_energy_constant(const CoefficientSet& c, double ref_sup_sq) {
  return 1.0 + (std::abs(modulus_weight(1, c)) + std::abs(phase_weight(c))) * ref_sup_sq;
}

// ---------------------------------------------------------------------------
// Time series along a trajectory

struct EnergyReport {
  int m = 0;
  double c_m_used = 0.0;
  bool c_m_certified = false;
  std::vector<double> times;
  std::vector<double> h_m_norm_sq;         ///< sum <n>^{2m} |psi_hat|^2
  std::vector<double> top_derivative_sq;  ///< ||d^m psi||^2
  std::vector<double> l2_norm_sq;
  std::vector<double> modified_energy;
  std::vector<double> i0, i1, i2;

  std::size_t size() const noexcept { return times.size(); }
};

/// Observer that appends one EnergyReport row per trajectory sample.
class EnergyRecorder {
 public:
  EnergyRecorder(int m, CoefficientSet c, double c_m, bool certified = false)
      : coeffs_(c) {
    report_.m = m;
    report_.c_m_used = c_m;
    report_.c_m_certified = certified;
  }

  void record(const TrajectorySample& s) {
    const auto& psi = s.state;
    const int m = report_.m;
    report_.times.push_back(s.time);
    report_.h_m_norm_sq.push_back(sobolev_norm_sq(psi, m));
    report_.top_derivative_sq.push_back(derivative_norm_sq(psi, m));
    report_.l2_norm_sq.push_back(fnls::l2_norm_sq(psi));
    report_.modified_energy.push_back(fnls::modified_energy(psi, m, coeffs_, report_.c_m_used));
    const auto q = conserved_quantities(psi);
    report_.i0.push_back(q.i0);
    report_.i1.push_back(q.i1);
    report_.i2.push_back(q.i2);
  }

  Observer observer() {
    return [this](const TrajectorySample& s) { record(s); };
  }

  const EnergyReport& report() const noexcept { return report_; }

 private:
  CoefficientSet coeffs_;
  EnergyReport report_;
};

}  // namespace fnls
