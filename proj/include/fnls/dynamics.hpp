#pragma once

// Time evolution for
//   i psi_t + psi_xx + (nu + i eps) psi_xxxx = N(psi),
//   N = l1|psi|^2 psi + l2|psi|^4 psi + l3 (psi_x)^2 conj(psi) + l4 |psi_x|^2 psi
//       + l5 psi^2 conj(psi_xx) + l6 |psi|^2 psi_xx.
//
// The main stepper solves the Duhamel form on each step by Picard
// iteration; an integrating-factor RK4 scheme is kept alongside as an
// independent reference.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

/// Real parameters nu (dispersion, nonzero) and lambda_1..lambda_6.
class CoefficientSet {
 public:
  CoefficientSet(double nu, std::array<double, 6> lambda) : nu_(nu), lambda_(lambda) {
    if (nu == 0.0 || !std::isfinite(nu)) {
      throw std::invalid_argument("CoefficientSet: nu must be finite and nonzero");
    }
  }

  /// The linear equation (all lambda_j = 0).
  static CoefficientSet linear(double nu) { return CoefficientSet(nu, {}); }

  double nu() const noexcept { return nu_; }
  /// lambda_j for j = 1..6.
  double lambda(int j) const { return lambda_.at(static_cast<std::size_t>(j - 1)); }
  const std::array<double, 6>& lambdas() const noexcept { return lambda_; }

  bool has_quintic() const noexcept { return lambda_[1] != 0.0; }
  bool is_linear() const noexcept {
    for (double l : lambda_) {
      if (l != 0.0) return false;
    }
    return true;
  }

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;

 private:
  double nu_;
  std::array<double, 6> lambda_;
};

/// Smallest zero-padding factor that removes aliasing for the products present.
inline int default_pad_factor(const CoefficientSet& c) { return c.has_quintic() ? 3 : 2; }

struct SolverConfig {
  double epsilon = 0.0;  ///< parabolic regularization, in [0, 1]
  double dt = 1e-3;
  double picard_tol = 1e-12;  ///< H^m distance between successive iterates
  int picard_max_iters = 50;
  int dealias_pad_factor = 0;  ///< 0 selects default_pad_factor()
  int sobolev_index_m = 4;
  double blowup_factor = 1e6;  ///< integrate() stops once ||psi||_{H^m} exceeds this times the initial norm
  int record_every = 1;        ///< integrate() keeps every k-th step (observers see all)

  int pad_for(const CoefficientSet& c) const {
    return dealias_pad_factor > 0 ? dealias_pad_factor : default_pad_factor(c);
  }

  void validate(const CoefficientSet& c) const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
      throw std::invalid_argument("SolverConfig: epsilon must lie in [0, 1]");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
    if (!(picard_tol > 0.0)) throw std::invalid_argument("SolverConfig: picard_tol must be positive");
    if (picard_max_iters < 1) throw std::invalid_argument("SolverConfig: picard_max_iters must be >= 1");
    if (dealias_pad_factor < 0) throw std::invalid_argument("SolverConfig: dealias_pad_factor must be >= 1");
    if (c.has_quintic() && pad_for(c) < 3) {
      throw std::invalid_argument("SolverConfig: quintic term needs dealias_pad_factor >= 3");
    }
    if (sobolev_index_m < 1) throw std::invalid_argument("SolverConfig: sobolev_index_m must be >= 1");
    if (record_every < 1) throw std::invalid_argument("SolverConfig: record_every must be >= 1");
  }
};

struct TrajectorySample {
  double time;
  SpectralField state;
};

// ---------------------------------------------------------------------------
// Nonlinearity

/// N(psi) evaluated pseudospectrally: derivatives in coefficient space,
/// products on a grid refined by `pad`, result truncated back to the
/// original modes with the Nyquist mode cleared.
inline SpectralField eval_nonlinearity(const SpectralField& psi, const CoefficientSet& c,
                                       int pad) {
  if (pad < 1) throw std::invalid_argument("eval_nonlinearity: pad must be >= 1");
  if (c.is_linear()) return SpectralField(psi.grid());

  const auto u = to_physical_padded(psi, pad);
  const auto ux = to_physical_padded(derivative(psi, 1), pad);
  const auto uxx = to_physical_padded(derivative(psi, 2), pad);

  const double l1 = c.lambda(1), l2 = c.lambda(2), l3 = c.lambda(3);
  const double l4 = c.lambda(4), l5 = c.lambda(5), l6 = c.lambda(6);

  PhysicalField prod(u.grid());
  const auto us = u.samples();
  const auto uxs = ux.samples();
  const auto uxxs = uxx.samples();
  for (std::size_t j = 0; j < us.size(); ++j) {
    const Complex v = us[j], vx = uxs[j], vxx = uxxs[j];
    const double a = std::norm(v);
    Complex acc = (l1 * a + l2 * a * a) * v;
    acc += l3 * vx * vx * std::conj(v);
    acc += l4 * std::norm(vx) * v;
    acc += l5 * v * v * std::conj(vxx);
    acc += l6 * a * vxx;
    prod[j] = acc;
  }
  return truncate(to_spectral(prod), psi.grid());
}

// ---------------------------------------------------------------------------
// Linear semigroup

/// Exponent of the semigroup multiplier at mode n: -i n^2 + i nu n^4 - eps n^4.
inline Complex semigroup_symbol(int n, double epsilon, double nu) {
  const double n2 = double(n) * n;
  const double n4 = n2 * n2;
  return {-epsilon * n4, nu * n4 - n2};
}

/// exp(symbol(n) t) for every mode of `grid`, in FFT order.
inline std::vector<Complex> semigroup_multipliers(const GridSpec& grid, double t, double epsilon,
                                                  double nu) {
  std::vector<Complex> out(static_cast<std::size_t>(grid.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Complex s = semigroup_symbol(grid.mode_at(i), epsilon, nu);
    // exp((a + ib) t) with the phase reduced before the product with t.
    out[i] = std::exp(s.real() * t) * std::polar(1.0, s.imag() * t);
  }
  return out;
}

inline SpectralField apply_multipliers(SpectralField psi, std::span<const Complex> mult) {
  auto c = psi.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= mult[i];
  return psi;
}

/// W_eps(t) psi: coefficient n multiplied by exp((-i n^2 + i nu n^4 - eps n^4) t).
/// Backward evolution is only defined without regularization.
inline SpectralField semigroup_apply(const SpectralField& psi, double t, double epsilon, double nu) {
  if (epsilon < 0.0) throw std::invalid_argument("semigroup_apply: epsilon must be >= 0");
  if (t < 0.0 && epsilon > 0.0) {
    throw std::invalid_argument("semigroup_apply: t < 0 with epsilon > 0 is backward heat flow");
  }
  if (t == 0.0) return psi;
  return apply_multipliers(psi, semigroup_multipliers(psi.grid(), t, epsilon, nu));
}

/// max over resolved n of <n>^2 exp(-eps n^4 s). Compare with 1 + eps^{-1/2} s^{-1/2}.
inline double smoothing_multiplier_sup(double epsilon, double s, const GridSpec& grid) {
  if (!(epsilon > 0.0) || !(s > 0.0)) {
    throw std::invalid_argument("smoothing_multiplier_sup: epsilon and s must be positive");
  }
  double mx = 0.0;
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n) {
    const double n2 = double(n) * n;
    mx = std::max(mx, (1.0 + n2) * std::exp(-epsilon * n2 * n2 * s));
  }
  return mx;
}

// ---------------------------------------------------------------------------
// Duhamel / Picard stepper

struct StepResult {
  SpectralField state;
  int iterations;
};

/// Fixed-step propagator with the semigroup factors for one step cached.
class DuhamelStepper {
 public:
  DuhamelStepper(const GridSpec& grid, const SolverConfig& cfg, const CoefficientSet& c)
      : cfg_(cfg),
        coeffs_(c),
        pad_(cfg.pad_for(c)),
        step_(semigroup_multipliers(grid, cfg.dt, cfg.epsilon, c.nu())) {
    cfg.validate(c);
  }

  double dt() const noexcept { return cfg_.dt; }

  /// One step of length dt:
  ///   psi_{k+1} = W(dt) psi - i dt/2 [ W(dt) N(psi) + N(psi_{k+1}) ],
  /// solved by Picard iteration from the free evolution W(dt) psi.
  StepResult step(const SpectralField& psi) const {
    const SpectralField linear = apply_multipliers(psi, step_);
    if (coeffs_.is_linear()) return {linear, 1};

    const Complex half_step{0.0, -0.5 * cfg_.dt};
    SpectralField base = linear + half_step * apply_multipliers(
                                                  eval_nonlinearity(psi, coeffs_, pad_), step_);
    SpectralField iterate = linear;
    double update = 0.0;
    for (int k = 1; k <= cfg_.picard_max_iters; ++k) {
      SpectralField next = base + half_step * eval_nonlinearity(iterate, coeffs_, pad_);
      update = sobolev_norm(next - iterate, cfg_.sobolev_index_m);
      const double scale = std::max(1.0, sobolev_norm(next, cfg_.sobolev_index_m));
      iterate = std::move(next);
      if (!iterate.is_finite()) throw NonConvergence(k, update);
      if (update <= cfg_.picard_tol * scale) return {std::move(iterate), k};
    }
    throw NonConvergence(cfg_.picard_max_iters, update);
  }

 private:
  SolverConfig cfg_;
  CoefficientSet coeffs_;
  int pad_;
  std::vector<Complex> step_;
};

inline StepResult duhamel_step(const SpectralField& psi, const SolverConfig& cfg,
                               const CoefficientSet& c) {
  return DuhamelStepper(psi.grid(), cfg, c).step(psi);
}

/// Number of uniform steps of size <= dt covering [0, t_end].
inline long step_count(double t_end, double dt) {
  if (t_end <= 0.0) return 0;
  return std::max(1L, static_cast<long>(std::ceil(t_end / dt * (1.0 - 1e-12))));
}

// ---------------------------------------------------------------------------
// Reference integrator

/// Integrating-factor RK4 on u(t) = W(-t) psi(t). With eps > 0 only forward
/// half-step and full-step factors are used, so no growing exponentials occur.
inline std::vector<TrajectorySample> reference_integrate(const SpectralField& psi0, double t_end,
                                                         const SolverConfig& cfg,
                                                         const CoefficientSet& c) {
  if (t_end < 0.0) throw std::invalid_argument("reference_integrate: t_end must be >= 0");
  cfg.validate(c);
  const long steps = step_count(t_end, cfg.dt);
  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  out.push_back({0.0, psi0});
  if (steps == 0) return out;

  const double h = t_end / static_cast<double>(steps);
  const int pad = cfg.pad_for(c);
  const auto half = semigroup_multipliers(psi0.grid(), 0.5 * h, cfg.epsilon, c.nu());
  const auto full = semigroup_multipliers(psi0.grid(), h, cfg.epsilon, c.nu());
  const Complex minus_i{0.0, -1.0};
  auto rhs = [&](const SpectralField& v) { return minus_i * eval_nonlinearity(v, c, pad); };

  SpectralField psi = psi0;
  for (long s = 1; s <= steps; ++s) {
    const SpectralField k1 = rhs(psi);
    const SpectralField k2 = rhs(apply_multipliers(psi + Complex(0.5 * h) * k1, half));
    const SpectralField k3 = rhs(apply_multipliers(psi, half) + Complex(0.5 * h) * k2);
    const SpectralField k4 =
        rhs(apply_multipliers(psi, full) + Complex(h) * apply_multipliers(k3, half));
    SpectralField incr = apply_multipliers(k1, full);
    incr += Complex(2.0) * apply_multipliers(k2 + k3, half);
    incr += k4;
    psi = apply_multipliers(psi, full) + Complex(h / 6.0) * incr;
    const double t = static_cast<double>(s) * h;
    if (!psi.is_finite()) throw NonFinite(t);
    out.push_back({t, psi});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Driver

using Observer = std::function<void(const TrajectorySample&)>;

enum class TrajectoryStatus { Completed, BlowUpSuspected };

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectoryStatus status = TrajectoryStatus::Completed;
  long steps_taken = 0;
  int max_picard_iterations = 0;

  const SpectralField& final_state() const { return samples.back().state; }
  double final_time() const { return samples.back().time; }
};

/// Repeated Duhamel steps over [0, t_end]. Observers see the initial state
/// and every step; the returned trajectory keeps every `record_every`-th
/// step plus the last one. Stops early with BlowUpSuspected once the H^m
/// norm exceeds blowup_factor times its initial value.
inline Trajectory integrate(const SpectralField& psi0, double t_end, const SolverConfig& cfg,
                            const CoefficientSet& c, std::span<const Observer> observers = {}) {
  if (t_end < 0.0) throw std::invalid_argument("integrate: t_end must be >= 0");
  cfg.validate(c);
  Trajectory traj;
  auto notify = [&](const TrajectorySample& s) {
    for (const auto& obs : observers) obs(s);
  };

  TrajectorySample first{0.0, psi0};
  notify(first);
  traj.samples.push_back(std::move(first));
  const long steps = step_count(t_end, cfg.dt);
  if (steps == 0) return traj;

  SolverConfig step_cfg = cfg;
  step_cfg.dt = t_end / static_cast<double>(steps);
  const DuhamelStepper stepper(psi0.grid(), step_cfg, c);
  const double ceiling = cfg.blowup_factor * sobolev_norm(psi0, cfg.sobolev_index_m);

  SpectralField psi = psi0;
  for (long s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) * step_cfg.dt;
    try {
      auto r = stepper.step(psi);
      psi = std::move(r.state);
      traj.max_picard_iterations = std::max(traj.max_picard_iterations, r.iterations);
    } catch (const NonConvergence& e) {
      throw e.at_time(t);
    }
    traj.steps_taken = s;
    TrajectorySample sample{t, psi};
    notify(sample);
    const bool blown = !(sobolev_norm(psi, cfg.sobolev_index_m) <= ceiling);
    if (s % cfg.record_every == 0 || s == steps || blown) traj.samples.push_back(std::move(sample));
    if (blown) {
      traj.status = TrajectoryStatus::BlowUpSuspected;
      break;
    }
  }
  return traj;
}

inline Trajectory integrate(const SpectralField& psi0, double t_end, const SolverConfig& cfg,
                            const CoefficientSet& c, const Observer& observer) {
  return integrate(psi0, t_end, cfg, c, std::span<const Observer>(&observer, 1));
}

}  // namespace fnls
