#pragma once

// Scripted numerical studies. Each study returns a StudyResult holding its
// parameters, the thresholds it judged against, numeric tables, and a
// verdict. Everything is deterministic for a given seed and configuration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fnls/dynamics.hpp"
#include "fnls/exact.hpp"
#include "fnls/functionals.hpp"
#include "fnls/mollifier.hpp"
#include "fnls/random_fields.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Log-log regression

struct RateFit {
  std::vector<double> xs;
  std::vector<double> ys;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of log(ys) = slope * log(xs) + intercept.
inline RateFit fit_rate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (xs.size() < 2) throw std::invalid_argument("fit_rate: need at least two points");
  RateFit fit{{xs.begin(), xs.end()}, {ys.begin(), ys.end()}};
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("fit_rate: values must be positive");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: xs must not all be equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.slope * lx[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Results

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

/// Named columnar data. The first column is `time` or `param`.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("Table: row width mismatch");
    rows.push_back(std::move(row));
  }

  std::vector<double> column(std::string_view col) const {
    const auto it = std::find(columns.begin(), columns.end(), col);
    if (it == columns.end()) throw std::out_of_range("Table: no column " + std::string(col));
    const auto k = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
  }
};

struct StudyResult {
  std::string name;
  Json parameters = Json::object();
  Json thresholds = Json::object();
  std::vector<Table> tables;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> notes;

  const Table& table(std::string_view table_name) const {
    for (const auto& t : tables) {
      if (t.name == table_name) return t;
    }
    throw std::out_of_range("StudyResult: no table " + std::string(table_name));
  }
};

inline Json to_json(const CoefficientSet& c) {
  return Json{{"nu", c.nu()}, {"lambda", c.lambdas()}};
}

inline Json to_json(const SolverConfig& cfg) {
  return Json{{"epsilon", cfg.epsilon},
              {"dt", cfg.dt},
              {"picard_tol", cfg.picard_tol},
              {"picard_max_iters", cfg.picard_max_iters},
              {"dealias_pad_factor", cfg.dealias_pad_factor},
              {"sobolev_index_m", cfg.sobolev_index_m},
              {"blowup_factor", cfg.blowup_factor}};
}

// Relative deviation, falling back to the absolute one when the reference is 0.
inline double relative_drift(double value, double reference) {
  const double diff = std::abs(value - reference);
  return reference != 0.0 ? diff / std::abs(reference) : diff;
}

/// Guaranteed existence time (2C)^{-1} (||phi||_{L^2}^{4m} + 1)^{-1} ||phi||_{H^m}^{-2}
/// for a Riccati constant C.
inline double local_existence_time(double riccati_constant, const SpectralField& phi, int m) {
  const double l2sq = l2_norm_sq(phi);
  const double hm_sq = sobolev_norm_sq(phi, m);
  if (!(riccati_constant > 0.0) || hm_sq == 0.0) return kInfinity;
  return 1.0 / (2.0 * riccati_constant * (std::pow(l2sq, 2 * m) + 1.0) * hm_sq);
}

// ---------------------------------------------------------------------------
// Conservation in the integrable case

struct ConservationOptions {
  double drift_tol = 1e-6;
  double min_refinement_ratio = 4.0;  ///< drift(dt) / drift(dt/2)
  double noise_floor = 1e-14;         ///< drifts below this count as exact conservation
};

/// Integrates the integrable equation (eps = 0) at dt and dt/2 and compares
/// the relative drift of I_0, I_1, I_2 on the common output times.
inline StudyResult conservation_study(const SpectralField& data, double nu, double t_end,
                                      const SolverConfig& cfg,
                                      const ConservationOptions& opts = {}) {
  if (cfg.epsilon != 0.0) throw std::invalid_argument("conservation_study: requires epsilon = 0");
  const CoefficientSet c = integrable_coefficients(nu);

  const long steps = step_count(t_end, cfg.dt);
  SolverConfig coarse = cfg;
  coarse.dt = steps > 0 ? t_end / static_cast<double>(steps) : cfg.dt;
  coarse.record_every = 1;
  SolverConfig fine = coarse;
  fine.dt = 0.5 * coarse.dt;
  fine.record_every = 2;

  const auto coarse_traj = integrate(data, t_end, coarse, c);
  const auto fine_traj = integrate(data, t_end, fine, c);
  if (coarse_traj.samples.size() != fine_traj.samples.size()) {
    throw std::logic_error("conservation_study: output times do not line up");
  }

  const auto q0 = conserved_quantities(data);
  const std::array<double, 3> ref{q0.i0, q0.i1, q0.i2};
  auto quantities = [](const SpectralField& psi) {
    const auto q = conserved_quantities(psi);
    return std::array<double, 3>{q.i0, q.i1, q.i2};
  };

  Table series{"invariants", {"time", "i0", "i1", "i2", "drift_i0", "drift_i1", "drift_i2"}, {}};
  std::array<double, 3> max_coarse{}, max_fine{};
  for (std::size_t k = 0; k < coarse_traj.samples.size(); ++k) {
    const auto qc = quantities(coarse_traj.samples[k].state);
    const auto qf = quantities(fine_traj.samples[k].state);
    std::array<double, 3> dc{}, df{};
    for (int i = 0; i < 3; ++i) {
      dc[i] = relative_drift(qc[i], ref[i]);
      df[i] = relative_drift(qf[i], ref[i]);
      max_coarse[i] = std::max(max_coarse[i], dc[i]);
      max_fine[i] = std::max(max_fine[i], df[i]);
    }
    series.add_row({coarse_traj.samples[k].time, qc[0], qc[1], qc[2], dc[0], dc[1], dc[2]});
  }

  Table refinement{"refinement", {"param", "max_drift_i0", "max_drift_i1", "max_drift_i2"}, {}};
  refinement.add_row({coarse.dt, max_coarse[0], max_coarse[1], max_coarse[2]});
  refinement.add_row({fine.dt, max_fine[0], max_fine[1], max_fine[2]});

  Table order{"order", {"param", "drift_ratio", "observed_order"}, {}};
  bool within_tol = true, order_shown = true;
  for (int i = 0; i < 3; ++i) {
    const double ratio = max_fine[i] > 0.0 ? max_coarse[i] / max_fine[i] : kInfinity;
    order.add_row({double(i), ratio, std::log2(ratio)});
    if (!(max_coarse[i] <= opts.drift_tol)) within_tol = false;
    if (max_coarse[i] > opts.noise_floor && !(ratio >= opts.min_refinement_ratio)) {
      order_shown = false;
    }
  }

  StudyResult r;
  r.name = "conservation";
  r.parameters = Json{{"nu", nu},
                      {"t_end", t_end},
                      {"dt", coarse.dt},
                      {"num_modes", data.size()},
                      {"coefficients", to_json(c)},
                      {"solver", to_json(coarse)},
                      {"data_h4_norm", sobolev_norm(data, 4)}};
  r.thresholds = Json{{"drift_tol", opts.drift_tol},
                      {"min_refinement_ratio", opts.min_refinement_ratio},
                      {"noise_floor", opts.noise_floor}};
  r.tables = {std::move(series), std::move(refinement), std::move(order)};
  if (!within_tol) {
    r.verdict = Verdict::Fail;
  } else if (!order_shown) {
    r.verdict = Verdict::Inconclusive;
    r.notes.push_back("drift did not shrink by the required factor under dt halving");
  } else {
    r.verdict = Verdict::Pass;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Mollifier approximation rates

struct BonaSmithOptions {
  double slope_band = 0.15;  ///< relative band around l for l >= 1
  double min_r_squared = 0.98;
  double superconvergence_floor = 1e-13;  ///< relative to ||phi||_{H^m}
};

inline std::vector<double> dyadic_ladder(int first_exponent, int last_exponent) {
  std::vector<double> out;
  for (int j = first_exponent; j <= last_exponent; ++j) out.push_back(std::ldexp(1.0, -j));
  return out;
}

/// Fits ||phi - phi_eps||_{H^{m-l}} against eps for each l. Every fit needs
/// r^2 >= min_r_squared; for l >= 1 the slope must lie within the band
/// around l, for l = 0 the error must stay below ||phi||_{H^m}.
inline StudyResult bona_smith_rate_study(const SpectralField& data, int m,
                                         std::span<const int> l_values,
                                         std::span<const double> eps_ladder,
                                         const BonaSmithOptions& opts = {}) {
  for (int l : l_values) {
    if (l < 0 || l > m) throw std::invalid_argument("bona_smith_rate_study: need 0 <= l <= m");
  }
  const double data_norm = sobolev_norm(data, m);
  if (data_norm == 0.0) throw std::invalid_argument("bona_smith_rate_study: zero data");

  std::vector<std::string> cols{"param"};
  for (int l : l_values) cols.push_back("err_l" + std::to_string(l));
  Table errors{"errors", cols, {}};
  std::vector<std::vector<double>> per_l(l_values.size());
  for (double eps : eps_ladder) {
    const SpectralField diff = data - mollify(data, eps);
    std::vector<double> row{eps};
    for (std::size_t k = 0; k < l_values.size(); ++k) {
      const double e = sobolev_norm(diff, m - l_values[k]);
      per_l[k].push_back(e);
      row.push_back(e);
    }
    errors.add_row(std::move(row));
  }

  Table fits{"fits", {"param", "slope", "intercept", "r_squared", "max_relative_error"}, {}};
  bool pass = true, superconvergent = false;
  for (std::size_t k = 0; k < l_values.size(); ++k) {
    const int l = l_values[k];
    const double worst = *std::max_element(per_l[k].begin(), per_l[k].end()) / data_norm;
    const double smallest = *std::min_element(per_l[k].begin(), per_l[k].end()) / data_norm;
    if (smallest <= opts.superconvergence_floor) {
      superconvergent = true;
      fits.add_row({double(l), NAN, NAN, NAN, worst});
      continue;
    }
    const RateFit fit = fit_rate(eps_ladder, per_l[k]);
    fits.add_row({double(l), fit.slope, fit.intercept, fit.r_squared, worst});
    if (fit.r_squared < opts.min_r_squared) pass = false;
    if (l == 0) {
      if (!(worst <= 1.0)) pass = false;
    } else if (fit.slope < (1.0 - opts.slope_band) * l || fit.slope > (1.0 + opts.slope_band) * l) {
      pass = false;
    }
  }

  StudyResult r;
  r.name = "bona_smith";
  r.parameters = Json{{"m", m},
                      {"l_values", std::vector<int>(l_values.begin(), l_values.end())},
                      {"eps_ladder", std::vector<double>(eps_ladder.begin(), eps_ladder.end())},
                      {"num_modes", data.size()},
                      {"data_hm_norm", data_norm}};
  r.thresholds = Json{{"slope_band", opts.slope_band},
                      {"min_r_squared", opts.min_r_squared},
                      {"l0_max_relative_error", 1.0},
                      {"superconvergence_floor", opts.superconvergence_floor}};
  r.tables = {std::move(errors), std::move(fits)};
  if (superconvergent) {
    r.verdict = Verdict::Inconclusive;
    r.notes.push_back("error reached round-off: data too smooth for the asymptotic rate");
  } else {
    r.verdict = pass ? Verdict::Pass : Verdict::Fail;
  }
  return r;
}

/// Default setting: critical-decay data <n>^{-m-0.6} on 2^16 modes, eps = 2^-1 .. 2^-8.
inline StudyResult bona_smith_rate_study(int m, std::span<const int> l_values,
                                         const BonaSmithOptions& opts = {}) {
  const auto data = critical_decay_data(GridSpec(1 << 16), m);
  const auto ladder = dyadic_ladder(1, 8);
  StudyResult r = bona_smith_rate_study(data, m, l_values, ladder, opts);
  r.parameters["data"] = "critical_decay(excess=0.6)";
  return r;
}

// ---------------------------------------------------------------------------
// Vanishing regularization

struct EpsConvergenceOptions {
  double min_order = 1.0;
};

/// Solves the regularized problem from mollify(data, eps) for each eps and
/// compares with a reference run at min(eps)/4.
inline StudyResult eps_convergence_study(const SpectralField& data, int m,
                                         const CoefficientSet& c, double t_end,
                                         std::span<const double> eps_ladder,
                                         const SolverConfig& cfg,
                                         const EpsConvergenceOptions& opts = {}) {
  if (m < 4) throw std::invalid_argument("eps_convergence_study: m must be >= 4");
  if (eps_ladder.empty()) throw std::invalid_argument("eps_convergence_study: empty ladder");
  std::vector<double> ladder(eps_ladder.begin(), eps_ladder.end());
  std::sort(ladder.begin(), ladder.end(), std::greater<>());

  auto solve = [&](double eps) {
    SolverConfig run = cfg;
    run.epsilon = eps;
    run.sobolev_index_m = m;
    run.record_every = 1 << 30;
    return integrate(mollify(data, eps), t_end, run, c).final_state();
  };
  const double eps_ref = ladder.back() / 4.0;
  const SpectralField reference = solve(eps_ref);

  Table diffs{"differences", {"param", "h1_diff", "hm_diff"}, {}};
  std::vector<double> h1, hm;
  for (double eps : ladder) {
    const SpectralField d = solve(eps) - reference;
    h1.push_back(sobolev_norm(d, 1));
    hm.push_back(sobolev_norm(d, m));
    diffs.add_row({eps, h1.back(), hm.back()});
  }

  auto decreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] < v[i - 1])) return false;
    }
    return true;
  };

  StudyResult r;
  r.name = "eps_convergence";
  r.parameters = Json{{"m", m},
                      {"t_end", t_end},
                      {"eps_ladder", ladder},
                      {"eps_reference", eps_ref},
                      {"num_modes", data.size()},
                      {"coefficients", to_json(c)},
                      {"solver", to_json(cfg)}};
  r.thresholds = Json{{"min_h1_order", opts.min_order},
                      {"h1_monotone", true},
                      {"hm_monotone", true}};
  if (ladder.size() < 2) {
    r.verdict = Verdict::Inconclusive;
    r.notes.push_back("a single ladder point admits no fit");
    r.tables = {std::move(diffs)};
    return r;
  }
  Table fit_table{"fit", {"param", "slope", "intercept", "r_squared"}, {}};
  const bool positive = std::all_of(h1.begin(), h1.end(), [](double v) { return v > 0.0; });
  double order = NAN;
  if (positive) {
    const RateFit fit = fit_rate(ladder, h1);
    order = fit.slope;
    fit_table.add_row({1.0, fit.slope, fit.intercept, fit.r_squared});
  }
  r.tables = {std::move(diffs), std::move(fit_table)};
  r.parameters["h1_order"] = order;
  const bool pass = positive && decreasing(h1) && decreasing(hm) && order >= opts.min_order;
  r.verdict = pass ? Verdict::Pass : Verdict::Fail;
  return r;
}

// ---------------------------------------------------------------------------
// Riccati quotient: modified vs unmodified energy

struct RiccatiOptions {
  double c_m = 0.0;
  int steps = 10;
  double max_modified_spread = 2.0;
  double min_raw_growth = 4.0;
  double refinement_tolerance = 0.25;  ///< relative change allowed under dt and N refinement
  bool check_resolution = true;
};

/// Members of a family sharing one H^m norm: a fixed low-frequency packet on
/// modes {0, 1} plus a high packet on modes {k, k+1}, one member per
/// separation k. Each packet carries a fixed share of the H^m norm squared.
inline std::vector<SpectralField> separated_packet_family(const GridSpec& grid, int m,
                                                          std::span<const int> separations,
                                                          double hm_norm = 1.0,
                                                          double low_share = 0.5) {
  std::vector<SpectralField> out;
  for (int k : separations) {
    if (k < 2 || !grid.resolves(k + 1)) {
      throw std::invalid_argument("separated_packet_family: separation out of range");
    }
    SpectralField low(grid), high(grid);
    low[0] = 1.0;
    low[1] = Complex(0.0, 0.5);
    high[k] = 1.0;
    high[k + 1] = 1.0;
    low = normalized_hm(low, m, std::sqrt(low_share));
    high = normalized_hm(high, m, std::sqrt(1.0 - low_share));
    out.push_back(normalized_hm(low + high, m, hm_norm));
  }
  return out;
}

/// Two single modes, 1 and 1 + k, with equal shares of the H^m norm squared.
inline std::vector<SpectralField> two_mode_family(const GridSpec& grid, int m,
                                                  std::span<const int> separations,
                                                  double hm_norm = 1.0) {
  std::vector<SpectralField> out;
  for (int k : separations) {
    SpectralField a(grid), b(grid);
    a[1] = 1.0;
    b[1 + k] = 1.0;
    out.push_back(normalized_hm(normalized_hm(a, m, 1.0) + normalized_hm(b, m, 1.0), m, hm_norm));
  }
  return out;
}

struct RiccatiQuotients {
  double modified;
  double raw;
};

/// max over steps of |E(t_{k+1}) - E(t_k)| / dt / E(t_k)^2 for E_m and for
/// ||d^m psi||^2 + ||psi||^2 along `steps` Duhamel steps of size dt.
/// Relative changes up to `roundoff` count as zero.
inline RiccatiQuotients riccati_quotients(const SpectralField& psi0, int m,
                                          const CoefficientSet& c, SolverConfig cfg, double c_m,
                                          int steps, double roundoff = 1e-12) {
  cfg.record_every = 1;
  cfg.sobolev_index_m = m;
  std::vector<double> e_mod, e_raw;
  const Observer obs = [&](const TrajectorySample& s) {
    e_mod.push_back(modified_energy(s.state, m, c, c_m));
    e_raw.push_back(raw_energy(s.state, m));
  };
  integrate(psi0, cfg.dt * steps, cfg, c, obs);
  const double dt = cfg.dt;
  auto quotient = [dt, roundoff](const std::vector<double>& e) {
    double q = 0.0;
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
      const double change = std::abs(e[k + 1] - e[k]);
      if (e[k] > 0.0 && change > roundoff * e[k]) q = std::max(q, change / dt / (e[k] * e[k]));
    }
    return q;
  };
  return {quotient(e_mod), quotient(e_raw)};
}

inline bool refinement_stable(double a, double b, double tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 || std::abs(a - b) <= tol * scale;
}

/// For each member: Riccati quotients of E_m and of the unmodified energy.
/// Passes when the E_m quotient spreads by at most max_modified_spread across
/// the family while the unmodified quotient grows by min_raw_growth from the
/// first member to the last. Quotients are recomputed at dt/2 (and on the
/// doubled grid) and must agree within refinement_tolerance.
inline StudyResult riccati_study(std::span<const SpectralField> family, int m,
                                 const CoefficientSet& c, const SolverConfig& cfg,
                                 const RiccatiOptions& opts, std::span<const double> labels = {}) {
  if (family.empty()) throw std::invalid_argument("riccati_study: empty family");
  for (const auto& f : family) {
    if (!(f.grid() == family.front().grid())) {
      throw std::invalid_argument("riccati_study: family members must share one grid");
    }
  }
  Table table{"quotients",
              {"param", "q_modified", "q_raw", "q_modified_half_dt", "q_raw_half_dt",
               "q_modified_fine_grid", "q_raw_fine_grid", "hm_norm", "local_existence_time"},
              {}};
  std::vector<double> q_mod, q_raw;
  bool refined_ok = true;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& psi = family[i];
    const auto q = riccati_quotients(psi, m, c, cfg, opts.c_m, opts.steps);
    SolverConfig half = cfg;
    half.dt = 0.5 * cfg.dt;
    const auto qh = riccati_quotients(psi, m, c, half, opts.c_m, 2 * opts.steps);
    RiccatiQuotients qf{NAN, NAN};
    if (opts.check_resolution) {
      qf = riccati_quotients(zero_pad(psi, 2), m, c, cfg, opts.c_m, opts.steps);
      refined_ok = refined_ok && refinement_stable(q.modified, qf.modified, opts.refinement_tolerance) &&
                   refinement_stable(q.raw, qf.raw, opts.refinement_tolerance);
    }
    refined_ok = refined_ok && refinement_stable(q.modified, qh.modified, opts.refinement_tolerance) &&
                 refinement_stable(q.raw, qh.raw, opts.refinement_tolerance);
    q_mod.push_back(q.modified);
    q_raw.push_back(q.raw);
    const double label = i < labels.size() ? labels[i] : double(i);
    table.add_row({label, q.modified, q.raw, qh.modified, qh.raw, qf.modified, qf.raw,
                   sobolev_norm(psi, m), local_existence_time(q.modified, psi, m)});
  }

  const double mod_min = *std::min_element(q_mod.begin(), q_mod.end());
  const double mod_max = *std::max_element(q_mod.begin(), q_mod.end());
  const double spread = mod_min > 0.0 ? mod_max / mod_min : kInfinity;
  const double growth = q_raw.front() > 0.0 ? q_raw.back() / q_raw.front() : kInfinity;

  StudyResult r;
  r.name = "riccati";
  r.parameters = Json{{"m", m},
                      {"members", family.size()},
                      {"labels", std::vector<double>(labels.begin(), labels.end())},
                      {"num_modes", family.front().size()},
                      {"c_m", opts.c_m},
                      {"steps", opts.steps},
                      {"coefficients", to_json(c)},
                      {"solver", to_json(cfg)},
                      {"modified_spread", spread},
                      {"raw_growth", growth}};
  r.thresholds = Json{{"max_modified_spread", opts.max_modified_spread},
                      {"min_raw_growth", opts.min_raw_growth},
                      {"refinement_tolerance", opts.refinement_tolerance}};
  r.tables = {std::move(table)};
  if (family.size() < 2 || mod_max == 0.0 || q_raw.front() == 0.0) {
    r.verdict = Verdict::Inconclusive;
    r.notes.push_back("quotients vanish or the family is too small to compare");
  } else if (!refined_ok) {
    r.verdict = Verdict::Inconclusive;
    r.notes.push_back("quotients not stable under dt or grid refinement");
  } else {
    r.verdict = (spread <= opts.max_modified_spread && growth >= opts.min_raw_growth)
                    ? Verdict::Pass
                    : Verdict::Fail;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Continuity of the data-to-solution map

struct ContinuityOptions {
  std::uint64_t seed = 1;
  FieldProfile perturbation{8, 0.5, DecayKind::Exponential};
  double slope_band = 0.15;
  double max_quotient_spread = 2.0;
};

/// Perturbs phi by delta * eta with ||eta||_{H^m} = 1, integrates both data,
/// and records sup_t ||difference||_{H^1} together with the growth of the
/// m = 1 difference energy relative to its initial value.
inline StudyResult continuity_study(const SpectralField& phi, std::span<const double> delta_ladder,
                                    int m, const CoefficientSet& c, double t_end,
                                    const SolverConfig& cfg, const ContinuityOptions& opts = {}) {
  if (m < 4) throw std::invalid_argument("continuity_study: m must be >= 4");
  std::mt19937_64 rng(opts.seed);
  const SpectralField direction = normalized_hm(random_field(phi.grid(), opts.perturbation, rng), m, 1.0);

  SolverConfig run = cfg;
  run.record_every = 1;
  run.sobolev_index_m = m;
  const auto base = integrate(phi, t_end, run, c);

  double ref_sup_sq = 0.0;
  for (const auto& s : base.samples) {
    const double sup = lp_norm(to_physical_padded(s.state, kQuadraturePad), kInfinity);
    ref_sup_sq = std::max(ref_sup_sq, sup * sup);
  }
  const double c_tilde = difference_energy_constant(c, ref_sup_sq);

  Table ladder_table{"ladder", {"param", "sup_h1_diff", "max_gronwall_quotient", "gronwall_rate"}, {}};
  std::vector<std::string> qcols{"time"};
  for (std::size_t i = 0; i < delta_ladder.size(); ++i) qcols.push_back("quotient_" + std::to_string(i));
  Table series{"gronwall", qcols, {}};
  std::vector<std::vector<double>> quotients(base.samples.size());
  for (std::size_t k = 0; k < base.samples.size(); ++k) quotients[k].push_back(base.samples[k].time);

  std::vector<double> fit_delta, fit_sup, max_quot;
  for (double delta : delta_ladder) {
    const auto pert = integrate(phi + Complex(delta) * direction, t_end, run, c);
    if (pert.samples.size() != base.samples.size()) {
      throw std::logic_error("continuity_study: trajectories have different lengths");
    }
    double sup_h1 = 0.0, max_q = 0.0;
    double e0 = 0.0;
    for (std::size_t k = 0; k < base.samples.size(); ++k) {
      const SpectralField d = pert.samples[k].state - base.samples[k].state;
      sup_h1 = std::max(sup_h1, sobolev_norm(d, 1));
      const double e = difference_energy(d, base.samples[k].state, 1, c, c_tilde);
      if (k == 0) e0 = e;
      const double q = e0 > 0.0 ? e / e0 : NAN;
      quotients[k].push_back(q);
      if (e0 > 0.0) max_q = std::max(max_q, q);
    }
    const double rate = (e0 > 0.0 && t_end > 0.0) ? std::log(max_q) / t_end : NAN;
    ladder_table.add_row({delta, sup_h1, e0 > 0.0 ? max_q : NAN, rate});
    if (delta > 0.0) {
      fit_delta.push_back(delta);
      fit_sup.push_back(sup_h1);
      max_quot.push_back(max_q);
    }
  }
  for (auto& row : quotients) series.add_row(std::move(row));

  StudyResult r;
  r.name = "continuity";
  r.parameters = Json{{"m", m},
                      {"t_end", t_end},
                      {"delta_ladder", std::vector<double>(delta_ladder.begin(), delta_ladder.end())},
                      {"seed", opts.seed},
                      {"perturbation_band", opts.perturbation.band},
                      {"perturbation_rate", opts.perturbation.rate},
                      {"num_modes", phi.size()},
                      {"c_tilde", c_tilde},
                      {"coefficients", to_json(c)},
                      {"solver", to_json(cfg)}};
  r.thresholds = Json{{"slope_band", opts.slope_band},
                      {"max_quotient_spread", opts.max_quotient_spread}};
  r.tables = {std::move(ladder_table), std::move(series)};

  if (fit_delta.size() < 2) {
    r.verdict = Verdict::Inconclusive;
    r.notes.push_back("need at least two nonzero perturbation sizes");
    return r;
  }
  const RateFit fit = fit_rate(fit_delta, fit_sup);
  const double qmax = *std::max_element(max_quot.begin(), max_quot.end());
  const double qmin = *std::min_element(max_quot.begin(), max_quot.end());
  const double spread = qmin > 0.0 ? qmax / qmin : kInfinity;
  r.parameters["fitted_slope"] = fit.slope;
  r.parameters["fit_r_squared"] = fit.r_squared;
  r.parameters["quotient_spread"] = spread;
  r.parameters["max_gronwall_quotient"] = qmax;
  const bool slope_ok = std::abs(fit.slope - 1.0) <= opts.slope_band;
  const bool bounded = std::isfinite(qmax) && spread <= opts.max_quotient_spread;
  r.verdict = (slope_ok && bounded) ? Verdict::Pass : Verdict::Fail;
  return r;
}

// ---------------------------------------------------------------------------
// Inequality sweeps

struct GnCase {
  int l;
  int m;
  double p;
};

inline constexpr GnCase kGnCases[] = {{1, 2, 2.0}, {1, 2, kInfinity}, {0, 1, kInfinity}, {3, 4, 2.0}};

struct InequalityOptions {
  std::vector<int> gn_grids{64, 128};
  double gn_growth_tol = 0.05;
  int smoothing_modes = 512;
  double l2_ceiling = 2.0;
  int certify_trials = 2000;
  int g4_m = 4;
  double g4_nu = 1.0;
  double upper_constant_spread = 2.0;
};

/// Random field reproducible across grids: band and decay drawn first, then
/// coefficients on |n| <= band (band <= 16).
inline SpectralField sweep_field(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t trial) {
  std::seed_seq seq{seed, stream, trial};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> band(1, 16);
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  const FieldProfile profile{band(rng), rate(rng), DecayKind::Exponential};
  return random_field(grid, profile, rng);
}

/// Log-spaced values 10^{lo}, ..., 10^{hi} with `per_decade` points per decade.
inline std::vector<double> log_grid(int lo, int hi, int per_decade) {
  std::vector<double> out;
  for (int k = lo * per_decade; k <= hi * per_decade; ++k) {
    out.push_back(std::pow(10.0, double(k) / per_decade));
  }
  return out;
}

inline StudyResult inequality_sweeps(std::uint64_t seed, int trials,
                                     const InequalityOptions& opts = {}) {
  if (trials < 1) throw std::invalid_argument("inequality_sweeps: trials must be >= 1");
  StudyResult r;
  r.name = "inequality_sweeps";
  bool pass = true;

  // Interpolation inequality: empirical constant per case and grid.
  std::vector<std::string> gn_cols{"param", "l", "m", "p"};
  for (int n : opts.gn_grids) gn_cols.push_back("max_ratio_n" + std::to_string(n));
  gn_cols.push_back("growth");
  Table gn{"gn", gn_cols, {}};
  for (std::size_t ci = 0; ci < std::size(kGnCases); ++ci) {
    const auto& gc = kGnCases[ci];
    std::vector<double> row{double(ci), double(gc.l), double(gc.m), gc.p};
    std::vector<double> maxima;
    for (int n : opts.gn_grids) {
      const GridSpec grid(n);
      double mx = 0.0;
      for (int t = 0; t < trials; ++t) {
        mx = std::max(mx, gn_ratio(sweep_field(grid, seed, 1, std::uint64_t(t)), gc.l, gc.m, gc.p));
      }
      maxima.push_back(mx);
      row.push_back(mx);
    }
    const double growth = maxima.back() / maxima.front() - 1.0;
    row.push_back(growth);
    if (!std::isfinite(maxima.back()) || growth > opts.gn_growth_tol) pass = false;
    gn.add_row(std::move(row));
  }

  // Smoothing multiplier bound.
  Table smoothing{"smoothing", {"param", "s", "sup_multiplier", "bound"}, {}};
  const GridSpec wide(2 * opts.smoothing_modes + 2);
  int smoothing_violations = 0;
  for (double eps : log_grid(-3, 0, 4)) {
    for (double s : log_grid(-3, 0, 4)) {
      const double sup = smoothing_multiplier_sup(eps, s, wide);
      const double bound = 1.0 + 1.0 / std::sqrt(eps * s);
      if (sup > bound) ++smoothing_violations;
      smoothing.add_row({eps, s, sup, bound});
    }
  }
  if (smoothing_violations > 0) pass = false;

  // Energy equivalence with a certified constant.
  const int m = opts.g4_m;
  const CoefficientSet c = integrable_coefficients(opts.g4_nu);
  const CmCertificate cert = certify_cm(m, c, opts.l2_ceiling, opts.certify_trials, seed);
  Table g4{"g4", {"param", "violations", "worst_margin", "upper_constant"}, {}};
  std::vector<double> uppers;
  int g4_violations = 0;
  for (int n : opts.gn_grids) {
    const GridSpec grid(n);
    int violations = 0;
    double worst = kInfinity, upper = 0.0;
    for (int t = 0; t < trials; ++t) {
      SpectralField psi = sweep_field(grid, seed, 2, std::uint64_t(t));
      std::seed_seq seq{seed, std::uint64_t(3), std::uint64_t(t)};
      std::mt19937_64 size_rng(seq);
      const double target = opts.l2_ceiling * std::uniform_real_distribution<double>(0.0, 1.0)(size_rng);
      psi *= Complex(target / l2_norm(psi));
      const double e = modified_energy(psi, m, c, cert.c_m);
      const double lower = 0.5 * raw_energy(psi, m);
      worst = std::min(worst, e - lower);
      if (e < lower) ++violations;
      const double l2sq = l2_norm_sq(psi);
      upper = std::max(upper, e / ((std::pow(l2sq, 2 * m) + 1.0) * sobolev_norm_sq(psi, m)));
    }
    g4_violations += violations;
    uppers.push_back(upper);
    g4.add_row({double(n), double(violations), worst, upper});
  }
  const double upper_spread = *std::max_element(uppers.begin(), uppers.end()) /
                              *std::min_element(uppers.begin(), uppers.end());
  if (g4_violations > 0 || !(upper_spread <= opts.upper_constant_spread)) pass = false;

  r.parameters = Json{{"seed", seed},
                      {"trials", trials},
                      {"gn_grids", opts.gn_grids},
                      {"smoothing_modes", opts.smoothing_modes},
                      {"l2_ceiling", opts.l2_ceiling},
                      {"g4_m", m},
                      {"g4_coefficients", to_json(c)},
                      {"certified_c_m", cert.c_m},
                      {"certify_trials", cert.trials},
                      {"certificate_worst_margin", cert.worst_margin},
                      {"smoothing_violations", smoothing_violations},
                      {"g4_violations", g4_violations},
                      {"g4_upper_constant_spread", upper_spread}};
  r.thresholds = Json{{"gn_growth_tol", opts.gn_growth_tol},
                      {"smoothing_violations", 0},
                      {"g4_violations", 0},
                      {"upper_constant_spread", opts.upper_constant_spread}};
  r.tables = {std::move(gn), std::move(smoothing), std::move(g4)};
  r.verdict = pass ? Verdict::Pass : Verdict::Fail;
  return r;
}

}  // namespace fnls
