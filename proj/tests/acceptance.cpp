// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "fnls/cli.hpp"
#include "fnls/fnls.hpp"

using namespace fnls;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const CoefficientSet kGeneric(0.7, {0.4, -0.25, 0.3, -0.6, 0.5, 0.2});

SpectralField smooth_data(const GridSpec& grid, std::uint64_t seed, double hm_norm) {
  std::mt19937_64 rng(seed);
  return normalized_hm(random_field(grid, FieldProfile{4, 1.0, DecayKind::Exponential}, rng), 4, hm_norm);
}

// Five low modes with mixed phases, scaled to ||.||_{H^4} = 0.5.
SpectralField five_mode_data(const GridSpec& grid) {
  SpectralField psi(grid);
  psi[0] = 1.0;
  psi[1] = 0.5;
  psi[-1] = Complex(0.0, 0.3);
  psi[2] = 0.2;
  psi[-2] = 0.1;
  return normalized_hm(psi, 4, 0.5);
}

Outcome linear_exactness() {
  const GridSpec g(64);
  std::mt19937_64 rng(7);
  const auto psi = normalized_hm(random_field(g, FieldProfile{16, 0.3, DecayKind::Exponential}, rng), 4, 1.0);
  const auto c = CoefficientSet::linear(1.0);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  const auto exact = linear_solution(psi, 1.0, 1.0);
  const double norm = sobolev_norm(exact, 4);
  const double e_duhamel = sobolev_norm(integrate(psi, 1.0, cfg, c).final_state() - exact, 4) / norm;
  const double e_rk4 = sobolev_norm(reference_integrate(psi, 1.0, cfg, c).back().state - exact, 4) / norm;
  return {e_duhamel <= 1e-10 && e_rk4 <= 1e-10,
          "duhamel " + num(e_duhamel) + ", rk4 " + num(e_rk4) + " (tol 1e-10)"};
}

Outcome standing_wave_fidelity() {
  const GridSpec g(64);
  const auto w = standing_wave(0.3, 1, kGeneric, g);
  const double residual = standing_wave_residual(w.initial, w.omega, kGeneric);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  double worst_off = 0.0, worst_rate = 0.0;
  auto check = [&](const std::vector<TrajectorySample>& samples) {
    double prev = 0.0, unwrapped = 0.0;
    for (const auto& s : samples) {
      double off = 0.0;
      for (int n = g.min_mode(); n <= g.max_mode(); ++n) {
        if (n != 1) off += std::norm(s.state[n]);
      }
      worst_off = std::max(worst_off, off);
      double d = std::arg(s.state[1]) - prev;
      d -= kTwoPi * std::round(d / kTwoPi);
      unwrapped += d;
      prev = std::arg(s.state[1]);
    }
    const double rate = unwrapped / samples.back().time;
    worst_rate = std::max(worst_rate, std::abs(rate - w.omega) / std::abs(w.omega));
  };
  check(integrate(w.initial, 1.0, cfg, kGeneric).samples);
  check(reference_integrate(w.initial, 1.0, cfg, kGeneric));
  const bool pass = worst_off <= 1e-8 && worst_rate <= 1e-6 && residual <= 1e-11;
  return {pass, "off-mode " + num(worst_off) + " (tol 1e-8), phase rate " + num(worst_rate) +
                    " (tol 1e-6), residual " + num(residual) + " (tol 1e-11)"};
}

Outcome integrable_conservation() {
  const GridSpec g(64);
  const auto data = smooth_data(g, 1, 0.5);
  SolverConfig cfg;
  cfg.dt = 2.5e-3;
  const auto r = conservation_study(data, 1.0, 0.1, cfg);
  const auto& refinement = r.table("refinement").rows;
  const auto ratios = r.table("order").column("drift_ratio");
  double max_drift = 0.0;
  for (std::size_t k = 1; k < refinement[0].size(); ++k) max_drift = std::max(max_drift, refinement[0][k]);
  const double min_ratio = *std::min_element(ratios.begin(), ratios.end());
  return {r.verdict == Verdict::Pass,
          "max drift " + num(max_drift) + " (tol 1e-6), min halving ratio " + std::to_string(min_ratio) +
              " (need >= 4), dt " + num(cfg.dt)};
}

Outcome bona_smith_rates() {
  const std::vector<int> ls{0, 1, 2};
  const auto r = bona_smith_rate_study(4, ls);
  const auto& fits = r.table("fits");
  std::string detail;
  const auto slopes = fits.column("slope");
  const auto r2 = fits.column("r_squared");
  const auto worst = fits.column("max_relative_error");
  for (std::size_t k = 0; k < ls.size(); ++k) {
    detail += "l=" + std::to_string(ls[k]) + ": slope " + num(slopes[k]) + " r2 " + num(r2[k]);
    if (ls[k] == 0) detail += " max err/|phi| " + num(worst[k]);
    detail += "; ";
  }
  return {r.verdict == Verdict::Pass, detail + "band 15%, r2 >= 0.98"};
}

const StudyResult& sweeps() {
  static const StudyResult r = inequality_sweeps(1, 1000);
  return r;
}

Outcome smoothing_bound() {
  const auto& t = sweeps().table("smoothing");
  const auto sup = t.column("sup_multiplier");
  const auto bound = t.column("bound");
  int violations = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < sup.size(); ++k) {
    if (sup[k] > bound[k]) ++violations;
    worst = std::max(worst, sup[k] / bound[k]);
  }
  return {violations == 0 && sup.size() == 169,
          std::to_string(sup.size()) + " (eps, s) pairs over n in [-513, 512], violations " +
              std::to_string(violations) + ", max sup/bound " + num(worst)};
}

Outcome gn_sweep() {
  const auto& t = sweeps().table("gn");
  const auto growth = t.column("growth");
  const auto m64 = t.column("max_ratio_n64");
  const auto m128 = t.column("max_ratio_n128");
  bool pass = true;
  std::string detail;
  for (std::size_t k = 0; k < growth.size(); ++k) {
    pass = pass && std::isfinite(m128[k]) && growth[k] <= 0.05;
    detail += num(m64[k]) + "->" + num(m128[k]) + "; ";
  }
  const double worst = *std::max_element(growth.begin(), growth.end());
  return {pass, "constants " + detail + "max growth " + num(worst) + " (tol 0.05)"};
}

Outcome energy_equivalence() {
  const auto& r = sweeps();
  const auto violations = r.table("g4").column("violations");
  const double spread = r.parameters["g4_upper_constant_spread"].get<double>();
  const double total = std::accumulate(violations.begin(), violations.end(), 0.0);
  return {total == 0.0 && spread <= 2.0,
          "c_m " + num(r.parameters["certified_c_m"].get<double>()) + ", violations " + num(total) +
              " over 1000 fields with L2 <= 2 at N=64 and N=128, upper constant spread " + num(spread) + " (tol 2)"};
}

Outcome riccati_contrast() {
  const int m = 4;
  const auto c = integrable_coefficients(1.0);
  const auto cert = certify_cm(m, c, 1.0, 2000, 1);
  const std::vector<int> seps{4, 8, 16, 32};
  const auto family = separated_packet_family(GridSpec(256), m, seps, 1.0);
  SolverConfig cfg;
  cfg.dt = 1e-6;
  RiccatiOptions opts;
  opts.c_m = cert.c_m;
  const std::vector<double> labels(seps.begin(), seps.end());
  const auto r = riccati_study(family, m, c, cfg, opts, labels);
  const auto qm = r.table("quotients").column("q_modified");
  const auto qr = r.table("quotients").column("q_raw");
  std::string detail = "Q_mod";
  for (double v : qm) detail += " " + num(v);
  detail += ", Q_raw";
  for (double v : qr) detail += " " + num(v);
  detail += "; spread " + num(r.parameters["modified_spread"].get<double>()) + " (tol 2), growth " +
            num(r.parameters["raw_growth"].get<double>()) + " (need >= 4)";
  return {r.verdict == Verdict::Pass, detail};
}

Outcome eps_convergence() {
  const GridSpec g(64);
  const auto ladder = dyadic_ladder(3, 7);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  const auto r = eps_convergence_study(five_mode_data(g), 4, integrable_coefficients(1.0), 0.1, ladder, cfg);
  const auto h1 = r.table("differences").column("h1_diff");
  std::string detail = "H1 diffs";
  for (double v : h1) detail += " " + num(v);
  return {r.verdict == Verdict::Pass,
          detail + "; order " + num(r.parameters["h1_order"].get<double>()) + " (need >= 1)"};
}

Outcome continuity() {
  const GridSpec g(64);
  const std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5};
  SolverConfig cfg;
  cfg.dt = 1e-3;
  const auto r = continuity_study(five_mode_data(g), deltas, 4, integrable_coefficients(1.0), 1.0, cfg);
  return {r.verdict == Verdict::Pass,
          "slope " + num(r.parameters["fitted_slope"].get<double>()) + " (1 +- 0.15), max Gronwall quotient " +
              num(r.parameters["max_gronwall_quotient"].get<double>()) + ", spread " +
              num(r.parameters["quotient_spread"].get<double>()) + " (tol 2)"};
}

std::vector<std::pair<std::string, std::string>> read_tree(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream is(e.path(), std::ios::binary);
    out.emplace_back(fs::relative(e.path(), dir).string(),
                     std::string(std::istreambuf_iterator<char>(is), {}));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "fnls_acceptance_repro";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> commands{
      {"conserve"},
      {"sweep-inequalities", "--trials", "50", "--certify-trials", "200", "--seed", "3"},
      {"simulate", "--data", "random:seed=4:band=6:norm=0.5", "--integrable", "--t-end", "0.05", "--dt",
       "1e-3", "--c-m", "1"},
      {"continuity", "--integrable", "--t-end", "0.02", "--deltas", "1e-2,1e-3", "--seed", "9"},
  };
  std::ostringstream sink;
  for (const char* run : {"a", "b"}) {
    for (const auto& cmd : commands) {
      auto args = cmd;
      args.push_back("--out");
      args.push_back((root / run / cmd.front()).string());
      const int code = run_command(args, sink, sink);
      if (code != 0) return {false, cmd.front() + " exited with " + std::to_string(code)};
    }
  }
  const auto a = read_tree(root / "a");
  const auto b = read_tree(root / "b");
  fs::remove_all(root);
  return {!a.empty() && a == b, std::to_string(a.size()) + " files from " + std::to_string(commands.size()) +
                                    " commands, byte-identical: " + (a == b ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"linear exactness", linear_exactness},
      {"standing-wave fidelity", standing_wave_fidelity},
      {"integrable conservation", integrable_conservation},
      {"mollifier rates", bona_smith_rates},
      {"smoothing bound", smoothing_bound},
      {"interpolation sweep", gn_sweep},
      {"energy equivalence", energy_equivalence},
      {"riccati contrast", riccati_contrast},
      {"vanishing regularization", eps_convergence},
      {"continuity of the solution map", continuity},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
