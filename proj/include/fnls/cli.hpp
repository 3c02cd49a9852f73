#pragma once

// Command-line front end. run_command() parses argv, runs one subcommand and
// returns the process exit code:
//   0  run completed / study passed (inconclusive studies also return 0)
//   1  study failed its thresholds
//   2  usage error
//   3  solver error (NonConvergence, NonFinite)

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"

#include "fnls/errors.hpp"
#include "fnls/exact.hpp"
#include "fnls/experiments.hpp"
#include "fnls/io.hpp"
#include "fnls/mollifier.hpp"
#include "fnls/random_fields.hpp"

namespace fnls {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Small parsers

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw UsageError("not a number: '" + std::string(s) + "'");
  return v;
}

inline long parse_long(std::string_view s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw UsageError("not an integer: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<double> parse_double_list(std::string_view s) {
  std::vector<double> out;
  for (auto item : split(s, ',')) out.push_back(parse_double(item));
  return out;
}

inline std::vector<int> parse_int_list(std::string_view s) {
  std::vector<int> out;
  for (auto item : split(s, ',')) out.push_back(static_cast<int>(parse_long(item)));
  return out;
}

/// Flat config file: one key=value per line, '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path.string());
  auto trim = [](std::string_view v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = v.find_last_not_of(" \t\r");
    return v.substr(b, e - b + 1);
  };
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out[std::string(trim(v.substr(0, eq)))] = std::string(trim(v.substr(eq + 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Initial-data mini-language
//
//   modes:n=3:amp=0.5:phase=0.1   amp * e^{i phase} e^{i n x}
//   standing:kappa=0.3:tau=1      kappa e^{i tau x}
//   decay:s=4.6[:scale=1]         coefficients scale * <n>^{-s}
//   random:seed=1[:band=8][:rate=0.5][:kind=exp|alg][:norm=0.5][:m=4]
//                                 seeded random field, optionally scaled to H^m norm `norm`
// Entries are summed with '+'.

struct DataEntry {
  std::string kind;
  std::map<std::string, std::string> params;

  double number(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : parse_double(it->second);
  }
  double required(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw UsageError(kind + ": missing '" + key + "'");
    return parse_double(it->second);
  }
  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : params) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw UsageError(kind + ": unknown key '" + k + "'");
      }
    }
  }
};

inline DataEntry parse_data_entry(std::string_view entry) {
  const auto parts = split(entry, ':');
  DataEntry e{std::string(parts.front()), {}};
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string_view::npos) throw UsageError("data spec: expected key=value in '" + std::string(entry) + "'");
    e.params[std::string(parts[i].substr(0, eq))] = std::string(parts[i].substr(eq + 1));
  }
  return e;
}

inline int integer_param(const DataEntry& e, const std::string& key, double value) {
  if (value != std::floor(value)) throw UsageError(e.kind + ": '" + key + "' must be an integer");
  return static_cast<int>(value);
}

inline SpectralField parse_data_spec(std::string_view spec, const GridSpec& grid) {
  if (spec.empty()) throw UsageError("empty data spec");
  SpectralField psi(grid);
  for (auto raw : split(spec, '+')) {
    const DataEntry e = parse_data_entry(raw);
    if (e.kind == "modes") {
      e.allow({"n", "amp", "phase"});
      const int n = integer_param(e, "n", e.required("n"));
      if (!grid.resolves(n) || n == grid.nyquist_mode()) throw UsageError("modes: n not resolved on grid");
      psi += SpectralField::plane_wave(grid, n, std::polar(e.number("amp", 1.0), e.number("phase", 0.0)));
    } else if (e.kind == "standing") {
      e.allow({"kappa", "tau"});
      const int tau = integer_param(e, "tau", e.required("tau"));
      if (!grid.resolves(tau) || tau == grid.nyquist_mode()) throw UsageError("standing: tau not resolved on grid");
      psi += SpectralField::plane_wave(grid, tau, e.required("kappa"));
    } else if (e.kind == "decay") {
      e.allow({"s", "scale"});
      SpectralField d = critical_decay_data(grid, 0, e.required("s"));
      d *= Complex(e.number("scale", 1.0));
      psi += d;
    } else if (e.kind == "random") {
      e.allow({"seed", "band", "rate", "kind", "norm", "m"});
      const auto seed = static_cast<std::uint64_t>(integer_param(e, "seed", e.required("seed")));
      FieldProfile profile;
      profile.band = integer_param(e, "band", e.number("band", profile.band));
      profile.rate = e.number("rate", profile.rate);
      if (const auto it = e.params.find("kind"); it != e.params.end()) {
        if (it->second == "exp") profile.kind = DecayKind::Exponential;
        else if (it->second == "alg") profile.kind = DecayKind::Algebraic;
        else throw UsageError("random: kind must be exp or alg");
      }
      std::mt19937_64 rng(seed);
      SpectralField r = random_field(grid, profile, rng);
      if (e.params.count("norm")) {
        r = normalized_hm(r, integer_param(e, "m", e.number("m", 4)), e.required("norm"));
      }
      psi += r;
    } else {
      throw UsageError("unknown data entry '" + e.kind + "'");
    }
  }
  return psi;
}

// ---------------------------------------------------------------------------
// Options shared by subcommands

struct CommonOptions {
  std::string out;
  std::string config;
  int modes = 64;
  double nu = 1.0;
  std::string lambda = "0,0,0,0,0,0";
  bool integrable = false;
  SolverConfig solver;
  std::uint64_t seed = 1;
};

inline void add_common(CLI::App* sub, CommonOptions& o, bool solver = true) {
  sub->add_option("--out", o.out, "output directory (default: $FNLS_OUTPUT_DIR or .)");
  sub->add_option("--config", o.config, "flat key=value file; keys are long option names");
  sub->add_option("--modes", o.modes, "grid size N (even, >= 4)")->capture_default_str();
  sub->add_option("--nu", o.nu, "dispersion coefficient nu")->capture_default_str();
  sub->add_option("--lambda", o.lambda, "l1,...,l6")->capture_default_str();
  sub->add_flag("--integrable", o.integrable, "use the integrable coefficient set for --nu");
  sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
  if (!solver) return;
  sub->add_option("--eps", o.solver.epsilon, "regularization epsilon in [0, 1]")->capture_default_str();
  sub->add_option("--dt", o.solver.dt, "time step")->capture_default_str();
  sub->add_option("--picard-tol", o.solver.picard_tol)->capture_default_str();
  sub->add_option("--picard-max-iters", o.solver.picard_max_iters)->capture_default_str();
  sub->add_option("--pad", o.solver.dealias_pad_factor, "dealiasing factor (0 = automatic)")->capture_default_str();
  sub->add_option("--m", o.solver.sobolev_index_m, "Sobolev index")->capture_default_str();
  sub->add_option("--blowup-factor", o.solver.blowup_factor)->capture_default_str();
  sub->add_option("--record-every", o.solver.record_every)->capture_default_str();
}

inline CoefficientSet coefficients(const CommonOptions& o) {
  if (o.integrable) return integrable_coefficients(o.nu);
  const auto l = parse_double_list(o.lambda);
  if (l.size() != 6) throw UsageError("--lambda needs six comma-separated values");
  return CoefficientSet(o.nu, {l[0], l[1], l[2], l[3], l[4], l[5]});
}

inline GridSpec grid_of(const CommonOptions& o) {
  try {
    return GridSpec(o.modes);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline std::filesystem::path output_dir(const CommonOptions& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("FNLS_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

/// Fills options absent from the command line with values from --config.
inline void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  for (const auto& [key, value] : read_config_file(path)) {
    if (key == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("config: unknown key '" + key + "'");
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

inline int verdict_exit(Verdict v) { return v == Verdict::Fail ? 1 : 0; }

inline int report_study(const StudyResult& r, const CommonOptions& o, std::ostream& out) {
  const auto files = write_study(r, output_dir(o));
  out << r.name << ": " << to_string(r.verdict) << '\n';
  for (const auto& n : r.notes) out << "  note: " << n << '\n';
  out << "  wrote " << files.size() << " files to " << output_dir(o).string() << '\n';
  return verdict_exit(r.verdict);
}

// ---------------------------------------------------------------------------
// Entry point

inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Pseudospectral toolkit for the fourth-order NLS on the torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.footer(
      "Data specs: modes:n=..:amp=..:phase=.. | standing:kappa=..:tau=.. | decay:s=..[:scale=..]\n"
      "            | random:seed=..[:band=..][:rate=..][:kind=exp|alg][:norm=..][:m=..]  joined by '+'.\n"
      "Config files: one key=value per line using long option names without '--';\n"
      "command-line flags take precedence. Exit codes: 0 ok, 1 study failed, 2 usage, 3 solver error.");

  CommonOptions o;
  std::string data;
  double t_end = 1.0;
  double c_m = 0.0;

  // simulate
  auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(sim, o);
  sim->add_option("--data", data, "initial data spec")->required();
  sim->add_option("--t-end", t_end)->capture_default_str();
  sim->add_option("--c-m", c_m, "constant in the modified energy")->capture_default_str();

  // conserve
  std::string conserve_data = "random:seed=1:band=4:rate=1:norm=0.5:m=4";
  double conserve_t = 0.1;
  double conserve_dt = 2.5e-3;
  ConservationOptions cons_opts;
  auto* conserve = app.add_subcommand("conserve", "drift of I_0, I_1, I_2 in the integrable case");
  add_common(conserve, o);
  conserve->add_option("--data", conserve_data)->capture_default_str();
  conserve->add_option("--t-end", conserve_t)->capture_default_str();
  conserve->add_option("--step", conserve_dt, "coarse time step (overrides --dt)")->capture_default_str();
  conserve->add_option("--drift-tol", cons_opts.drift_tol)->capture_default_str();

  // bona-smith
  int bs_m = 4;
  int bs_modes = 1 << 16;
  std::string bs_l = "0,1,2";
  std::string bs_ladder = "0.5,0.25,0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625";
  double bs_excess = 0.6;
  auto* bona = app.add_subcommand("bona-smith", "mollifier approximation rates");
  bona->add_option("--out", o.out);
  bona->add_option("--config", o.config);
  bona->add_option("--m", bs_m)->capture_default_str();
  bona->add_option("--modes", bs_modes)->capture_default_str();
  bona->add_option("--l", bs_l, "comma-separated l values")->capture_default_str();
  bona->add_option("--eps-ladder", bs_ladder)->capture_default_str();
  bona->add_option("--excess", bs_excess, "data decay <n>^{-m-excess}")->capture_default_str();

  // eps-converge
  std::string eps_data = "modes:n=0:amp=1+modes:n=1:amp=0.5+modes:n=-1:amp=0.3:phase=1.5707963267948966"
                         "+modes:n=2:amp=0.2+modes:n=-2:amp=0.1";
  double eps_norm = 0.5;
  double eps_t = 0.1;
  std::string eps_ladder = "0.125,0.0625,0.03125,0.015625,0.0078125";
  auto* epsc = app.add_subcommand("eps-converge", "convergence as the regularization vanishes");
  add_common(epsc, o);
  epsc->add_option("--data", eps_data)->capture_default_str();
  epsc->add_option("--norm", eps_norm, "rescale data to this H^m norm (0 keeps it)")->capture_default_str();
  epsc->add_option("--t-end", eps_t)->capture_default_str();
  epsc->add_option("--eps-ladder", eps_ladder)->capture_default_str();

  // riccati
  std::string separations = "4,8,16,32";
  std::string family_kind = "packets";
  double hm_norm = 1.0;
  double ric_c_m = -1.0;
  double l2_ceiling = 1.0;
  int certify_trials = 2000;
  RiccatiOptions ric_opts;
  auto* ric = app.add_subcommand("riccati", "Riccati quotients of modified and unmodified energy");
  add_common(ric, o);
  ric->add_option("--separations", separations)->capture_default_str();
  ric->add_option("--family", family_kind, "packets or two-mode")->capture_default_str();
  ric->add_option("--hm-norm", hm_norm)->capture_default_str();
  ric->add_option("--c-m", ric_c_m, "negative: certify")->capture_default_str();
  ric->add_option("--l2-ceiling", l2_ceiling)->capture_default_str();
  ric->add_option("--certify-trials", certify_trials)->capture_default_str();
  ric->add_option("--steps", ric_opts.steps)->capture_default_str();

  // continuity
  std::string cont_data = eps_data;
  double cont_norm = 0.5;
  double cont_t = 1.0;
  std::string deltas = "1e-2,1e-3,1e-4,1e-5";
  auto* cont = app.add_subcommand("continuity", "continuity of the data-to-solution map");
  add_common(cont, o);
  cont->add_option("--data", cont_data)->capture_default_str();
  cont->add_option("--norm", cont_norm, "rescale data to this H^m norm (0 keeps it)")->capture_default_str();
  cont->add_option("--t-end", cont_t)->capture_default_str();
  cont->add_option("--deltas", deltas)->capture_default_str();

  // sweep-inequalities
  int trials = 1000;
  InequalityOptions ineq;
  auto* sweep = app.add_subcommand("sweep-inequalities", "interpolation, smoothing and energy-equivalence sweeps");
  sweep->add_option("--out", o.out);
  sweep->add_option("--config", o.config);
  sweep->add_option("--seed", o.seed)->capture_default_str();
  sweep->add_option("--trials", trials)->capture_default_str();
  sweep->add_option("--l2-ceiling", ineq.l2_ceiling)->capture_default_str();
  sweep->add_option("--certify-trials", ineq.certify_trials)->capture_default_str();

  // standing-wave
  double kappa = 0.3;
  int tau = 1;
  auto* stand = app.add_subcommand("standing-wave", "frequency and residual of a plane-wave solution");
  add_common(stand, o, false);
  stand->add_option("--kappa", kappa)->capture_default_str();
  stand->add_option("--tau", tau)->capture_default_str();

  // certify-cm
  int cert_m = 4;
  int cert_trials = 2000;
  auto* cert = app.add_subcommand("certify-cm", "randomized certification of C_m");
  add_common(cert, o, false);
  cert->add_option("--m", cert_m)->capture_default_str();
  cert->add_option("--l2-ceiling", l2_ceiling)->capture_default_str();
  cert->add_option("--trials", cert_trials)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    for (auto* sub : app.get_subcommands()) apply_config(sub, o.config);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (sim->parsed()) {
      const auto c = coefficients(o);
      const auto grid = grid_of(o);
      const auto psi0 = parse_data_spec(data, grid);
      EnergyRecorder recorder(o.solver.sobolev_index_m, c, c_m);
      const auto traj = integrate(psi0, t_end, o.solver, c, recorder.observer());
      const auto dir = output_dir(o);
      write_csv_file(dir / "trajectory.csv", trajectory_table(traj.samples));
      write_csv_file(dir / "final_state.csv", state_table(traj.final_state()));
      write_csv_file(dir / "energy.csv", energy_table(recorder.report()));
      StudyResult r;
      r.name = "simulate";
      r.parameters = Json{{"data", data},
                          {"num_modes", o.modes},
                          {"t_end", t_end},
                          {"c_m", c_m},
                          {"coefficients", to_json(c)},
                          {"solver", to_json(o.solver)},
                          {"steps_taken", traj.steps_taken},
                          {"max_picard_iterations", traj.max_picard_iterations},
                          {"final_time", traj.final_time()},
                          {"status", traj.status == TrajectoryStatus::Completed ? "completed"
                                                                                 : "blowup_suspected"}};
      r.verdict = Verdict::Pass;
      write_json_file(dir / "simulate.json",
                      manifest(r, {"trajectory.csv", "final_state.csv", "energy.csv"}));
      out << "simulate: " << r.parameters["status"].get<std::string>() << " at t = "
          << format_number(traj.final_time()) << '\n';
      return 0;
    }
    if (conserve->parsed()) {
      const auto grid = grid_of(o);
      const auto psi0 = parse_data_spec(conserve_data, grid);
      SolverConfig cfg = o.solver;
      cfg.dt = conserve_dt;
      auto r = conservation_study(psi0, o.nu, conserve_t, cfg, cons_opts);
      r.parameters["data"] = conserve_data;
      return report_study(r, o, out);
    }
    if (bona->parsed()) {
      const auto l_values = parse_int_list(bs_l);
      const auto ladder = parse_double_list(bs_ladder);
      auto r = bona_smith_rate_study(critical_decay_data(GridSpec(bs_modes), bs_m, bs_excess), bs_m,
                                     l_values, ladder);
      r.parameters["data_excess"] = bs_excess;
      return report_study(r, o, out);
    }
    if (epsc->parsed()) {
      const auto c = coefficients(o);
      auto psi0 = parse_data_spec(eps_data, grid_of(o));
      if (eps_norm > 0.0) psi0 = normalized_hm(psi0, o.solver.sobolev_index_m, eps_norm);
      const auto ladder = parse_double_list(eps_ladder);
      auto r = eps_convergence_study(psi0, o.solver.sobolev_index_m, c, eps_t, ladder, o.solver);
      r.parameters["data"] = eps_data;
      return report_study(r, o, out);
    }
    if (ric->parsed()) {
      const auto c = coefficients(o);
      const int m = o.solver.sobolev_index_m;
      const auto seps = parse_int_list(separations);
      const auto grid = grid_of(o);
      std::vector<SpectralField> family;
      if (family_kind == "packets") family = separated_packet_family(grid, m, seps, hm_norm);
      else if (family_kind == "two-mode") family = two_mode_family(grid, m, seps, hm_norm);
      else throw UsageError("--family must be packets or two-mode");
      ric_opts.c_m = ric_c_m >= 0.0 ? ric_c_m : certify_cm(m, c, l2_ceiling, certify_trials, o.seed).c_m;
      const std::vector<double> labels(seps.begin(), seps.end());
      auto r = riccati_study(family, m, c, o.solver, ric_opts, labels);
      r.parameters["family"] = family_kind;
      r.parameters["c_m_certified"] = ric_c_m < 0.0;
      return report_study(r, o, out);
    }
    if (cont->parsed()) {
      const auto c = coefficients(o);
      auto phi = parse_data_spec(cont_data, grid_of(o));
      if (cont_norm > 0.0) phi = normalized_hm(phi, o.solver.sobolev_index_m, cont_norm);
      ContinuityOptions copts;
      copts.seed = o.seed;
      const auto ladder = parse_double_list(deltas);
      auto r = continuity_study(phi, ladder, o.solver.sobolev_index_m, c, cont_t, o.solver, copts);
      r.parameters["data"] = cont_data;
      return report_study(r, o, out);
    }
    if (sweep->parsed()) {
      return report_study(inequality_sweeps(o.seed, trials, ineq), o, out);
    }
    if (stand->parsed()) {
      const auto c = coefficients(o);
      const auto wave = standing_wave(kappa, tau, c, grid_of(o));
      const double residual = standing_wave_residual(wave.initial, wave.omega, c, default_pad_factor(c));
      StudyResult r;
      r.name = "standing_wave";
      r.parameters = Json{{"kappa", kappa}, {"tau", tau}, {"num_modes", o.modes},
                          {"coefficients", to_json(c)}, {"omega", wave.omega}, {"residual", residual}};
      r.verdict = Verdict::Pass;
      write_json_file(output_dir(o) / "standing_wave.json", manifest(r, {}));
      out << "omega = " << format_number(wave.omega) << '\n'
          << "residual = " << format_number(residual) << '\n';
      return 0;
    }
    if (cert->parsed()) {
      const auto c = coefficients(o);
      const auto cm = certify_cm(cert_m, c, l2_ceiling, cert_trials, o.seed);
      StudyResult r;
      r.name = "certify_cm";
      r.parameters = Json{{"m", cm.m}, {"coefficients", to_json(c)}, {"l2_ceiling", cm.l2_ceiling},
                          {"trials", cm.trials}, {"seed", o.seed}, {"c_m", cm.c_m},
                          {"worst_margin", cm.worst_margin}};
      r.verdict = cm.worst_margin >= 0.0 ? Verdict::Pass : Verdict::Fail;
      write_json_file(output_dir(o) / "certify_cm.json", manifest(r, {}));
      out << "c_m = " << format_number(cm.c_m) << '\n'
          << "worst_margin = " << format_number(cm.worst_margin) << '\n';
      return verdict_exit(r.verdict);
    }
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  return run_command(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace fnls
