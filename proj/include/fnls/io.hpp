#pragma once

// Persistence of study results: one JSON manifest plus one CSV per table.
// Output is locale independent (std::to_chars) with LF line endings, so
// identical inputs give byte-identical files.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnls/experiments.hpp"

namespace fnls {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip representation; nan/inf spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

inline void write_csv(std::ostream& os, const Table& t) { write_csv(os, t.columns, t.rows); }

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

inline void write_csv_file(const std::filesystem::path& path, const Table& t) {
  auto os = open_output(path);
  write_csv(os, t);
}

/// time, mode, re, im for every stored sample and every mode (ascending n).
inline Table trajectory_table(std::span<const TrajectorySample> samples) {
  Table t{"trajectory", {"time", "mode", "re", "im"}, {}};
  for (const auto& s : samples) {
    const auto& g = s.state.grid();
    for (int n = g.min_mode(); n <= g.max_mode(); ++n) {
      const Complex z = s.state[n];
      t.add_row({s.time, double(n), z.real(), z.imag()});
    }
  }
  return t;
}

inline Table state_table(const SpectralField& psi) {
  Table t{"final_state", {"param", "re", "im"}, {}};
  const auto& g = psi.grid();
  for (int n = g.min_mode(); n <= g.max_mode(); ++n) t.add_row({double(n), psi[n].real(), psi[n].imag()});
  return t;
}

inline Table energy_table(const EnergyReport& r) {
  Table t{"energy",
          {"time", "h_m_norm_sq", "top_derivative_sq", "l2_norm_sq", "modified_energy", "i0", "i1", "i2"},
          {}};
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    t.add_row({r.times[k], r.h_m_norm_sq[k], r.top_derivative_sq[k], r.l2_norm_sq[k],
               r.modified_energy[k], r.i0[k], r.i1[k], r.i2[k]});
  }
  return t;
}

inline Json manifest(const StudyResult& r, const std::vector<std::string>& files) {
  Json notes = Json::array();
  for (const auto& n : r.notes) notes.push_back(n);
  return Json{{"name", r.name},
              {"version", kVersion},
              {"parameters", r.parameters},
              {"thresholds", r.thresholds},
              {"verdict", std::string(to_string(r.verdict))},
              {"notes", notes},
              {"tables", files}};
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
  auto os = open_output(path);
  os << j.dump(2) << '\n';
}

/// Writes <name>_<table>.csv for each table and <name>.json; returns the paths.
inline std::vector<std::filesystem::path> write_study(const StudyResult& r,
                                                      const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::vector<std::string> files;
  for (const auto& t : r.tables) {
    const std::string file = r.name + "_" + t.name + ".csv";
    write_csv_file(dir / file, t);
    files.push_back(file);
    out.push_back(dir / file);
  }
  write_json_file(dir / (r.name + ".json"), manifest(r, files));
  out.push_back(dir / (r.name + ".json"));
  return out;
}

}  // namespace fnls
