#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "fnls/io.hpp"

using namespace fnls;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fnls_io_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(-2.5e-300), "-2.5e-300");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Csv, HeaderRowsAndLineEndings) {
  Table t{"t", {"a", "b"}, {}};
  t.add_row({1.0, 0.5});
  t.add_row({-3.0, 1e-20});
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(), "a,b\n1,0.5\n-3,1e-20\n");

  const auto dir = scratch("csv");
  write_csv_file(dir / "nested" / "t.csv", t);
  const auto text = slurp(dir / "nested" / "t.csv");
  EXPECT_EQ(text, os.str());
  EXPECT_EQ(text.find('\r'), std::string::npos);
  fs::remove_all(dir);
}

TEST(Tables, StateAndTrajectoryLayout) {
  const GridSpec g(4);
  SpectralField psi(g);
  psi[1] = Complex(2.0, -1.0);
  const auto st = state_table(psi);
  EXPECT_EQ(st.column("param"), (std::vector<double>{-2, -1, 0, 1}));
  EXPECT_EQ(st.column("im").back(), -1.0);

  const std::vector<TrajectorySample> samples{{0.0, psi}, {0.5, psi}};
  const auto tr = trajectory_table(samples);
  EXPECT_EQ(tr.rows.size(), 8u);
  EXPECT_EQ(tr.rows[4][0], 0.5);
  EXPECT_EQ(tr.rows[4][1], -2.0);
}

TEST(Manifest, FieldsAndStudyFiles) {
  StudyResult r;
  r.name = "demo";
  r.parameters = Json{{"m", 4}};
  r.thresholds = Json{{"tol", 1e-6}};
  r.verdict = Verdict::Fail;
  r.notes = {"first"};
  Table t{"series", {"x"}, {}};
  t.add_row({1.0});
  r.tables = {t};

  const auto j = manifest(r, {"demo_series.csv"});
  EXPECT_EQ(j["name"], "demo");
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_EQ(j["notes"][0], "first");
  EXPECT_EQ(j["tables"][0], "demo_series.csv");
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"name", "version", "parameters", "thresholds", "verdict",
                                             "notes", "tables"}));

  const auto dir = scratch("study");
  const auto files = write_study(r, dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(slurp(dir / "demo_series.csv"), "x\n1\n");
  EXPECT_EQ(Json::parse(slurp(dir / "demo.json")), j);
  fs::remove_all(dir);
}
