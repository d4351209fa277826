#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "qtflow/output.hpp"
#include "test_support.hpp"

using namespace qtflow;
using namespace qtflow::testing;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / ("qtflow_out_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST(Diagnostics, OneRecordTwoLines) {
  TempDir dir;
  const auto p = dir.path / "d.csv";
  write_diagnostics({DiagnosticsRecord{0, 0.0, 0.0, -1.5, 0.7, -1.5, 1.0, false}}, p);
  const std::string text = slurp(p);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.substr(0, text.find('\n')), "step,time,tau,energy,sup_norm,s,g,clamped");
}

TEST(Diagnostics, RoundTripExact) {
  TempDir dir;
  std::vector<DiagnosticsRecord> recs;
  for (int k = 0; k < 5; ++k)
    recs.push_back({k, k * 0.1, 0.1, -std::exp(k * 0.37), 1.0 / 3 + k, std::sqrt(2.0) * k, 1 - 1e-9 * k, k == 3});
  write_diagnostics(recs, dir.path / "d.csv");
  const auto back = read_diagnostics(dir.path / "d.csv");
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    EXPECT_EQ(back[k].step, recs[k].step);
    EXPECT_EQ(back[k].time, recs[k].time);
    EXPECT_EQ(back[k].energy, recs[k].energy);
    EXPECT_EQ(back[k].sup_norm, recs[k].sup_norm);
    EXPECT_EQ(back[k].s, recs[k].s);
    EXPECT_EQ(back[k].g, recs[k].g);
    EXPECT_EQ(back[k].clamped, recs[k].clamped);
  }
}

TEST(Diagnostics, UnwritablePath) {
  EXPECT_THROW(write_diagnostics({DiagnosticsRecord{}}, "/nonexistent/dir/d.csv"), IoError);
  EXPECT_THROW(write_diagnostics({}, "d.csv"), std::invalid_argument);
  EXPECT_THROW(read_diagnostics("/nonexistent/dir/d.csv"), IoError);
}

TEST(Snapshot, VtkHeaderAndFields) {
  TempDir dir;
  const Mesh m = build_mesh(3, 4, 1.0);
  const auto p = dir.path / "s.vtk";
  write_snapshot(random_tensor(m, 1, 0.3), p, SnapshotFormat::vtk, {{"energy_density", ScalarField(m)}});
  const std::string t = slurp(p);
  EXPECT_EQ(t.rfind("# vtk DataFile Version", 0), 0u);
  for (const char* s : {"ASCII", "DATASET STRUCTURED_POINTS", "DIMENSIONS 5 5 5", "SPACING 0.25 0.25 0.25",
                        "POINT_DATA 125", "SCALARS Q_11", "SCALARS Q_23", "VECTORS director", "SCALARS eigen_gap",
                        "SCALARS energy_density"})
    EXPECT_NE(t.find(s), std::string::npos) << s;
}

TEST(Snapshot, ZeroFieldIsDeterministic) {
  TempDir dir;
  const Mesh m = build_mesh(2, 4, 1.0);
  write_snapshot(QTensorField(m), dir.path / "a.vtk", SnapshotFormat::vtk);
  write_snapshot(QTensorField(m), dir.path / "b.vtk", SnapshotFormat::vtk);
  const std::string a = slurp(dir.path / "a.vtk");
  EXPECT_EQ(a, slurp(dir.path / "b.vtk"));
  EXPECT_NE(a.find("DIMENSIONS 5 5 1"), std::string::npos);
  EXPECT_EQ(a.find("nan"), std::string::npos);
}

TEST(Snapshot, CsvRows) {
  TempDir dir;
  const Mesh m = build_mesh(2, 4, 1.0);
  write_snapshot(random_tensor(m, 2), dir.path / "s.csv", SnapshotFormat::csv);
  const std::string t = slurp(dir.path / "s.csv");
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 26);
  EXPECT_EQ(t.rfind("i,j,k,x,y,z,", 0), 0u);
}

TEST(Rates, CsvAndText) {
  TempDir dir;
  RateTable t{"tau", {{0.1, 4.0, 8.0, 1.0}, {0.05, 1.0, 2.0, 0.25}}};
  compute_rates(t);
  write_rates_csv(t, dir.path / "r.csv");
  const std::string csv = slurp(dir.path / "r.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau,error_grad,rate_grad,error_L2,rate_L2,error_s,rate_s");
  const std::string text = format_rate_table(t);
  EXPECT_NE(text.find("---"), std::string::npos);
  EXPECT_NE(text.find("2.00"), std::string::npos);
}

TEST(Names, SnapshotFilename) {
  EXPECT_EQ(snapshot_filename(120, SnapshotFormat::vtk), "snapshot_000120.vtk");
  EXPECT_EQ(snapshot_filename(3, SnapshotFormat::csv), "snapshot_000003.csv");
}

TEST(Presets, Listing) {
  const std::string s = format_presets();
  for (const char* n : {"convergence2d", "hole2d", "orient3d"}) EXPECT_NE(s.find(n), std::string::npos);
}
