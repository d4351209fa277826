#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "qtflow/config.hpp"

using namespace qtflow;

namespace {

const char* kMinimal = R"(
[mesh]
dim = 2
intervals = 16
length = 1.0

[model]
a = -0.25
b = 0
c = 1
L1 = 0.01

[scheme]
name = mbp_sesav1

[time]
T = 0.5
tau = 0.01

[initial]
kind = random
seed = 3
amplitude = 0.2
)";

std::string error_of(std::string_view text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ParseConfig, PresetOnly) {
  const ExperimentConfig c = parse_config("preset = hole2d\n");
  EXPECT_EQ(c.preset, "hole2d");
  EXPECT_EQ(c.intervals, 80);
  EXPECT_EQ(c.scheme, Scheme::mbp_sesav2);
  EXPECT_EQ(c.initial.kind, "preset");
}

TEST(ParseConfig, PresetWithOverrides) {
  const ExperimentConfig c =
      parse_config("preset = hole2d\n[mesh]\nintervals = 20 # coarse\n", {"time.T=0.5", "scheme.name=sesav1"});
  EXPECT_EQ(c.intervals, 20);
  EXPECT_DOUBLE_EQ(c.time.T, 0.5);
  EXPECT_EQ(c.scheme, Scheme::sesav1);
}

TEST(ParseConfig, FullySpecifiedDefaults) {
  const ExperimentConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(c.initial.seed, 3u);
  const Mesh m = config_mesh(c);
  const double eta = eta_bound(c.params, frobenius_sup_norm(initial_field(c, m)), 2);
  EXPECT_DOUBLE_EQ(c.params.kappa, round_up_two_figures(kappa_min(c.params, eta)));
  EXPECT_DOUBLE_EQ(c.params.c_star, default_c_star(c.params, eta, 1.0));
  EXPECT_GT(c.params.c_star, 0.0);
}

TEST(ParseConfig, UnknownKeyAndSection) {
  EXPECT_NE(error_of(std::string(kMinimal) + "foo = 1\n").find("foo"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "[extra]\nx = 1\n").find("extra"), std::string::npos);
}

TEST(ParseConfig, MissingKeysAggregated) {
  const std::string e = error_of("[mesh]\ndim = 2\n");
  for (const char* key : {"mesh.intervals", "mesh.length", "model.a", "model.c", "model.L1", "scheme.name", "time.T",
                          "time.tau", "initial.kind"})
    EXPECT_NE(e.find(key), std::string::npos) << key;
}

TEST(ParseConfig, MalformedNumberNamesLine) {
  const std::string e = error_of("preset = hole2d\n[model]\na = -4x\n");
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;
  EXPECT_NE(e.find("'model.a'"), std::string::npos) << e;
}

TEST(ParseConfig, RangeChecks) {
  EXPECT_NE(error_of(kMinimal, {"model.c=0"}), "");
  EXPECT_NE(error_of(kMinimal, {"mesh.dim=4"}), "");
  EXPECT_NE(error_of(kMinimal, {"time.tau=-1"}), "");
  EXPECT_NE(error_of(kMinimal, {"scheme.name=euler"}), "");
  EXPECT_NE(error_of(kMinimal, {"bad override"}), "");
}

TEST(ParseConfig, DuplicateKey) {
  EXPECT_NE(error_of("preset = hole2d\n[mesh]\nintervals = 20\nintervals = 30\n"), "");
}

TEST(ParseConfig, KappaBelowMinimumWarns) {
  const ExperimentConfig c = parse_config(kMinimal, {"model.kappa=0.01"});
  ASSERT_FALSE(c.warnings.empty());
  EXPECT_NE(c.warnings.front().find("kappa"), std::string::npos);
}

TEST(LoadConfig, MissingFile) { EXPECT_THROW(load_config("/nonexistent/qtflow.ini"), ConfigError); }

TEST(LoadConfig, ReadsFile) {
  const auto path = std::filesystem::temp_directory_path() / "qtflow_test_config.ini";
  std::ofstream(path) << kMinimal;
  EXPECT_EQ(load_config(path).intervals, 16);
  std::filesystem::remove(path);
}

TEST(RoundUp, TwoSignificantFigures) {
  EXPECT_DOUBLE_EQ(round_up_two_figures(1.234), 1.3);
  EXPECT_DOUBLE_EQ(round_up_two_figures(1.2), 1.2);
  EXPECT_DOUBLE_EQ(round_up_two_figures(0.05611), 0.057);
  EXPECT_DOUBLE_EQ(round_up_two_figures(123.0), 130.0);
}
