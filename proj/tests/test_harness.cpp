#include <gtest/gtest.h>

#include <cmath>

#include "qtflow/harness.hpp"
#include "test_support.hpp"

using namespace qtflow;
using namespace qtflow::testing;

namespace {

ExperimentConfig small_config(Scheme scheme) {
  ExperimentConfig c;
  c.dim = 2;
  c.intervals = 8;
  c.length = 1.0;
  c.params = ModelParams{.a = -0.25, .b = 0.0, .c = 1.0, .L1 = 0.01, .kappa = 2.0, .c_star = 1.0};
  c.scheme = scheme;
  c.time.T = 0.1;
  c.time.tau = 0.01;
  c.initial = InitialSpec{.kind = "random", .seed = 4, .amplitude = 0.3};
  return c;
}

double max_trace(const QTensorField& q) {
  double t = 0;
  for (std::size_t n = 0; n < q.mesh().node_count(); ++n) t = std::max(t, std::abs(q.node_trace(n)));
  return t;
}

}  // namespace

TEST(Presets, ListedAndFound) {
  ASSERT_EQ(presets().size(), 3u);
  EXPECT_EQ(find_preset("hole2d").intervals, 80);
  EXPECT_EQ(find_preset("orient3d").dim, 3);
  EXPECT_EQ(find_preset("convergence2d").scheme, Scheme::sesav2);
  EXPECT_THROW(find_preset("nope"), std::invalid_argument);
}

TEST(Presets, InitialFieldsAreTraceFreeWithZeroBoundary) {
  for (const Preset& p : presets()) {
    const Mesh m = build_mesh(p.dim, p.dim == 2 ? 20 : 10, p.length);
    const QTensorField q = preset_field(p.name, m);
    EXPECT_LE(max_trace(q), 1e-13) << p.name;
    EXPECT_TRUE(q.boundary_is_zero()) << p.name;
    EXPECT_GT(max_abs(q), 0.0);
    const SavState s = preset_initial(p.name, m);
    EXPECT_DOUBLE_EQ(s.s, bulk_energy(s.Q, p.params));
  }
}

TEST(Presets, HoleInitialIsNormalizedUniaxial) {
  const Mesh m = build_mesh(2, 40, 2.0);
  const QTensorField q = preset_field("hole2d", m);
  EXPECT_NEAR(frobenius_sup_norm(q), std::sqrt(0.5), 1e-12);
  const ScalarField gap = eigen_gap_field(q, 0.5);
  for_each_interior(m, [&](std::size_t n, int, int, int) { EXPECT_NEAR(gap[n], 1.0, 1e-12); });
  EXPECT_EQ(defect_node_count(q), 0u);
}

TEST(RandomField, DeterministicAndTraceFree) {
  const Mesh m = build_mesh(3, 6, 1.0);
  const QTensorField a = random_field(m, 11, 0.5), b = random_field(m, 11, 0.5), c = random_field(m, 12, 0.5);
  EXPECT_EQ(max_abs_diff(a, b), 0.0);
  EXPECT_GT(max_abs_diff(a, c), 0.0);
  EXPECT_LE(max_trace(a), 1e-15);
  EXPECT_LE(max_abs(a), 1.0 + 1e-15);
}

TEST(Restriction, InjectionOntoCoarseNodes) {
  const Mesh fine = build_mesh(2, 16, 1.0), coarse = build_mesh(2, 8, 1.0);
  QTensorField q(fine);
  for_each_interior(fine, [&](std::size_t n, int i, int j, int) {
    const double x = i * fine.h, y = j * fine.h;
    q.set_node_matrix(n, {x * y, x, 0, x, -x * y, 0, 0, 0, 0});
  });
  const QTensorField r = restrict_to_coarse(q, coarse);
  for_each_interior(coarse, [&](std::size_t n, int i, int j, int) {
    const double x = i * coarse.h, y = j * coarse.h;
    const auto v = r.node_matrix(n);
    EXPECT_NEAR(v[0], x * y, 1e-15);
    EXPECT_NEAR(v[1], x, 1e-15);
  });
  EXPECT_THROW(restrict_to_coarse(q, build_mesh(2, 6, 1.0)), std::invalid_argument);
}

TEST(RunSimulation, ZeroFieldStaysZero) {
  ExperimentConfig c = small_config(Scheme::sesav2);
  c.initial.kind = "zero";
  const SimulationResult r = run_simulation(c);
  EXPECT_EQ(max_abs(r.final_state.Q), 0.0);
  ASSERT_EQ(r.records.size(), 11u);
  for (const auto& rec : r.records) EXPECT_EQ(rec.energy, 0.0);
}

TEST(RunSimulation, RecordsAndSnapshots) {
  ExperimentConfig c = small_config(Scheme::mbp_sesav1);
  c.time.T = 0.095;
  c.output.snapshot_every = 4;
  std::vector<int> seen;
  const SimulationResult r = run_simulation(c, [&](int step, const SavState&) { seen.push_back(step); });
  ASSERT_EQ(r.records.size(), 11u);
  EXPECT_EQ(r.records.front().step, 0);
  EXPECT_EQ(r.records.front().g, 1.0);
  EXPECT_NEAR(r.records.back().time, 0.095, 1e-14);
  EXPECT_NEAR(r.records.back().tau, 0.005, 1e-14);
  EXPECT_EQ(seen, (std::vector<int>{0, 4, 8, 10}));
  for (std::size_t k = 1; k < r.records.size(); ++k) EXPECT_LE(r.records[k].energy, r.records[k - 1].energy + 1e-12);
  EXPECT_TRUE(r.mbp.active);
}

TEST(RunSimulation, AdaptiveEndsAtFinalTime) {
  ExperimentConfig c = small_config(Scheme::mbp_sesav2);
  c.time.adaptive = true;
  c.time.tau = 1e-3;
  c.time.controller = AdaptiveController{.tau_min = 1e-3, .tau_max = 0.02, .alpha = 10.0};
  const SimulationResult r = run_simulation(c);
  EXPECT_NEAR(r.final_state.t, c.time.T, 1e-14);
  for (const auto& rec : r.records)
    if (rec.step > 0) EXPECT_LE(rec.tau, 0.02 + 1e-15);
}

TEST(RunSimulation, EnergyToleranceViolationIsReported) {
  ExperimentConfig c = small_config(Scheme::sesav1);
  c.energy_tol = -1.0;  // any step now counts as an increase
  EXPECT_THROW(run_simulation(c), InvariantViolation);
}

TEST(RateTable, LogRatios) {
  RateTable t{"tau", {{0.1, 4.0, 8.0, 1.0}, {0.05, 1.0, 2.0, 0.5}}};
  compute_rates(t);
  EXPECT_TRUE(std::isnan(t.rows[0].rate_grad));
  EXPECT_NEAR(t.rows[1].rate_grad, 2.0, 1e-15);
  EXPECT_NEAR(t.rows[1].rate_L2, 2.0, 1e-15);
  EXPECT_NEAR(t.rows[1].rate_s, 1.0, 1e-15);
}

TEST(ConvergenceStudy, SingleStepHasNoRate) {
  ExperimentConfig c = small_config(Scheme::sesav2);
  const RateTable t = convergence_study_time(c, {0.01}, 0.00125);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_GT(t.rows[0].error_L2, 0.0);
  EXPECT_TRUE(std::isnan(t.rows[0].rate_L2));
}

TEST(ConvergenceStudy, RejectsBadInputs) {
  ExperimentConfig c = small_config(Scheme::sesav2);
  EXPECT_THROW(convergence_study_time(c, {0.01}, 0.003), std::invalid_argument);
  EXPECT_THROW(convergence_study_time(c, {0.01}, 0.005), std::invalid_argument);
  EXPECT_THROW(convergence_study_space(c, {8, 12}), std::invalid_argument);
  EXPECT_THROW(convergence_study_space(c, {8}), std::invalid_argument);
}

TEST(ConvergenceStudy, TemporalRatesNearTwo) {
  ExperimentConfig c = small_config(Scheme::sesav2);
  c.initial.kind = "preset";
  c.initial.preset = "convergence2d";
  c.params = find_preset("convergence2d").params;
  c.intervals = 16;
  c.time.T = 0.25;
  const RateTable t = convergence_study_time(c, {1.0 / 16, 1.0 / 32, 1.0 / 64}, 1.0 / 1024);
  EXPECT_NEAR(t.rows.back().rate_L2, 2.0, 0.2);
  EXPECT_NEAR(t.rows.back().rate_grad, 2.0, 0.2);
}

TEST(Defects, CountedByEigenGap) {
  const Mesh m = build_mesh(2, 8, 1.0);
  QTensorField q(m);
  EXPECT_EQ(defect_node_count(q), m.interior_count());
  for_each_interior(m, [&](std::size_t n, int, int, int) { q.set_node_matrix(n, {0.5, 0, 0, 0, -0.5, 0, 0, 0, 0}); });
  EXPECT_EQ(defect_node_count(q), 0u);
}
