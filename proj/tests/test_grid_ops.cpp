#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qtflow/grid_ops.hpp"
#include "test_support.hpp"

using namespace qtflow;
using namespace qtflow::testing;

namespace {

// Independent assembly of the cross-derivative operator from Kronecker
// matrices, acting on the interior-packed unique components.
QTensorField cross_derivative_oracle(const QTensorField& q) {
  const Mesh& mesh = q.mesh();
  const int d = mesh.dim;
  std::vector<Eigen::MatrixXd> D;
  for (int k = 0; k < d; ++k) D.push_back(along_axis(centred_difference_1d(mesh.intervals, mesh.h), mesh, k));
  auto entry = [&](int i, int j) { return interior_vector(q(i, j)); };

  std::vector<Eigen::VectorXd> w(d);
  for (int i = 0; i < d; ++i) {
    w[i] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.interior_count()));
    for (int k = 0; k < d; ++k) w[i] += D[k] * entry(i, k);
  }
  Eigen::VectorXd div = Eigen::VectorXd::Zero(w[0].size());
  for (int l = 0; l < d; ++l) div += D[l] * w[l];

  QTensorField out(mesh);
  for (int c = 0; c < q.component_count(); ++c) {
    const auto [i, j] = QTensorField::component_ij(d, c);
    Eigen::VectorXd v = D[j] * w[i] + D[i] * w[j];
    if (i == j) v -= (2.0 / d) * div;
    out.component(c) = from_interior(v, mesh);
  }
  return out;
}

}  // namespace

TEST(Laplacian, ZeroField) {
  const Mesh m = build_mesh(2, 8, 1.0);
  const ScalarField z(m);
  EXPECT_EQ(max_abs_diff(laplacian_apply(z), z), 0.0);
}

TEST(Laplacian, SineModeIsEigenfunction) {
  const int M = 8;
  const Mesh m = build_mesh(2, M, 1.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(second_difference_1d(M, m.h));
  for (int k = 1; k < M; ++k) {
    ScalarField u(m);
    for_each_interior(m, [&](std::size_t n, int i, int j, int) {
      u[n] = std::sin(k * std::numbers::pi * i / M) * std::sin(std::numbers::pi * j / M);
    });
    // Eigenvalues from the dense 1D matrix, ascending (most negative first).
    const double lam = eig.eigenvalues()(M - 1 - k) + eig.eigenvalues()(M - 2);
    ScalarField expect = u;
    expect *= lam;
    EXPECT_LT(max_abs_diff(laplacian_apply(u), expect), 1e-10) << "mode " << k;
  }
}

TEST(Laplacian, MatchesKroneckerMatrix) {
  for (int d : {2, 3}) {
    const Mesh m = build_mesh(d, d == 2 ? 8 : 6, 1.3);
    const ScalarField u = random_scalar(m, 11);
    const Eigen::VectorXd ref = laplacian_matrix(m) * interior_vector(u);
    const ScalarField got = laplacian_apply(u);
    EXPECT_LT((interior_vector(got) - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
    EXPECT_TRUE(got.boundary_is_zero());
  }
}

TEST(InnerProduct, Values) {
  const Mesh m = build_mesh(2, 4, 1.0);
  ScalarField one(m), zero(m);
  for_each_interior(m, [&](std::size_t n, int, int, int) { one[n] = 1.0; });
  EXPECT_DOUBLE_EQ(inner_product(one, one), 0.5625);
  EXPECT_EQ(inner_product(zero, one), 0.0);
  EXPECT_THROW(inner_product(one, ScalarField(build_mesh(2, 5, 1.0))), std::invalid_argument);
}

TEST(SummationByParts, LaplacianAndGradient) {
  for (int d : {2, 3}) {
    const Mesh m = build_mesh(d, d == 2 ? 16 : 8, 2.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ScalarField u = random_scalar(m, 100 + seed), v = random_scalar(m, 200 + seed);
      const double lhs = inner_product(laplacian_apply(u), v);
      const double rhs = -grad_inner(u, v);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(rhs));
      EXPECT_NEAR(inner_product(laplacian_apply(u), v), inner_product(u, laplacian_apply(v)), 1e-12 * std::abs(lhs));
      const double g = grad_norm_sq(u);
      EXPECT_GE(g, 0.0);
      EXPECT_NEAR(g, -inner_product(laplacian_apply(u), u), 1e-12 * g);
      EXPECT_NEAR(g, grad_norm_sq_edges(u), 1e-14 * g);
    }
  }
}

TEST(SummationByParts, CentredSecondDifferencesSelfAdjoint) {
  const Mesh m = build_mesh(3, 7, 1.0);
  const ScalarField u = random_scalar(m, 5), v = random_scalar(m, 6);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      const double a = inner_product(central_difference(central_difference(u, l), k), v);
      const double b = inner_product(u, central_difference(central_difference(v, l), k));
      const double c = -inner_product(central_difference(u, l), central_difference(v, k));
      EXPECT_NEAR(a, b, 1e-12 * std::abs(a) + 1e-12);
      EXPECT_NEAR(a, c, 1e-12 * std::abs(a) + 1e-12);
    }
}

TEST(CrossDerivative, ZeroField) {
  const Mesh m = build_mesh(3, 6, 1.0);
  EXPECT_EQ(max_abs(cross_derivative_apply(QTensorField(m))), 0.0);
}

TEST(CrossDerivative, MatchesKroneckerOracle) {
  for (int d : {2, 3}) {
    const Mesh m = build_mesh(d, d == 2 ? 8 : 6, 1.0);
    const QTensorField q = random_tensor(m, 21);
    const QTensorField got = cross_derivative_apply(q);
    const QTensorField ref = cross_derivative_oracle(q);
    EXPECT_LT(max_abs_diff(got, ref), 1e-12 * max_abs(ref));
    EXPECT_TRUE(got.boundary_is_zero());
  }
}

TEST(CrossDerivative, TraceFreeOutput) {
  const Mesh m = build_mesh(3, 8, 1.0);
  const QTensorField out = cross_derivative_apply(random_tensor(m, 3));
  const double scale = max_abs(out);
  for (std::size_t n = 0; n < m.node_count(); ++n) EXPECT_LT(std::abs(out.node_trace(n)), 1e-13 * scale);
}

TEST(CrossDerivative, SelfAdjointAndNegative) {
  for (int d : {2, 3}) {
    const Mesh m = build_mesh(d, d == 2 ? 12 : 6, 1.0);
    const QTensorField p = random_tensor(m, 31), q = random_tensor(m, 32);
    const double a = tensor_inner(cross_derivative_apply(p), q);
    const double b = tensor_inner(p, cross_derivative_apply(q));
    EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
    // <Dc P, Q>_F = -2 sum_i <w_i(P), w_i(Q)> on trace-free data.
    const auto wp = tensor_divergence(p), wq = tensor_divergence(q);
    double expect = 0;
    for (int i = 0; i < d; ++i) expect -= 2 * inner_product(wp[i], wq[i]);
    EXPECT_NEAR(a, expect, 1e-12 * std::abs(a));
    EXPECT_LE(tensor_inner(cross_derivative_apply(p), p), 0.0);
  }
}

TEST(TensorNorms, FrobeniusWeighting) {
  const Mesh m = build_mesh(3, 5, 1.0);
  const QTensorField p = random_tensor(m, 41, 1.0, false), q = random_tensor(m, 42, 1.0, false);
  double ref = 0;
  for_each_interior(m, [&](std::size_t n, int, int, int) {
    const auto a = p.node_matrix(n), b = q.node_matrix(n);
    for (int e = 0; e < 9; ++e) ref += a[e] * b[e];
  });
  ref *= m.h * m.h * m.h;
  EXPECT_NEAR(tensor_inner(p, q), ref, 1e-13 * std::abs(ref));
  double g = 0;
  for (int c = 0; c < p.component_count(); ++c)
    g += QTensorField::frobenius_weight(3, c) * grad_norm_sq(p.component(c));
  EXPECT_NEAR(tensor_grad_norm_sq(p), g, 1e-13 * g);
}
