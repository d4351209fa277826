#pragma once

// Independent reference constructions for the unit tests: Kronecker-product
// difference matrices on the interior nodes and random field generators.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

#include "qtflow/mesh.hpp"

namespace qtflow::testing {

inline std::mt19937_64& rng(std::uint64_t seed) {
  static thread_local std::mt19937_64 gen;
  gen.seed(seed);
  return gen;
}

inline ScalarField random_scalar(const Mesh& mesh, std::uint64_t seed, double amp = 1.0) {
  auto& gen = rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  ScalarField u(mesh);
  for_each_interior(mesh, [&](std::size_t n, int, int, int) { u[n] = dist(gen); });
  return u;
}

/// Symmetric, trace-free when trace_free is set; boundary zero.
inline QTensorField random_tensor(const Mesh& mesh, std::uint64_t seed, double amp = 1.0, bool trace_free = true) {
  auto& gen = rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  QTensorField q(mesh);
  const int d = mesh.dim;
  for_each_interior(mesh, [&](std::size_t n, int, int, int) {
    std::array<double, 9> m{};
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) m[3 * i + j] = m[3 * j + i] = dist(gen);
    if (trace_free) {
      double tr = 0;
      for (int i = 0; i < d; ++i) tr += m[4 * i];
      for (int i = 0; i < d; ++i) m[4 * i] -= tr / d;
    }
    q.set_node_matrix(n, m);
  });
  return q;
}

inline Eigen::VectorXd interior_vector(const ScalarField& u) {
  const Mesh& mesh = u.mesh();
  Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.interior_count()));
  Eigen::Index p = 0;
  for_each_interior(mesh, [&](std::size_t n, int, int, int) { v(p++) = u[n]; });
  return v;
}

inline ScalarField from_interior(const Eigen::VectorXd& v, const Mesh& mesh) {
  ScalarField u(mesh);
  Eigen::Index p = 0;
  for_each_interior(mesh, [&](std::size_t n, int, int, int) { u[n] = v(p++); });
  return u;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// 1D second difference on M-1 interior nodes with zero ghosts.
inline Eigen::MatrixXd second_difference_1d(int m, double h) {
  const int n = m - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = -2.0 / (h * h);
    if (i > 0) a(i, i - 1) = 1.0 / (h * h);
    if (i + 1 < n) a(i, i + 1) = 1.0 / (h * h);
  }
  return a;
}

/// 1D centred difference with zero ghosts.
inline Eigen::MatrixXd centred_difference_1d(int m, double h) {
  const int n = m - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (i > 0) a(i, i - 1) = -0.5 / h;
    if (i + 1 < n) a(i, i + 1) = 0.5 / h;
  }
  return a;
}

/// Lifts a 1D interior operator to `axis` of the mesh (x fastest ordering).
inline Eigen::MatrixXd along_axis(const Eigen::MatrixXd& a1, const Mesh& mesh, int axis) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(mesh.intervals - 1, mesh.intervals - 1);
  if (mesh.dim == 2) return axis == 0 ? kron(id, a1) : kron(a1, id);
  if (axis == 0) return kron(id, kron(id, a1));
  if (axis == 1) return kron(id, kron(a1, id));
  return kron(a1, kron(id, id));
}

inline Eigen::MatrixXd laplacian_matrix(const Mesh& mesh) {
  const Eigen::MatrixXd a1 = second_difference_1d(mesh.intervals, mesh.h);
  Eigen::MatrixXd out = along_axis(a1, mesh, 0);
  for (int k = 1; k < mesh.dim; ++k) out += along_axis(a1, mesh, k);
  return out;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0;
  for (std::size_t n = 0; n < a.values().size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

inline double max_abs_diff(const QTensorField& a, const QTensorField& b) {
  double m = 0;
  for (int c = 0; c < a.component_count(); ++c) m = std::max(m, max_abs_diff(a.component(c), b.component(c)));
  return m;
}

inline double max_abs(const QTensorField& a) {
  double m = 0;
  for (int c = 0; c < a.component_count(); ++c)
    for (double v : a.component(c).values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace qtflow::testing
