#include "qtflow/grid_ops.hpp"

#include <cassert>
#include <stdexcept>

namespace qtflow {

ScalarField laplacian_apply(const ScalarField& u) {
  const Mesh& mesh = u.mesh();
  ScalarField out(mesh);
  const double inv_h2 = 1.0 / (mesh.h * mesh.h);
  const std::size_t sy = mesh.stride(1);
  const std::size_t sz = mesh.stride(2);
  auto in = u.values();
  auto res = out.values();
  if (mesh.dim == 2) {
    for_each_interior(mesh, [&](std::size_t n, int, int, int) {
      res[n] = (in[n - 1] + in[n + 1] + in[n - sy] + in[n + sy] - 4.0 * in[n]) * inv_h2;
    });
  } else {
    for_each_interior(mesh, [&](std::size_t n, int, int, int) {
      res[n] = (in[n - 1] + in[n + 1] + in[n - sy] + in[n + sy] + in[n - sz] + in[n + sz] - 6.0 * in[n]) *
               inv_h2;
    });
  }
  return out;
}

ScalarField central_difference(const ScalarField& u, int axis) {
  const Mesh& mesh = u.mesh();
  if (axis < 0 || axis >= mesh.dim) throw std::out_of_range("difference axis out of range");
  ScalarField out(mesh);
  const double scale = 0.5 / mesh.h;
  const std::size_t s = mesh.stride(axis);
  auto in = u.values();
  auto res = out.values();
  for_each_interior(mesh, [&](std::size_t n, int, int, int) { res[n] = (in[n + s] - in[n - s]) * scale; });
  return out;
}

std::vector<ScalarField> tensor_divergence(const QTensorField& q) {
  const int d = q.dim();
  std::vector<ScalarField> w;
  w.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    ScalarField wi(q.mesh());
    for (int k = 0; k < d; ++k) wi += central_difference(q(i, k), k);
    w.push_back(std::move(wi));
  }
  return w;
}

QTensorField cross_derivative_apply(const QTensorField& q) {
  const int d = q.dim();
  const auto w = tensor_divergence(q);

  // dw[i][j] = D^c_j w_i
  std::vector<std::vector<ScalarField>> dw(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) dw[i].push_back(central_difference(w[i], j));

  ScalarField trace_part(q.mesh());
  for (int l = 0; l < d; ++l) trace_part += dw[l][l];
  trace_part *= 2.0 / d;

  QTensorField out(q.mesh());
  for (int c = 0; c < out.component_count(); ++c) {
    const auto [i, j] = QTensorField::component_ij(d, c);
    ScalarField& o = out.component(c);
    o += dw[i][j];
    o += dw[j][i];
    if (i == j) o -= trace_part;
  }
  return out;
}

double inner_product(const ScalarField& u, const ScalarField& v) {
  assert(u.mesh() == v.mesh());
  if (!(u.mesh() == v.mesh())) throw std::invalid_argument("inner_product: mesh mismatch");
  auto a = u.values();
  auto b = v.values();
  double sum = 0.0;
  for_each_interior(u.mesh(), [&](std::size_t n, int, int, int) { sum += a[n] * b[n]; });
  return sum * u.mesh().cell_volume();
}

double norm_sq(const ScalarField& u) { return inner_product(u, u); }

double grad_inner(const ScalarField& u, const ScalarField& v) {
  if (!(u.mesh() == v.mesh())) throw std::invalid_argument("grad_inner: mesh mismatch");
  const Mesh& mesh = u.mesh();
  const int m = mesh.intervals;
  const double inv_h = 1.0 / mesh.h;
  auto a = u.values();
  auto b = v.values();

  // Edge product (D+_k u)(D+_k v) at the edge p+1/2 behind node `n` along
  // `axis`; ghost nodes and ghost edges read as zero.
  auto edge = [&](std::size_t n, int p, std::size_t s) {
    if (p < 0 || p >= m) return 0.0;
    return (a[n + s] - a[n]) * inv_h * ((b[n + s] - b[n]) * inv_h);
  };

  double total = 0.0;
  for (int axis = 0; axis < mesh.dim; ++axis) {
    const std::size_t s = mesh.stride(axis);
    // Node positions 0..M along `axis`, interior along the others.
    const int k_lo = mesh.dim == 3 ? (axis == 2 ? 0 : 1) : 0;
    const int k_hi = mesh.dim == 3 ? (axis == 2 ? m : m - 1) : 0;
    const int j_lo = axis == 1 ? 0 : 1, j_hi = axis == 1 ? m : m - 1;
    const int i_lo = axis == 0 ? 0 : 1, i_hi = axis == 0 ? m : m - 1;
    double sum = 0.0;
    for (int k = k_lo; k <= k_hi; ++k)
      for (int j = j_lo; j <= j_hi; ++j)
        for (int i = i_lo; i <= i_hi; ++i) {
          const std::size_t n = mesh.index(i, j, k);
          const int p = axis == 0 ? i : (axis == 1 ? j : k);
          const double ahead = edge(n, p, s);
          const double behind = p >= 1 ? edge(n - s, p - 1, s) : 0.0;
          sum += 0.5 * (ahead + behind);
        }
    total += sum;
  }
  return total * mesh.cell_volume();
}

double grad_norm_sq(const ScalarField& u) { return grad_inner(u, u); }

double grad_norm_sq_edges(const ScalarField& u) {
  const Mesh& mesh = u.mesh();
  const int m = mesh.intervals;
  auto a = u.values();
  double sum = 0.0;
  for (int axis = 0; axis < mesh.dim; ++axis) {
    const std::size_t s = mesh.stride(axis);
    const int k_hi = mesh.dim == 3 ? m - 1 : 0;
    const int k_lo = mesh.dim == 3 ? (axis == 2 ? 0 : 1) : 0;
    for (int k = k_lo; k <= k_hi; ++k)
      for (int j = axis == 1 ? 0 : 1; j <= m - 1; ++j)
        for (int i = axis == 0 ? 0 : 1; i <= m - 1; ++i) {
          const std::size_t n = mesh.index(i, j, k);
          const double g = a[n + s] - a[n];
          sum += g * g;
        }
  }
  return sum * mesh.cell_volume() / (mesh.h * mesh.h);
}

double tensor_inner(const QTensorField& p, const QTensorField& q) {
  double sum = 0.0;
  for (int c = 0; c < p.component_count(); ++c)
    sum += QTensorField::frobenius_weight(p.dim(), c) * inner_product(p.component(c), q.component(c));
  return sum;
}

double tensor_norm_sq(const QTensorField& q) { return tensor_inner(q, q); }

double tensor_grad_norm_sq(const QTensorField& q) {
  double sum = 0.0;
  for (int c = 0; c < q.component_count(); ++c)
    sum += QTensorField::frobenius_weight(q.dim(), c) * grad_norm_sq(q.component(c));
  return sum;
}

}  // namespace qtflow
