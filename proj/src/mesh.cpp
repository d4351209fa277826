#include "qtflow/mesh.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qtflow {

std::size_t Mesh::node_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(intervals + 1);
  return n;
}

std::size_t Mesh::interior_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(intervals - 1);
  return n;
}

double Mesh::cell_volume() const { return dim == 3 ? h * h * h : h * h; }

std::size_t Mesh::stride(int axis) const {
  const auto n = static_cast<std::size_t>(intervals + 1);
  switch (axis) {
    case 0: return 1;
    case 1: return n;
    default: return n * n;
  }
}

Mesh build_mesh(int dim, int intervals, double length) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("mesh dimension must be 2 or 3, got " + std::to_string(dim));
  if (intervals < 4)
    throw std::invalid_argument("mesh needs at least 4 intervals per axis, got " + std::to_string(intervals));
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("domain length must be positive");
  return Mesh{dim, intervals, length / intervals, length};
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const Mesh& mesh) : mesh_(mesh), values_(mesh.node_count(), 0.0) {}

namespace {

template <class F>
void for_each_boundary(const Mesh& mesh, F&& f) {
  const int m = mesh.intervals;
  const int k_hi = mesh.dim == 3 ? m : 0;
  for (int k = 0; k <= k_hi; ++k)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const bool edge = i == 0 || i == m || j == 0 || j == m ||
                          (mesh.dim == 3 && (k == 0 || k == m));
        if (edge) f(mesh.index(i, j, k));
      }
}

}  // namespace

void ScalarField::zero_boundary() {
  for_each_boundary(mesh_, [&](std::size_t idx) { values_[idx] = 0.0; });
}

bool ScalarField::boundary_is_zero() const {
  bool ok = true;
  for_each_boundary(mesh_, [&](std::size_t idx) { ok = ok && values_[idx] == 0.0; });
  return ok;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  assert(other.values_.size() == values_.size());
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other.values_[n];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  assert(other.values_.size() == values_.size());
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other.values_[n];
  return *this;
}

ScalarField& ScalarField::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

// ---------------------------------------------------------------------------

QTensorField::QTensorField(const Mesh& mesh)
    : mesh_(mesh), components_(static_cast<std::size_t>(component_count(mesh.dim)), ScalarField(mesh)) {}

int QTensorField::component_index(int dim, int i, int j) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle: row i starts after i*dim - i*(i-1)/2 entries.
  return i * dim - i * (i - 1) / 2 + (j - i);
}

std::pair<int, int> QTensorField::component_ij(int dim, int c) {
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      if (component_index(dim, i, j) == c) return {i, j};
  throw std::out_of_range("tensor component index out of range");
}

double QTensorField::frobenius_weight(int dim, int c) {
  const auto [i, j] = component_ij(dim, c);
  return i == j ? 1.0 : 2.0;
}

std::array<double, 9> QTensorField::node_matrix(std::size_t flat) const {
  std::array<double, 9> m{};
  const int d = dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[3 * i + j] = components_[component_index(d, i, j)][flat];
  return m;
}

void QTensorField::set_node_matrix(std::size_t flat, const std::array<double, 9>& m) {
  const int d = dim();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) components_[component_index(d, i, j)][flat] = m[3 * i + j];
}

double QTensorField::node_trace(std::size_t flat) const {
  double tr = 0.0;
  for (int i = 0; i < dim(); ++i) tr += (*this)(i, i)[flat];
  return tr;
}

void QTensorField::zero_boundary() {
  for (auto& c : components_) c.zero_boundary();
}

bool QTensorField::boundary_is_zero() const {
  for (const auto& c : components_)
    if (!c.boundary_is_zero()) return false;
  return true;
}

QTensorField& QTensorField::operator+=(const QTensorField& other) {
  for (std::size_t c = 0; c < components_.size(); ++c) components_[c] += other.components_[c];
  return *this;
}

QTensorField& QTensorField::operator-=(const QTensorField& other) {
  for (std::size_t c = 0; c < components_.size(); ++c) components_[c] -= other.components_[c];
  return *this;
}

QTensorField& QTensorField::operator*=(double factor) {
  for (auto& c : components_) c *= factor;
  return *this;
}

QTensorField& QTensorField::add_scaled(double factor, const QTensorField& other) {
  for (std::size_t c = 0; c < components_.size(); ++c) {
    auto dst = components_[c].values();
    auto src = other.components_[c].values();
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += factor * src[n];
  }
  return *this;
}

QTensorField operator+(QTensorField lhs, const QTensorField& rhs) { return lhs += rhs; }
QTensorField operator-(QTensorField lhs, const QTensorField& rhs) { return lhs -= rhs; }
QTensorField operator*(double factor, QTensorField field) { return field *= factor; }

}  // namespace qtflow
