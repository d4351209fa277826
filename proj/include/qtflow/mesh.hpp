#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qtflow {

/// Uniform Cartesian mesh on [0, length]^dim with M intervals per axis.
///
/// Nodes carry indices 0..M on every axis; indices 0 and M are Dirichlet
/// boundary nodes. Storage is x-fastest: flat = i + n*(j + n*k), n = M+1.
/// In 2D the k index is always 0.
struct Mesh {
  int dim = 2;
  int intervals = 0;
  double h = 0.0;
  double length = 0.0;

  int nodes_per_axis() const { return intervals + 1; }
  std::size_t node_count() const;
  std::size_t interior_count() const;
  double cell_volume() const;

  std::size_t index(int i, int j, int k = 0) const {
    const auto n = static_cast<std::size_t>(intervals + 1);
    return static_cast<std::size_t>(i) + n * (static_cast<std::size_t>(j) + n * static_cast<std::size_t>(k));
  }
  /// Flat-index offset of a unit step along `axis`.
  std::size_t stride(int axis) const;

  friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// Validating constructor: dim in {2,3}, M >= 4, length > 0.
Mesh build_mesh(int dim, int intervals, double length);

/// Calls f(flat, i, j, k) for every interior node (indices 1..M-1 per axis),
/// in storage order.
template <class F>
void for_each_interior(const Mesh& mesh, F&& f) {
  const int m = mesh.intervals;
  const int k_lo = mesh.dim == 3 ? 1 : 0;
  const int k_hi = mesh.dim == 3 ? m - 1 : 0;
  for (int k = k_lo; k <= k_hi; ++k)
    for (int j = 1; j < m; ++j) {
      std::size_t flat = mesh.index(1, j, k);
      for (int i = 1; i < m; ++i, ++flat) f(flat, i, j, k);
    }
}

/// Grid function over all nodes of a mesh. Members of the homogeneous
/// Dirichlet space keep their boundary nodes at exactly zero.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Mesh& mesh);

  const Mesh& mesh() const { return mesh_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator()(int i, int j, int k = 0) { return values_[mesh_.index(i, j, k)]; }
  double operator()(int i, int j, int k = 0) const { return values_[mesh_.index(i, j, k)]; }

  void zero_boundary();
  bool boundary_is_zero() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor);

 private:
  Mesh mesh_;
  std::vector<double> values_;
};

/// Symmetric d x d tensor per node, stored as the d(d+1)/2 upper-triangle
/// components (diagonal included). The trace is not eliminated from storage,
/// so trace preservation by the integrators stays observable.
///
/// Component order: 2D (00, 01, 11); 3D (00, 01, 02, 11, 12, 22).
class QTensorField {
 public:
  QTensorField() = default;
  explicit QTensorField(const Mesh& mesh);

  const Mesh& mesh() const { return mesh_; }
  int dim() const { return mesh_.dim; }
  int component_count() const { return static_cast<int>(components_.size()); }

  static int component_count(int dim) { return dim * (dim + 1) / 2; }
  static int component_index(int dim, int i, int j);
  static std::pair<int, int> component_ij(int dim, int c);
  /// Multiplicity of a unique component in the full d x d matrix (1 or 2).
  static double frobenius_weight(int dim, int c);

  ScalarField& component(int c) { return components_[c]; }
  const ScalarField& component(int c) const { return components_[c]; }
  ScalarField& operator()(int i, int j) { return components_[component_index(dim(), i, j)]; }
  const ScalarField& operator()(int i, int j) const { return components_[component_index(dim(), i, j)]; }

  std::span<ScalarField> components() { return components_; }
  std::span<const ScalarField> components() const { return components_; }

  /// Full d x d node value (row-major, 3x3 buffer; unused entries zero in 2D).
  std::array<double, 9> node_matrix(std::size_t flat) const;
  void set_node_matrix(std::size_t flat, const std::array<double, 9>& m);
  double node_trace(std::size_t flat) const;

  void zero_boundary();
  bool boundary_is_zero() const;

  QTensorField& operator+=(const QTensorField& other);
  QTensorField& operator-=(const QTensorField& other);
  QTensorField& operator*=(double factor);
  /// this += factor * other
  QTensorField& add_scaled(double factor, const QTensorField& other);

 private:
  Mesh mesh_;
  std::vector<ScalarField> components_;
};

QTensorField operator+(QTensorField lhs, const QTensorField& rhs);
QTensorField operator-(QTensorField lhs, const QTensorField& rhs);
QTensorField operator*(double factor, QTensorField field);

}  // namespace qtflow
