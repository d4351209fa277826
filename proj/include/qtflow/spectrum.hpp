#pragma once

#include <memory>
#include <span>
#include <vector>

#include "qtflow/mesh.hpp"

namespace qtflow {

/// Eigenvalues of the 1D Dirichlet Laplacian on M intervals:
///   lambda_k = -(4/h^2) sin^2(k pi / (2M)),  k = 1..M-1.
std::vector<double> axis_eigenvalues(int intervals, double h);

/// Spectrum of the discrete Dirichlet Laplacian. The d-dimensional
/// eigenvalue for mode (k1, .., kd) is the sum of the axis eigenvalues.
struct DirichletSpectrum {
  Mesh mesh;
  std::vector<double> eigenvalues;  // length M-1, indexed k-1

  /// Kronecker-sum eigenvalues in interior-packed order (x fastest).
  std::vector<double> kronecker_eigenvalues() const;
};

DirichletSpectrum dirichlet_spectrum(const Mesh& mesh);

/// Orthonormal type-I discrete sine transform over the interior nodes of a
/// mesh, applied along every axis.
///
/// Normalisation: each axis carries the factor sqrt(2/M), so the transform
/// is orthogonal and its own inverse; forward(inverse(u)) == u without any
/// external scaling. Arrays are interior-packed: (M-1)^d values, x fastest.
///
/// The FFTW plan is built once and is immutable afterwards, so one instance
/// may be shared between threads.
class SineTransform {
 public:
  explicit SineTransform(const Mesh& mesh);
  ~SineTransform();
  SineTransform(SineTransform&&) noexcept;
  SineTransform& operator=(SineTransform&&) noexcept;
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  const Mesh& mesh() const { return mesh_; }
  std::size_t size() const { return mesh_.interior_count(); }

  void forward(std::span<const double> in, std::span<double> out) const;
  void inverse(std::span<const double> in, std::span<double> out) const { forward(in, out); }

  /// Unnormalised transform (FFTW RODFT00 along every axis).
  void raw(std::span<const double> in, std::span<double> out) const;
  double normalization() const { return scale_; }

 private:
  struct Plan;
  Mesh mesh_;
  double scale_ = 1.0;
  std::unique_ptr<Plan> plan_;
};

/// Copy interior nodes into a packed array and back.
void gather_interior(const ScalarField& u, std::span<double> packed);
void scatter_interior(std::span<const double> packed, ScalarField& u);

}  // namespace qtflow
