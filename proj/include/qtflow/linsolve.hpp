#pragma once

#include <stdexcept>
#include <string>

#include "qtflow/mesh.hpp"
#include "qtflow/spectrum.hpp"

namespace qtflow {

/// (alpha I - L Delta_h) on the Dirichlet space; alpha > 0 makes it an
/// M-matrix and invertible.
struct HelmholtzOperator {
  double alpha = 1.0;
  double L = 0.0;
  Mesh mesh;
};

/// (alpha I - L1 Delta_h - L23 Dc_h) acting on every tensor component, with
/// Dc_h the cross-derivative operator and L23 = (L2+L3)/2.
struct CoupledOperator {
  double alpha = 1.0;
  double L1 = 0.0;
  double L23 = 0.0;
  Mesh mesh;
};

ScalarField apply(const HelmholtzOperator& op, const ScalarField& u);
QTensorField apply(const CoupledOperator& op, const QTensorField& q);

/// Raised when an iterative solve misses its tolerance within max_iter.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Fast diagonal solver for Helmholtz systems on one mesh: forward DST,
/// pointwise division by (alpha - L * lambda), inverse DST. The transform
/// plan and spectrum are built once; solve() is const and reentrant.
class HelmholtzSolver {
 public:
  explicit HelmholtzSolver(const Mesh& mesh);

  const Mesh& mesh() const { return transform_.mesh(); }
  ScalarField solve(const HelmholtzOperator& op, const ScalarField& rhs) const;
  /// Same operator on every tensor component.
  QTensorField solve(const HelmholtzOperator& op, const QTensorField& rhs) const;

 private:
  SineTransform transform_;
  std::vector<double> lambda_;  // Kronecker eigenvalues, interior-packed
};

/// One-shot convenience: builds a HelmholtzSolver and solves.
ScalarField solve_helmholtz_dst(const HelmholtzOperator& op, const ScalarField& rhs);

struct KrylovResult {
  QTensorField solution;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for the coupled tensor system. The
/// inner product is the full Frobenius one (off-diagonal components count
/// twice), under which the operator is symmetric on trace-free fields. The
/// preconditioner is the exact DST inverse of (alpha I - L1 Delta_h).
///
/// max_iter <= 0 selects 10 * sqrt(unknowns).
KrylovResult solve_coupled_krylov(const CoupledOperator& op, const QTensorField& rhs, const HelmholtzSolver& pre,
                                  double tol = 1e-10, int max_iter = 0);
KrylovResult solve_coupled_krylov(const CoupledOperator& op, const QTensorField& rhs, double tol = 1e-10,
                                  int max_iter = 0);

}  // namespace qtflow
