#pragma once

#include <array>

#include "qtflow/mesh.hpp"

namespace qtflow {

/// Landau-de Gennes model constants plus the scheme constants that travel
/// with them.
struct ModelParams {
  double a = 0.0;
  double b = 0.0;       // >= 0
  double c = 1.0;       // > 0
  double L1 = 1.0;      // > 0
  double L2 = 0.0;
  double L3 = 0.0;
  double kappa = 0.0;   // stabilisation, >= 0
  double c_star = 1.0;  // lower bound constant C* of the bulk energy
  double eta = 0.0;     // MBP radius; 0 means "not set"

  double L23() const { return 0.5 * (L2 + L3); }
  /// Effective diffusion L1 + (L2+L3)/2 of the scalar-Laplacian schemes.
  double L_eff() const { return L1 + L23(); }
};

/// Throws std::invalid_argument unless c > 0, L1 > 0, b >= 0, kappa >= 0.
void validate(const ModelParams& p);

/// Nodewise bulk force
///   f(Q) = -a Q + b (Q^2 - tr(Q^2) I / d) - c tr(Q^2) Q.
QTensorField bulk_force(const QTensorField& q, const ModelParams& p);

/// Bulk force of a single node value (3x3 row-major buffer; d = 2 uses the
/// upper-left block).
std::array<double, 9> bulk_force_node(const std::array<double, 9>& q, int dim, const ModelParams& p);

/// h^d * sum_interior [(a/2) tr Q^2 - (b/3) tr Q^3 + (c/4) (tr Q^2)^2].
double bulk_energy(const QTensorField& q, const ModelParams& p);
double bulk_density(const std::array<double, 9>& q, int dim, const ModelParams& p);

/// (L1/2) sum_ij |grad Q^ij|^2 + ((L2+L3)/2) sum_i |sum_k D^c_k Q^ik|^2.
double elastic_energy(const QTensorField& q, const ModelParams& p);

/// Modified energy E_h[Q, s] = elastic_energy(Q) + s.
double total_energy(const QTensorField& q, double s, const ModelParams& p);

/// max over nodes of the full d x d Frobenius norm.
double frobenius_sup_norm(const QTensorField& q);

/// Smallest radius of the invariant Frobenius ball (MBP bound) for a
/// dimension and initial sup-norm.
double eta_bound(const ModelParams& p, double q0_sup, int dim);

/// Scalar majorant fbar(xi) = -a xi + (b/sqrt6) xi^2 - c xi^3 and its slope.
double fbar(double xi, const ModelParams& p);
double fbar_prime(double xi, const ModelParams& p);

/// Smallest stabilisation constant that makes the first-order MBP scheme
/// preserve the eta-ball:
///   max{ a + c eta^2, max_{[0, eta]} |fbar'| }.
/// The inner maximum is taken over {0, eta, vertex of fbar'} in closed form.
double kappa_min(const ModelParams& p, double eta);

/// Lower-bound constant -|Omega| min_{[0, eta]} [(a/2)x^2 - (b/(3 sqrt6))x^3 + (c/4)x^4],
/// minimised exactly over the endpoints and the real critical points.
double default_c_star(const ModelParams& p, double eta, double domain_volume);

// ---------------------------------------------------------------------------
// Spectral diagnostics

/// Ascending eigenvalues of a symmetric matrix (3x3 row-major; d = 2 uses
/// the leading block and returns two values, third entry unused).
/// 2x2 in closed form, 3x3 by cyclic Jacobi to 1e-12 off-diagonal norm.
std::array<double, 3> symmetric_eigenvalues(const std::array<double, 9>& m, int dim);

/// Unit eigenvector of the largest eigenvalue, sign fixed so the entry of
/// largest magnitude is positive. Third entry is 0 in 2D.
std::array<double, 3> dominant_eigenvector(const std::array<double, 9>& m, int dim);

/// Difference between the two largest eigenvalues of Q + shift*I per node.
/// Zero marks a defect.
ScalarField eigen_gap_field(const QTensorField& q, double shift);

}  // namespace qtflow
