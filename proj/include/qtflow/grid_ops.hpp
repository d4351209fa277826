#pragma once

#include <vector>

#include "qtflow/mesh.hpp"

namespace qtflow {

// Finite-difference operators on the homogeneous Dirichlet space. Ghost
// nodes (indices -1 and M+1) read as zero and every operator output has
// zero boundary nodes, so outputs stay in the Dirichlet space.

/// Standard (2d+1)-point discrete Laplacian, D^-_k D^+_k summed over axes.
ScalarField laplacian_apply(const ScalarField& u);

/// Centred difference (u[p+1] - u[p-1]) / 2h along `axis`.
ScalarField central_difference(const ScalarField& u, int axis);

/// Row divergences w_i = sum_k D^c_k Q^{ik}, one field per row i.
std::vector<ScalarField> tensor_divergence(const QTensorField& q);

/// Cross-derivative operator of the L2+L3 elastic term:
///   sum_k (D^c_jk Q^{ik} + D^c_ik Q^{jk}) - (2/d) delta_ij sum_kl D^c_lk Q^{lk}.
/// Uses D^c_jk = D^c_j D^c_k with the intermediate restricted to the
/// Dirichlet space, which keeps <D^c_kl U, V> = -<D^c_l U, D^c_k V> exact.
/// Symmetric input is guaranteed by storage; the output is trace free.
QTensorField cross_derivative_apply(const QTensorField& q);

/// h^d * sum over interior nodes of u*v.
double inner_product(const ScalarField& u, const ScalarField& v);
double norm_sq(const ScalarField& u);

/// [grad u, grad v]_h built from the node averages a_k of edge products.
/// The averages are summed over all node positions 0..M along axis k, so
/// every interior edge carries unit weight and summation by parts holds.
double grad_inner(const ScalarField& u, const ScalarField& v);
double grad_norm_sq(const ScalarField& u);

/// Same quantity as grad_norm_sq, evaluated as a plain sum over edges.
double grad_norm_sq_edges(const ScalarField& u);

/// Frobenius-weighted tensor versions: sum over all d*d entries.
double tensor_inner(const QTensorField& p, const QTensorField& q);
double tensor_norm_sq(const QTensorField& q);
double tensor_grad_norm_sq(const QTensorField& q);

}  // namespace qtflow
