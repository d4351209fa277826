#pragma once

// Dense reference solver for small grids. Assembles an operator column by
// column from its matrix-free application to unit basis fields and solves
// with partial-pivot LU. Used as a test oracle for the fast solvers.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "qtflow/linsolve.hpp"

namespace qtflow {

/// Largest system the oracle accepts.
inline constexpr std::size_t kDenseOracleMaxUnknowns = 20000;

// Flattened layouts: scalar fields are interior-packed (x fastest); tensor
// fields concatenate the interior-packed unique components in storage order.
std::vector<double> flatten(const ScalarField& u);
std::vector<double> flatten(const QTensorField& q);
ScalarField unflatten_scalar(std::span<const double> v, const Mesh& mesh);
QTensorField unflatten_tensor(std::span<const double> v, const Mesh& mesh);

Eigen::MatrixXd assemble_dense(const HelmholtzOperator& op);
Eigen::MatrixXd assemble_dense(const CoupledOperator& op);

std::vector<double> dense_oracle(const HelmholtzOperator& op, std::span<const double> rhs);
std::vector<double> dense_oracle(const CoupledOperator& op, std::span<const double> rhs);

}  // namespace qtflow
