#include "qtflow/dense_oracle.hpp"

#include <stdexcept>
#include <string>

#include "qtflow/spectrum.hpp"

namespace qtflow {

namespace {

void check_size(std::size_t n) {
  if (n > kDenseOracleMaxUnknowns)
    throw std::invalid_argument("dense oracle limited to " + std::to_string(kDenseOracleMaxUnknowns) +
                                " unknowns, got " + std::to_string(n));
}

template <class Field, class Op, class Unflatten>
Eigen::MatrixXd assemble_columns(const Op& op, std::size_t n, Unflatten&& unflat) {
  check_size(n);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> unit(n, 0.0);
  for (std::size_t col = 0; col < n; ++col) {
    unit[col] = 1.0;
    const Field image = apply(op, unflat(unit));
    const std::vector<double> flat = flatten(image);
    for (std::size_t row = 0; row < n; ++row)
      a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = flat[row];
    unit[col] = 0.0;
  }
  return a;
}

std::vector<double> lu_solve(const Eigen::MatrixXd& a, std::span<const double> rhs) {
  if (static_cast<std::size_t>(a.rows()) != rhs.size()) throw std::invalid_argument("dense oracle: rhs size mismatch");
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const Eigen::VectorXd x = a.partialPivLu().solve(b);
  return {x.data(), x.data() + x.size()};
}

}  // namespace

std::vector<double> flatten(const ScalarField& u) {
  std::vector<double> v(u.mesh().interior_count());
  gather_interior(u, v);
  return v;
}

std::vector<double> flatten(const QTensorField& q) {
  const std::size_t block = q.mesh().interior_count();
  std::vector<double> v(block * static_cast<std::size_t>(q.component_count()));
  for (int c = 0; c < q.component_count(); ++c)
    gather_interior(q.component(c), std::span<double>(v).subspan(block * static_cast<std::size_t>(c), block));
  return v;
}

ScalarField unflatten_scalar(std::span<const double> v, const Mesh& mesh) {
  if (v.size() != mesh.interior_count()) throw std::invalid_argument("unflatten_scalar: size mismatch");
  ScalarField u(mesh);
  scatter_interior(v, u);
  return u;
}

QTensorField unflatten_tensor(std::span<const double> v, const Mesh& mesh) {
  QTensorField q(mesh);
  const std::size_t block = mesh.interior_count();
  if (v.size() != block * static_cast<std::size_t>(q.component_count()))
    throw std::invalid_argument("unflatten_tensor: size mismatch");
  for (int c = 0; c < q.component_count(); ++c)
    scatter_interior(v.subspan(block * static_cast<std::size_t>(c), block), q.component(c));
  return q;
}

Eigen::MatrixXd assemble_dense(const HelmholtzOperator& op) {
  return assemble_columns<ScalarField>(op, op.mesh.interior_count(),
                                       [&](std::span<const double> v) { return unflatten_scalar(v, op.mesh); });
}

Eigen::MatrixXd assemble_dense(const CoupledOperator& op) {
  const std::size_t n = op.mesh.interior_count() * static_cast<std::size_t>(QTensorField::component_count(op.mesh.dim));
  return assemble_columns<QTensorField>(op, n,
                                        [&](std::span<const double> v) { return unflatten_tensor(v, op.mesh); });
}

std::vector<double> dense_oracle(const HelmholtzOperator& op, std::span<const double> rhs) {
  check_size(rhs.size());
  return lu_solve(assemble_dense(op), rhs);
}

std::vector<double> dense_oracle(const CoupledOperator& op, std::span<const double> rhs) {
  check_size(rhs.size());
  return lu_solve(assemble_dense(op), rhs);
}

}  // namespace qtflow
