#include "qtflow/linsolve.hpp"

#include <cassert>
#include <cmath>

#include "qtflow/grid_ops.hpp"

namespace qtflow {

ScalarField apply(const HelmholtzOperator& op, const ScalarField& u) {
  ScalarField out = laplacian_apply(u);
  out *= -op.L;
  auto res = out.values();
  auto in = u.values();
  for_each_interior(u.mesh(), [&](std::size_t n, int, int, int) { res[n] += op.alpha * in[n]; });
  return out;
}

QTensorField apply(const CoupledOperator& op, const QTensorField& q) {
  QTensorField out(q.mesh());
  for (int c = 0; c < q.component_count(); ++c) {
    ScalarField lap = laplacian_apply(q.component(c));
    auto res = out.component(c).values();
    auto in = q.component(c).values();
    auto l = lap.values();
    for_each_interior(q.mesh(), [&](std::size_t n, int, int, int) { res[n] = op.alpha * in[n] - op.L1 * l[n]; });
  }
  if (op.L23 != 0.0) out.add_scaled(-op.L23, cross_derivative_apply(q));
  return out;
}

// ---------------------------------------------------------------------------

HelmholtzSolver::HelmholtzSolver(const Mesh& mesh)
    : transform_(mesh), lambda_(dirichlet_spectrum(mesh).kronecker_eigenvalues()) {}

ScalarField HelmholtzSolver::solve(const HelmholtzOperator& op, const ScalarField& rhs) const {
  assert(op.alpha > 0.0);
  std::vector<double> buf(transform_.size());
  gather_interior(rhs, buf);
  transform_.raw(buf, buf);
  // Two raw transforms multiply by (2M)^d; fold that into the divide.
  const double scale = transform_.normalization() * transform_.normalization();
  for (std::size_t n = 0; n < buf.size(); ++n) buf[n] *= scale / (op.alpha - op.L * lambda_[n]);
  transform_.raw(buf, buf);
  ScalarField out(rhs.mesh());
  scatter_interior(buf, out);
  return out;
}

QTensorField HelmholtzSolver::solve(const HelmholtzOperator& op, const QTensorField& rhs) const {
  QTensorField out(rhs.mesh());
  for (int c = 0; c < rhs.component_count(); ++c) out.component(c) = solve(op, rhs.component(c));
  return out;
}

ScalarField solve_helmholtz_dst(const HelmholtzOperator& op, const ScalarField& rhs) {
  return HelmholtzSolver(op.mesh).solve(op, rhs);
}

KrylovResult solve_coupled_krylov(const CoupledOperator& op, const QTensorField& rhs, const HelmholtzSolver& pre,
                                  double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_coupled_krylov: tol must be > 0");
  const Mesh& mesh = rhs.mesh();
  if (max_iter <= 0) {
    const double unknowns = static_cast<double>(mesh.interior_count()) * rhs.component_count();
    max_iter = static_cast<int>(std::ceil(10.0 * std::sqrt(unknowns)));
  }
  const HelmholtzOperator pre_op{op.alpha, op.L1, mesh};

  KrylovResult result{QTensorField(mesh), 0, 0.0};
  const double rhs_norm = std::sqrt(tensor_norm_sq(rhs));
  if (rhs_norm == 0.0) return result;

  QTensorField& x = result.solution;
  QTensorField r = rhs;
  QTensorField z = pre.solve(pre_op, r);
  QTensorField p = z;
  double rz = tensor_inner(r, z);
  double res = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const QTensorField ap = apply(op, p);
    const double pap = tensor_inner(p, ap);
    const double step = rz / pap;
    x.add_scaled(step, p);
    r.add_scaled(-step, ap);
    res = std::sqrt(tensor_norm_sq(r)) / rhs_norm;
    result.iterations = it;
    result.relative_residual = res;
    if (res <= tol) return result;
    z = pre.solve(pre_op, r);
    const double rz_next = tensor_inner(r, z);
    p *= rz_next / rz;
    p += z;
    rz = rz_next;
  }
  throw SolverError("conjugate gradient did not converge: relative residual " + std::to_string(res) + " after " +
                        std::to_string(max_iter) + " iterations",
                    res, max_iter);
}

KrylovResult solve_coupled_krylov(const CoupledOperator& op, const QTensorField& rhs, double tol, int max_iter) {
  return solve_coupled_krylov(op, rhs, HelmholtzSolver(op.mesh), tol, max_iter);
}

}  // namespace qtflow
