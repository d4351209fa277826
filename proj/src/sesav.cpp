#include "qtflow/sesav.hpp"

#include <algorithm>
#include <cmath>

#include "qtflow/dense_oracle.hpp"
#include "qtflow/grid_ops.hpp"

namespace qtflow {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::sesav1: return "sesav1";
    case Scheme::sesav2: return "sesav2";
    case Scheme::mbp_sesav1: return "mbp_sesav1";
    case Scheme::mbp_sesav2: return "mbp_sesav2";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::sesav1, Scheme::sesav2, Scheme::mbp_sesav1, Scheme::mbp_sesav2})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected sesav1, sesav2, mbp_sesav1 or mbp_sesav2)");
}

double g_value(const QTensorField& q, double s, const ModelParams& p) {
  const double arg = s - bulk_energy(q, p);
  if (!(std::abs(arg) <= 700.0))
    throw BlowUpError("ESAV exponent s - E_1h[Q] = " + std::to_string(arg) + " outside [-700, 700]");
  return std::exp(arg);
}

SavState initial_state(QTensorField q0, const ModelParams& p) {
  const double s0 = bulk_energy(q0, p);
  return SavState{std::move(q0), s0, 0.0};
}

void require_mbp_regime(const ModelParams& p, int dim) {
  if (dim == 2 && p.b != 0.0)
    throw std::invalid_argument("MBP schemes in 2D require b = 0");
  if (dim == 3 && p.L2 + p.L3 != 0.0)
    throw std::invalid_argument("MBP schemes in 3D require L2 + L3 = 0");
}

// ---------------------------------------------------------------------------

Integrator::Integrator(const Mesh& mesh, const ModelParams& params, IntegratorOptions options)
    : mesh_(mesh), params_(params), options_(options), helmholtz_(mesh) {
  validate(params_);
}

ModelParams Integrator::energy_params(Scheme scheme) const {
  if (!is_mbp(scheme)) return params_;
  ModelParams p = params_;
  p.L1 = params_.L_eff();
  p.L2 = p.L3 = 0.0;
  return p;
}

double Integrator::energy(Scheme scheme, const SavState& state) const {
  return total_energy(state.Q, state.s, energy_params(scheme));
}

QTensorField Integrator::solve(double alpha, const ModelParams& p, bool scalar, const QTensorField& rhs) const {
  if (options_.backend == LinearBackend::dense_oracle) {
    if (scalar) {
      const HelmholtzOperator op{alpha, p.L1, mesh_};
      QTensorField out(mesh_);
      for (int c = 0; c < rhs.component_count(); ++c)
        out.component(c) = unflatten_scalar(dense_oracle(op, flatten(rhs.component(c))), mesh_);
      return out;
    }
    const CoupledOperator op{alpha, p.L1, p.L23(), mesh_};
    return unflatten_tensor(dense_oracle(op, flatten(rhs)), mesh_);
  }
  if (scalar) return helmholtz_.solve(HelmholtzOperator{alpha, p.L1, mesh_}, rhs);
  const CoupledOperator op{alpha, p.L1, p.L23(), mesh_};
  return solve_coupled_krylov(op, rhs, helmholtz_, options_.cg_tol, options_.cg_max_iter).solution;
}

StepReport Integrator::finish(QTensorField q1, double s_tilde, double t, double tau, double g,
                              const ModelParams& p) const {
  const double e_el = elastic_energy(q1, p);
  const double floor = -p.c_star - e_el;
  const bool clamped = s_tilde < floor;
  const double s1 = clamped ? floor : s_tilde;
  StepReport report;
  report.sup_norm = frobenius_sup_norm(q1);
  report.state = SavState{std::move(q1), s1, t + tau};
  report.tau_used = tau;
  report.energy = e_el + s1;
  report.g_value = g;
  report.clamped = clamped;
  return report;
}

StepReport Integrator::first_order(const SavState& state, double tau, const ModelParams& p, bool scalar) const {
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be > 0");
  const double g = g_value(state.Q, state.s, p);
  const QTensorField force = bulk_force(state.Q, p);
  const double alpha = 1.0 / tau + p.kappa * g;

  QTensorField rhs = alpha * state.Q;
  rhs.add_scaled(g, force);
  QTensorField q1 = solve(alpha, p, scalar, rhs);

  const double s_tilde = state.s - g * tensor_inner(force, q1 - state.Q);
  return finish(std::move(q1), s_tilde, state.t, tau, g, p);
}

StepReport Integrator::second_order(const SavState& state, double tau, const ModelParams& p, bool scalar) const {
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be > 0");
  const StepReport half = first_order(state, 0.5 * tau, p, scalar);
  const QTensorField& q_star = half.state.Q;
  const double g = g_value(q_star, half.state.s, p);
  const QTensorField force = bulk_force(q_star, p);
  const double alpha = 2.0 / tau + p.kappa * g;

  // ((2/tau + kappa g) I - A) Q1 = ((2/tau - kappa g) I + A) Q0 + 2 g (f(Q*) + kappa Q*),
  // A = L1 Delta_h + L23 Dc_h (or L Delta_h on the scalar path).
  const double l23 = scalar ? 0.0 : p.L23();
  QTensorField rhs = apply(CoupledOperator{0.0, p.L1, l23, mesh_}, state.Q);
  rhs *= -1.0;
  rhs.add_scaled(2.0 / tau - p.kappa * g, state.Q);
  rhs.add_scaled(2.0 * g, force);
  rhs.add_scaled(2.0 * g * p.kappa, q_star);
  QTensorField q1 = solve(alpha, p, scalar, rhs);

  const QTensorField dq = q1 - state.Q;
  QTensorField mid_minus_star = 0.5 * (q1 + state.Q);
  mid_minus_star -= q_star;
  const double s_tilde =
      state.s - g * tensor_inner(force, dq) + p.kappa * g * tensor_inner(mid_minus_star, dq);
  return finish(std::move(q1), s_tilde, state.t, tau, g, p);
}

StepReport Integrator::sesav1_step(const SavState& state, double tau) const {
  return first_order(state, tau, params_, false);
}

StepReport Integrator::sesav2_step(const SavState& state, double tau) const {
  return second_order(state, tau, params_, false);
}

StepReport Integrator::mbp_sesav1_step(const SavState& state, double tau) const {
  require_mbp_regime(params_, mesh_.dim);
  return first_order(state, tau, energy_params(Scheme::mbp_sesav1), true);
}

StepReport Integrator::mbp_sesav2_step(const SavState& state, double tau) const {
  require_mbp_regime(params_, mesh_.dim);
  return second_order(state, tau, energy_params(Scheme::mbp_sesav2), true);
}

StepReport Integrator::step(Scheme scheme, const SavState& state, double tau) const {
  switch (scheme) {
    case Scheme::sesav1: return sesav1_step(state, tau);
    case Scheme::sesav2: return sesav2_step(state, tau);
    case Scheme::mbp_sesav1: return mbp_sesav1_step(state, tau);
    case Scheme::mbp_sesav2: return mbp_sesav2_step(state, tau);
  }
  throw std::invalid_argument("unknown scheme");
}

// ---------------------------------------------------------------------------

double g_star_upper(double initial_energy, double c_star) { return std::exp(initial_energy + c_star); }

double mbp_tau_max(const ModelParams& p, double h, int d, double g_star) {
  if (!(h > 0.0) || !(g_star > 0.0)) throw std::invalid_argument("mbp_tau_max: need h > 0 and G* > 0");
  const double spatial = std::ldexp(1.0, d - 1) * p.L_eff() / (h * h);
  return 1.0 / (0.5 * p.kappa * g_star + spatial);
}

double adaptive_tau(AdaptiveController& controller, double energy_now, double tau_prev) {
  if (!(tau_prev > 0.0)) throw std::invalid_argument("adaptive_tau: previous step must be > 0");
  const double rate = (energy_now - controller.prev_energy) / tau_prev;
  controller.prev_energy = energy_now;
  return std::max(controller.tau_min, controller.tau_max / std::sqrt(1.0 + controller.alpha * rate * rate));
}

}  // namespace qtflow
