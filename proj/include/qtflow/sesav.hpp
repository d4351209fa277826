#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "qtflow/linsolve.hpp"
#include "qtflow/mesh.hpp"
#include "qtflow/qtensor.hpp"

namespace qtflow {

/// The evolving unknown: tensor field, auxiliary scalar s and time.
struct SavState {
  QTensorField Q;
  double s = 0.0;
  double t = 0.0;
};

struct StepReport {
  SavState state;
  double tau_used = 0.0;
  double energy = 0.0;    // modified energy E_h[Q, s] of `state`
  double sup_norm = 0.0;  // Frobenius sup-norm of state.Q
  double g_value = 0.0;   // g used by the (corrector) step
  bool clamped = false;   // s was lifted to the -C* - E_el floor
};

enum class Scheme { sesav1, sesav2, mbp_sesav1, mbp_sesav2 };

std::string_view to_string(Scheme scheme);
/// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(std::string_view name);
inline bool is_mbp(Scheme s) { return s == Scheme::mbp_sesav1 || s == Scheme::mbp_sesav2; }

enum class LinearBackend { fast, dense_oracle };

struct IntegratorOptions {
  double cg_tol = 1e-10;
  int cg_max_iter = 0;  // <= 0: 10 * sqrt(unknowns)
  LinearBackend backend = LinearBackend::fast;
};

/// g(Q, s) left the representable range (|s - E_1h[Q]| > 700).
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// g = exp(s - E_1h[Q]), evaluated as a single exponential.
double g_value(const QTensorField& q, double s, const ModelParams& p);

/// State at t = 0 with s = E_1h[Q0].
SavState initial_state(QTensorField q0, const ModelParams& p);

/// Throws std::invalid_argument unless (d = 2 and b = 0) or (d = 3 and
/// L2 + L3 = 0).
void require_mbp_regime(const ModelParams& p, int dim);

/// Linear stabilised ESAV integrators of first and second order.
///
/// sesav1/sesav2 keep the full elastic operator L1 Delta_h + L23 Dc_h and
/// solve the coupled system by preconditioned CG. The mbp_* variants use the
/// scalar operator L Delta_h with L = L1 + L23, solved per component by DST;
/// their modified energy uses the same effective operator, i.e. elastic part
/// (L/2) |grad Q|^2.
///
/// An Integrator is immutable after construction; all step functions are
/// const and take the state by reference, returning a fresh state.
class Integrator {
 public:
  Integrator(const Mesh& mesh, const ModelParams& params, IntegratorOptions options = {});

  const Mesh& mesh() const { return mesh_; }
  const ModelParams& params() const { return params_; }
  const IntegratorOptions& options() const { return options_; }

  StepReport sesav1_step(const SavState& state, double tau) const;
  StepReport sesav2_step(const SavState& state, double tau) const;
  StepReport mbp_sesav1_step(const SavState& state, double tau) const;
  StepReport mbp_sesav2_step(const SavState& state, double tau) const;
  StepReport step(Scheme scheme, const SavState& state, double tau) const;

  /// Parameters whose elastic energy matches the scheme's operator.
  ModelParams energy_params(Scheme scheme) const;
  double energy(Scheme scheme, const SavState& state) const;

 private:
  StepReport first_order(const SavState& state, double tau, const ModelParams& p, bool scalar) const;
  StepReport second_order(const SavState& state, double tau, const ModelParams& p, bool scalar) const;
  QTensorField solve(double alpha, const ModelParams& p, bool scalar, const QTensorField& rhs) const;
  StepReport finish(QTensorField q1, double s_tilde, double t, double tau, double g, const ModelParams& p) const;

  Mesh mesh_;
  ModelParams params_;
  IntegratorOptions options_;
  HelmholtzSolver helmholtz_;
};

/// Upper bound G* = exp(E_h[Q0, s0] + C*) on g along any trajectory.
double g_star_upper(double initial_energy, double c_star);

/// Largest step for which the second-order MBP scheme keeps the bound:
///   (kappa G*/2 + 2^(d-1) L / h^2)^-1, L = L1 + (L2+L3)/2.
double mbp_tau_max(const ModelParams& p, double h, int d, double g_star);

/// Energy-driven step-size controller
///   tau_next = max{tau_min, tau_max / sqrt(1 + alpha (dE/dt)^2)}.
struct AdaptiveController {
  double tau_min = 5e-4;
  double tau_max = 5e-2;
  double alpha = 1e5;
  double prev_energy = 0.0;
};

/// Returns the next step size and stores energy_now as prev_energy.
double adaptive_tau(AdaptiveController& controller, double energy_now, double tau_prev);

}  // namespace qtflow
