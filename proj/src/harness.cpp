#include "qtflow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qtflow/grid_ops.hpp"

namespace qtflow {

namespace {

using std::numbers::pi;

std::vector<Preset> make_presets() {
  std::vector<Preset> out;

  Preset conv;
  conv.name = "convergence2d";
  conv.description = "2D smooth director, convergence tables";
  conv.dim = 2;
  conv.intervals = 128;
  conv.length = 1.0;
  conv.params = ModelParams{.a = -0.25, .b = 1.0, .c = 1.0, .L1 = 1e-3, .kappa = 2.0, .c_star = 1.0};
  conv.scheme = Scheme::sesav2;
  conv.T = 1.0;
  conv.tau = 1.0 / 512.0;
  out.push_back(conv);

  Preset hole;
  hole.name = "hole2d";
  hole.description = "2D disappearing hole";
  hole.dim = 2;
  hole.intervals = 80;
  hole.length = 2.0;
  hole.params = ModelParams{.a = -4.0, .b = 0.0, .c = 4.0, .L1 = 4.5e-3, .kappa = 8.0};
  hole.scheme = Scheme::mbp_sesav2;
  hole.T = 2.0;
  hole.tau = 0.01;
  // Initial sup-norm is 1/sqrt(2) for this director field.
  hole.params.c_star = default_c_star(hole.params, eta_bound(hole.params, std::sqrt(0.5), 2), 4.0);
  out.push_back(hole);

  Preset orient;
  orient.name = "orient3d";
  orient.description = "3D orientation dynamics, adaptive steps";
  orient.dim = 3;
  orient.intervals = 100;
  orient.length = 2.0;
  orient.params = ModelParams{.a = -1.25, .b = 0.25, .c = 1.0, .L1 = 1e-3, .kappa = 6.0};
  orient.scheme = Scheme::mbp_sesav2;
  orient.T = 30.0;
  orient.tau = 5e-4;
  orient.adaptive = true;
  orient.controller = AdaptiveController{.tau_min = 5e-4, .tau_max = 5e-2, .alpha = 1e5};
  // Uniaxial initial data has sup-norm sqrt(2/3).
  orient.params.c_star = default_c_star(orient.params, eta_bound(orient.params, std::sqrt(2.0 / 3.0), 3), 8.0);
  out.push_back(orient);

  return out;
}

bool in_box(double x, double y, double z, const double (&box)[6]) {
  return x >= box[0] && x <= box[1] && y >= box[2] && y <= box[3] && z >= box[4] && z <= box[5];
}

void check_dim(const Preset& p, const Mesh& mesh) {
  if (p.dim != mesh.dim)
    throw std::invalid_argument("preset '" + p.name + "' is " + std::to_string(p.dim) + "D, mesh is " +
                                std::to_string(mesh.dim) + "D");
}

struct Errors {
  double grad = 0.0;
  double l2 = 0.0;
  double s = 0.0;
};

Errors state_errors(const QTensorField& q, double s, const QTensorField& q_ref, double s_ref) {
  const QTensorField e = q - q_ref;
  return {std::sqrt(tensor_grad_norm_sq(e)), std::sqrt(tensor_norm_sq(e)), std::abs(s - s_ref)};
}

int fixed_step_count(double T, double tau) {
  return std::max(1, static_cast<int>(std::ceil(T / tau - 1e-9)));
}

void check_time(const TimeSpec& t) {
  if (!(t.T > 0.0)) throw std::invalid_argument("time horizon T must be > 0");
  if (!(t.tau > 0.0)) throw std::invalid_argument("time step tau must be > 0");
  if (t.adaptive && !(t.controller.tau_min > 0.0 && t.controller.tau_min <= t.controller.tau_max))
    throw std::invalid_argument("adaptive stepping needs 0 < tau_min <= tau_max");
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = make_presets();
  return table;
}

const Preset& find_preset(std::string_view name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset '" + std::string(name) +
                              "' (expected convergence2d, hole2d or orient3d)");
}

QTensorField preset_field(std::string_view name, const Mesh& mesh) {
  const Preset& preset = find_preset(name);
  check_dim(preset, mesh);
  QTensorField q(mesh);
  const double h = mesh.h;

  if (preset.name == "convergence2d") {
    for_each_interior(mesh, [&](std::size_t n, int i, int j, int) {
      const double v = std::sin(2 * pi * i * h) * std::sin(2 * pi * j * h);
      const double n2 = 2 * v * v;
      q.set_node_matrix(n, {v * v - n2 / 2, v * v, 0, v * v, v * v - n2 / 2, 0, 0, 0, 0});
    });
  } else if (preset.name == "hole2d") {
    for_each_interior(mesh, [&](std::size_t n, int i, int j, int) {
      const double x = i * h, y = j * h;
      const double n0 = x * (2 - x) * y * (2 - y) / 16, n1 = std::sin(pi * x) * std::sin(pi * y);
      const double n2 = n0 * n0 + n1 * n1;
      if (n2 == 0.0) return;
      q.set_node_matrix(n, {n0 * n0 / n2 - 0.5, n0 * n1 / n2, 0, n0 * n1 / n2, n1 * n1 / n2 - 0.5, 0, 0, 0, 0});
    });
  } else {
    static const double box_x[6] = {1.15, 1.65, 0.75, 1.25, 0.35, 0.85};
    static const double box_z[6] = {0.35, 0.85, 0.75, 1.25, 1.15, 1.65};
    for_each_interior(mesh, [&](std::size_t n, int i, int j, int k) {
      const double x = i * h, y = j * h, z = k * h;
      int axis = 1;
      if (in_box(x, y, z, box_x)) axis = 0;
      else if (in_box(x, y, z, box_z)) axis = 2;
      std::array<double, 9> m{};
      for (int d = 0; d < 3; ++d) m[4 * d] = -1.0 / 3.0;
      m[4 * axis] += 1.0;
      q.set_node_matrix(n, m);
    });
  }
  return q;
}

SavState preset_initial(std::string_view name, const Mesh& mesh) {
  return initial_state(preset_field(name, mesh), find_preset(name).params);
}

QTensorField random_field(const Mesh& mesh, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  QTensorField q(mesh);
  const int d = mesh.dim;
  for_each_interior(mesh, [&](std::size_t n, int, int, int) {
    std::array<double, 9> m{};
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) m[3 * i + j] = m[3 * j + i] = dist(rng);
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += m[4 * i];
    for (int i = 0; i < d; ++i) m[4 * i] -= tr / d;
    q.set_node_matrix(n, m);
  });
  return q;
}

ExperimentConfig preset_config(std::string_view name) {
  const Preset& p = find_preset(name);
  ExperimentConfig c;
  c.preset = p.name;
  c.dim = p.dim;
  c.intervals = p.intervals;
  c.length = p.length;
  c.params = p.params;
  c.scheme = p.scheme;
  c.time.T = p.T;
  c.time.tau = p.tau;
  c.time.adaptive = p.adaptive;
  c.time.controller = p.controller;
  c.initial.kind = "preset";
  c.initial.preset = p.name;
  return c;
}

Mesh config_mesh(const ExperimentConfig& config) {
  return build_mesh(config.dim, config.intervals, config.length);
}

QTensorField initial_field(const ExperimentConfig& config, const Mesh& mesh) {
  const InitialSpec& init = config.initial;
  if (init.kind == "preset") return preset_field(init.preset.empty() ? config.preset : init.preset, mesh);
  if (init.kind == "random") return random_field(mesh, init.seed, init.amplitude);
  if (init.kind == "zero") return QTensorField(mesh);
  throw std::invalid_argument("unknown initial kind '" + init.kind + "' (expected preset, random or zero)");
}

MbpSummary mbp_summary(const ExperimentConfig& config, const QTensorField& q0, double initial_energy,
                       std::vector<std::string>* warnings) {
  MbpSummary m;
  m.active = is_mbp(config.scheme);
  if (!m.active) return m;
  const ModelParams& p = config.params;
  const Mesh& mesh = q0.mesh();
  m.eta = p.eta > 0.0 ? p.eta : eta_bound(p, frobenius_sup_norm(q0), mesh.dim);
  m.kappa_min = kappa_min(p, m.eta);
  m.g_star = g_star_upper(initial_energy, p.c_star);
  m.tau_max = mbp_tau_max(p, mesh.h, mesh.dim, m.g_star);

  const bool kappa_ok = p.kappa >= m.kappa_min * (1.0 - 1e-12);
  bool tau_ok = true;
  if (config.scheme == Scheme::mbp_sesav2) {
    const double largest = config.time.adaptive ? config.time.controller.tau_max : config.time.tau;
    tau_ok = largest <= m.tau_max;
  }
  m.guaranteed = kappa_ok && tau_ok;
  if (warnings) {
    std::ostringstream os;
    if (!kappa_ok) {
      os << "kappa = " << p.kappa << " is below kappa_min = " << m.kappa_min << "; the eta bound is not checked";
      warnings->push_back(os.str());
      os.str("");
    }
    if (!tau_ok) {
      os << "time step may exceed the second-order MBP bound " << m.tau_max << "; the eta bound is only checked on "
         << "steps within it";
      warnings->push_back(os.str());
    }
  }
  return m;
}

SimulationResult run_simulation(const ExperimentConfig& config, const SnapshotSink& sink) {
  check_time(config.time);
  const Mesh mesh = config_mesh(config);
  const Integrator integrator(mesh, config.params, config.solver);
  const ModelParams& p = config.params;

  SimulationResult result;
  result.warnings = config.warnings;
  SavState state = initial_state(initial_field(config, mesh), p);
  double energy = integrator.energy(config.scheme, state);
  result.mbp = mbp_summary(config, state.Q, energy, &result.warnings);
  const bool kappa_ok = result.mbp.active && p.kappa >= result.mbp.kappa_min * (1.0 - 1e-12);

  result.records.push_back({0, 0.0, 0.0, energy, frobenius_sup_norm(state.Q), state.s,
                            g_value(state.Q, state.s, p), false});
  const int every = config.output.snapshot_every;
  if (sink && every > 0) sink(0, state);

  const TimeSpec& ts = config.time;
  AdaptiveController controller = ts.controller;
  controller.prev_energy = energy;
  double tau = ts.adaptive ? std::clamp(ts.tau, controller.tau_min, controller.tau_max) : ts.tau;
  const int fixed_steps = ts.adaptive ? 0 : fixed_step_count(ts.T, ts.tau);

  for (int n = 1;; ++n) {
    double tau_n = tau;
    bool last = false;
    if (!ts.adaptive) {
      last = n == fixed_steps;
      if (last) tau_n = ts.T - (n - 1) * ts.tau;
    } else if (state.t + tau >= ts.T * (1.0 - 1e-12)) {
      last = true;
      tau_n = ts.T - state.t;
    }

    StepReport report = integrator.step(config.scheme, state, tau_n);
    report.state.t = ts.adaptive ? (last ? ts.T : state.t + tau_n) : (last ? ts.T : n * ts.tau);

    if (report.energy > energy + config.energy_tol) {
      std::ostringstream os;
      os.precision(17);
      os << "energy increased at step " << n << ": " << energy << " -> " << report.energy;
      throw InvariantViolation(os.str(), n);
    }
    const bool mbp_check =
        kappa_ok && (config.scheme == Scheme::mbp_sesav1 || tau_n <= result.mbp.tau_max);
    if (mbp_check && report.sup_norm > result.mbp.eta + 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "sup-norm " << report.sup_norm << " exceeds eta = " << result.mbp.eta << " at step " << n;
      throw InvariantViolation(os.str(), n);
    }

    energy = report.energy;
    state = std::move(report.state);
    result.records.push_back({n, state.t, tau_n, energy, report.sup_norm, state.s, report.g_value, report.clamped});
    if (sink && every > 0 && (n % every == 0 || last)) sink(n, state);
    if (last) break;
    if (ts.adaptive) tau = adaptive_tau(controller, energy, tau_n);
  }
  result.final_state = std::move(state);
  return result;
}

// ---------------------------------------------------------------------------

void compute_rates(RateTable& table) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto rate = [](double e_prev, double e_cur, double r_prev, double r_cur) {
    return std::log(e_prev / e_cur) / std::log(r_prev / r_cur);
  };
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    RateRow& row = table.rows[k];
    if (k == 0) {
      row.rate_grad = row.rate_L2 = row.rate_s = nan;
      continue;
    }
    const RateRow& prev = table.rows[k - 1];
    row.rate_grad = rate(prev.error_grad, row.error_grad, prev.resolution, row.resolution);
    row.rate_L2 = rate(prev.error_L2, row.error_L2, prev.resolution, row.resolution);
    row.rate_s = rate(prev.error_s, row.error_s, prev.resolution, row.resolution);
  }
}

RateTable convergence_study_time(const ExperimentConfig& config, const std::vector<double>& taus,
                                 double reference_tau) {
  if (taus.empty()) throw std::invalid_argument("convergence_study_time: empty tau list");
  if (config.time.adaptive) throw std::invalid_argument("convergence_study_time: needs fixed time steps");
  if (!(reference_tau > 0.0)) throw std::invalid_argument("reference tau must be > 0");
  const double tau_min = *std::min_element(taus.begin(), taus.end());
  if (!(reference_tau < tau_min / 4.0))
    throw std::invalid_argument("reference tau must be below min(taus)/4");

  auto multiple = [](double big, double small, const char* what) {
    const double r = big / small;
    const long long k = std::llround(r);
    if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-9 * r)
      throw std::invalid_argument(std::string(what) + " is not an integer multiple of the reference step");
    return k;
  };
  const long long ref_steps = multiple(config.time.T, reference_tau, "T");
  std::vector<long long> ratio;
  for (double tau : taus) {
    if (!(tau > 0.0)) throw std::invalid_argument("time steps must be > 0");
    ratio.push_back(multiple(tau, reference_tau, "tau"));
    multiple(config.time.T, tau, "T");
  }

  const Mesh mesh = config_mesh(config);
  const Integrator integrator(mesh, config.params, config.solver);
  const SavState start = initial_state(initial_field(config, mesh), config.params);
  SavState ref = start;
  std::vector<SavState> runs(taus.size(), start);
  std::vector<Errors> worst(taus.size());

  for (long long n = 1; n <= ref_steps; ++n) {
    ref = integrator.step(config.scheme, ref, reference_tau).state;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      if (n % ratio[k] != 0) continue;
      runs[k] = integrator.step(config.scheme, runs[k], taus[k]).state;
      const Errors e = state_errors(runs[k].Q, runs[k].s, ref.Q, ref.s);
      worst[k].grad = std::max(worst[k].grad, e.grad);
      worst[k].l2 = std::max(worst[k].l2, e.l2);
      worst[k].s = std::max(worst[k].s, e.s);
    }
  }

  RateTable table{"tau", {}};
  for (std::size_t k = 0; k < taus.size(); ++k)
    table.rows.push_back({taus[k], worst[k].grad, worst[k].l2, worst[k].s, 0, 0, 0});
  compute_rates(table);
  return table;
}

RateTable convergence_study_space(const ExperimentConfig& config, const std::vector<int>& Ms) {
  if (Ms.size() < 2) throw std::invalid_argument("convergence_study_space: need at least two resolutions");
  for (std::size_t k = 1; k < Ms.size(); ++k)
    if (Ms[k] != 2 * Ms[k - 1])
      throw std::invalid_argument("convergence_study_space: resolutions must double (got " +
                                  std::to_string(Ms[k - 1]) + " then " + std::to_string(Ms[k]) + ")");
  if (config.time.adaptive) throw std::invalid_argument("convergence_study_space: needs fixed time steps");
  check_time(config.time);

  std::vector<Mesh> meshes;
  std::vector<Integrator> integrators;
  std::vector<SavState> states;
  for (int m : Ms) {
    meshes.push_back(build_mesh(config.dim, m, config.length));
    integrators.emplace_back(meshes.back(), config.params, config.solver);
    states.push_back(initial_state(initial_field(config, meshes.back()), config.params));
  }

  const int steps = fixed_step_count(config.time.T, config.time.tau);
  for (int n = 1; n <= steps; ++n) {
    const double tau_n = n == steps ? config.time.T - (n - 1) * config.time.tau : config.time.tau;
    for (std::size_t k = 0; k < Ms.size(); ++k)
      states[k] = integrators[k].step(config.scheme, states[k], tau_n).state;
  }

  RateTable table{"h", {}};
  for (std::size_t k = 0; k + 1 < Ms.size(); ++k) {
    const QTensorField fine = restrict_to_coarse(states[k + 1].Q, meshes[k]);
    const Errors e = state_errors(states[k].Q, states[k].s, fine, states[k + 1].s);
    table.rows.push_back({meshes[k].h, e.grad, e.l2, e.s, 0, 0, 0});
  }
  compute_rates(table);
  return table;
}

QTensorField restrict_to_coarse(const QTensorField& fine, const Mesh& coarse) {
  const Mesh& fm = fine.mesh();
  if (fm.dim != coarse.dim || fm.length != coarse.length || fm.intervals % coarse.intervals != 0)
    throw std::invalid_argument("restrict_to_coarse: meshes are not nested");
  const int r = fm.intervals / coarse.intervals;
  QTensorField out(coarse);
  const int m = coarse.intervals;
  const int k_hi = coarse.dim == 3 ? m : 0;
  for (int c = 0; c < fine.component_count(); ++c) {
    const ScalarField& src = fine.component(c);
    ScalarField& dst = out.component(c);
    for (int k = 0; k <= k_hi; ++k)
      for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i) dst(i, j, k) = src(r * i, r * j, r * k);
  }
  return out;
}

std::size_t defect_node_count(const QTensorField& q, double threshold) {
  const ScalarField gap = eigen_gap_field(q, 1.0 / q.dim());
  std::size_t count = 0;
  for_each_interior(q.mesh(), [&](std::size_t n, int, int, int) {
    if (gap[n] < threshold) ++count;
  });
  return count;
}

}  // namespace qtflow
