#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qtflow/mesh.hpp"
#include "qtflow/qtensor.hpp"
#include "qtflow/sesav.hpp"

namespace qtflow {

/// Named experiment setup: mesh, model constants, scheme and time stepping.
struct Preset {
  std::string name;
  std::string description;
  int dim = 2;
  int intervals = 0;
  double length = 1.0;
  ModelParams params;
  Scheme scheme = Scheme::sesav2;
  double T = 1.0;
  double tau = 1e-3;
  bool adaptive = false;
  AdaptiveController controller;
};

/// convergence2d, hole2d, orient3d.
const std::vector<Preset>& presets();
/// Throws std::invalid_argument for unknown names.
const Preset& find_preset(std::string_view name);

/// Initial tensor field of a preset on an arbitrary mesh. Boundary nodes zero.
QTensorField preset_field(std::string_view name, const Mesh& mesh);
/// preset_field with s0 = E_1h[Q0] under the preset's model constants.
SavState preset_initial(std::string_view name, const Mesh& mesh);

/// Trace-free symmetric field with entries drawn uniformly from
/// [-amplitude, amplitude] before the trace is removed. Deterministic in seed.
QTensorField random_field(const Mesh& mesh, std::uint64_t seed, double amplitude);

struct InitialSpec {
  std::string kind = "preset";  // preset | random | zero
  std::string preset;
  std::uint64_t seed = 0;
  double amplitude = 0.1;
};

struct TimeSpec {
  double T = 1.0;
  double tau = 1e-3;  // fixed step, or the first step of an adaptive run
  bool adaptive = false;
  AdaptiveController controller;
};

enum class SnapshotFormat { vtk, csv };

struct OutputSpec {
  int snapshot_every = 0;  // 0 disables snapshots
  SnapshotFormat format = SnapshotFormat::vtk;
};

struct ExperimentConfig {
  std::string preset;  // empty when fully specified by hand
  int dim = 2;
  int intervals = 0;
  double length = 1.0;
  ModelParams params;
  Scheme scheme = Scheme::sesav2;
  IntegratorOptions solver;
  TimeSpec time;
  InitialSpec initial;
  OutputSpec output;
  double energy_tol = 1e-12;
  std::vector<std::string> warnings;
};

/// Config equivalent to running a preset with its own defaults.
ExperimentConfig preset_config(std::string_view name);

Mesh config_mesh(const ExperimentConfig& config);
QTensorField initial_field(const ExperimentConfig& config, const Mesh& mesh);

struct DiagnosticsRecord {
  int step = 0;
  double time = 0.0;
  double tau = 0.0;
  double energy = 0.0;
  double sup_norm = 0.0;
  double s = 0.0;
  double g = 0.0;
  bool clamped = false;
};

/// Failed energy or MBP check during a run.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

struct MbpSummary {
  bool active = false;      // scheme is an MBP variant
  bool guaranteed = false;  // kappa >= kappa_min (and tau bound for the second-order scheme)
  double eta = 0.0;
  double kappa_min = 0.0;
  double g_star = 0.0;
  double tau_max = 0.0;
};

struct SimulationResult {
  SavState final_state;
  std::vector<DiagnosticsRecord> records;
  MbpSummary mbp;
  std::vector<std::string> warnings;
};

/// Receives (step, state) at the snapshot cadence, including step 0.
using SnapshotSink = std::function<void(int, const SavState&)>;

/// Steps the configured scheme from t = 0 to T. Record 0 is the initial
/// state. Throws InvariantViolation when the energy rises by more than
/// energy_tol, or when an MBP run whose hypotheses hold leaves the eta-ball.
SimulationResult run_simulation(const ExperimentConfig& config, const SnapshotSink& sink = {});

/// MBP constants for a config and its initial field; fills warnings for
/// kappa below kappa_min or a fixed step above the second-order bound.
MbpSummary mbp_summary(const ExperimentConfig& config, const QTensorField& q0, double initial_energy,
                       std::vector<std::string>* warnings = nullptr);

// ---------------------------------------------------------------------------
// Convergence studies

struct RateRow {
  double resolution = 0.0;  // tau or h
  double error_grad = 0.0;
  double error_L2 = 0.0;
  double error_s = 0.0;
  double rate_grad = 0.0;  // NaN in the first row
  double rate_L2 = 0.0;
  double rate_s = 0.0;
};

struct RateTable {
  std::string variable;  // "tau" or "h"
  std::vector<RateRow> rows;
};

/// Fills the rate columns from the error columns.
void compute_rates(RateTable& table);

/// Runs every tau in lockstep with the reference step and compares at every
/// coarse step time: max over steps of the L2 and gradient norms of the error
/// and of |e_s|. Each tau must be an integer multiple of reference_tau.
RateTable convergence_study_time(const ExperimentConfig& config, const std::vector<double>& taus,
                                 double reference_tau);

/// Runs all resolutions with the configured fixed tau and compares each
/// M with 2M at T on the coarse grid nodes. Ms must double successively.
RateTable convergence_study_space(const ExperimentConfig& config, const std::vector<int>& Ms);

/// Injection of a field on a refined mesh onto the coarse mesh nodes.
QTensorField restrict_to_coarse(const QTensorField& fine, const Mesh& coarse);

/// Interior nodes whose eigen gap of Q + I/d is below threshold.
std::size_t defect_node_count(const QTensorField& q, double threshold = 0.02);

}  // namespace qtflow
