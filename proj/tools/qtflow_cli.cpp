// qtflow command-line driver: run, converge-time, converge-space, presets.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "qtflow/config.hpp"
#include "qtflow/harness.hpp"
#include "qtflow/linsolve.hpp"
#include "qtflow/output.hpp"
#include "qtflow/sesav.hpp"

namespace fs = std::filesystem;
using namespace qtflow;

namespace {

enum Exit { kOk = 0, kIo = 1, kConfig = 2, kSolver = 3, kInvariant = 4 };

// Accepts plain decimals and fractions such as 1/64.
double parse_step(const std::string& text) {
  const auto slash = text.find('/');
  std::size_t used = 0;
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else {
      const double num = std::stod(text.substr(0, slash), &used);
      if (used == slash) {
        const std::string den_text = text.substr(slash + 1);
        const double den = std::stod(den_text, &used);
        if (used == den_text.size()) return num / den;
      }
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("malformed step size '" + text + "'");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

int cmd_run(const std::string& config_path, const fs::path& out_dir, const std::vector<std::string>& sets,
            bool verbose) {
  const ExperimentConfig cfg = load_config(config_path, sets);
  ensure_dir(out_dir);
  const SnapshotFormat format = cfg.output.format;
  const SnapshotSink sink = [&](int step, const SavState& state) {
    write_snapshot(state.Q, out_dir / snapshot_filename(step, format), format);
    if (verbose) std::cerr << "snapshot step " << step << " t=" << state.t << '\n';
  };
  const SimulationResult result = run_simulation(cfg, sink);
  print_warnings(result.warnings);
  write_diagnostics(result.records, out_dir / "diagnostics.csv");

  const DiagnosticsRecord& first = result.records.front();
  const DiagnosticsRecord& last = result.records.back();
  std::printf("scheme      %s\n", std::string(to_string(cfg.scheme)).c_str());
  std::printf("steps       %d\n", last.step);
  std::printf("final time  %.10g\n", last.time);
  std::printf("energy      %.10g -> %.10g\n", first.energy, last.energy);
  std::printf("sup norm    %.10g -> %.10g\n", first.sup_norm, last.sup_norm);
  if (result.mbp.active)
    std::printf("mbp         eta=%.10g kappa_min=%.10g tau_max=%.10g %s\n", result.mbp.eta, result.mbp.kappa_min,
                result.mbp.tau_max, result.mbp.guaranteed ? "(bound checked)" : "(bound not guaranteed)");
  std::printf("output      %s\n", (out_dir / "diagnostics.csv").string().c_str());
  return kOk;
}

int write_table(const RateTable& table, const fs::path& out_dir) {
  ensure_dir(out_dir);
  write_rates_csv(table, out_dir / "rates.csv");
  std::cout << format_rate_table(table);
  return kOk;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const BlowUpError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-tensor gradient flow with stabilized exponential SAV schemes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  bool verbose = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--set", sets, "Override, section.key=value")->take_all();
    sub->add_flag("-v,--verbose", verbose, "Report progress on stderr");
  };

  CLI::App* run = app.add_subcommand("run", "Run one simulation");
  add_common(run);

  std::vector<std::string> taus;
  std::string ref_tau;
  CLI::App* ctime = app.add_subcommand("converge-time", "Temporal convergence study");
  add_common(ctime);
  ctime->add_option("--taus", taus, "Step sizes, e.g. 1/32,1/64")->required()->delimiter(',');
  ctime->add_option("--ref-tau", ref_tau, "Reference step size")->required();

  std::vector<int> ms;
  CLI::App* cspace = app.add_subcommand("converge-space", "Spatial convergence study");
  add_common(cspace);
  cspace->add_option("--Ms", ms, "Intervals per axis, doubling, e.g. 32,64,128")->required()->delimiter(',');

  app.add_subcommand("presets", "List the built-in experiment presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (app.got_subcommand("presets")) {
    std::cout << format_presets();
    return kOk;
  }
  if (run->parsed()) return guarded([&] { return cmd_run(config_path, out_dir, sets, verbose); });
  if (ctime->parsed())
    return guarded([&] {
      const ExperimentConfig cfg = load_config(config_path, sets);
      print_warnings(cfg.warnings);
      std::vector<double> steps;
      for (const auto& t : taus) steps.push_back(parse_step(t));
      return write_table(convergence_study_time(cfg, steps, parse_step(ref_tau)), out_dir);
    });
  return guarded([&] {
    const ExperimentConfig cfg = load_config(config_path, sets);
    print_warnings(cfg.warnings);
    return write_table(convergence_study_space(cfg, ms), out_dir);
  });
}
