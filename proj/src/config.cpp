#include "qtflow/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qtflow {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"preset"}},
      {"mesh", {"dim", "intervals", "length"}},
      {"model", {"a", "b", "c", "L1", "L2", "L3", "kappa", "c_star", "eta"}},
      {"scheme", {"name", "backend", "cg_tol", "cg_max_iter"}},
      {"time", {"T", "tau", "adaptive", "tau_min", "tau_max", "alpha", "energy_tol"}},
      {"initial", {"kind", "preset", "seed", "amplitude"}},
      {"output", {"snapshot_every", "format"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

struct Entry {
  std::string value;
  int line = 0;  // 0: command-line override
};

class Entries {
 public:
  std::vector<std::string> errors;

  void add(const std::string& section, const std::string& key, std::string value, int line) {
    const std::string where = line > 0 ? "line " + std::to_string(line) : "override";
    const auto& keys = known_keys();
    const auto sec = keys.find(section);
    if (sec == keys.end() || !sec->second.count(key)) {
      errors.push_back(where + ": unknown key '" + qualified(section, key) + "'");
      return;
    }
    const std::string full = qualified(section, key);
    if (line > 0 && map_.count(full)) {
      errors.push_back(where + ": duplicate key '" + full + "' (first set on line " +
                       std::to_string(map_[full].line) + ")");
      return;
    }
    map_[full] = Entry{std::move(value), line};
  }

  bool has(const std::string& key) const { return map_.count(key) != 0; }
  const std::string& text(const std::string& key) const { return map_.at(key).value; }

  bool number(const std::string& key, double& out) {
    if (!has(key)) return false;
    const std::string& v = text(key);
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
      malformed(key, "number");
      return false;
    }
    out = x;
    return true;
  }

  bool integer(const std::string& key, long long& out) {
    if (!has(key)) return false;
    const std::string& v = text(key);
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
      malformed(key, "integer");
      return false;
    }
    out = x;
    return true;
  }

  bool boolean(const std::string& key, bool& out) {
    if (!has(key)) return false;
    const std::string& v = text(key);
    if (v == "true" || v == "yes" || v == "1") out = true;
    else if (v == "false" || v == "no" || v == "0") out = false;
    else {
      malformed(key, "boolean");
      return false;
    }
    return true;
  }

  void range(const std::string& key, bool ok, const std::string& constraint) {
    if (ok) return;
    errors.push_back(location(key) + key + " = " + (has(key) ? text(key) : std::string("(default)")) +
                     " violates " + constraint);
  }

 private:
  std::string location(const std::string& key) const {
    if (!has(key)) return "";
    const int line = map_.at(key).line;
    return line > 0 ? "line " + std::to_string(line) + ": " : "override: ";
  }

  void malformed(const std::string& key, const char* kind) {
    errors.push_back(location(key) + "malformed " + kind + " for key '" + key + "': '" + text(key) + "'");
  }

  std::map<std::string, Entry> map_;
};

void read_text(std::string_view text, Entries& entries) {
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::size_t hash = raw.find_first_of("#;");
    const std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') {
        entries.errors.push_back(where + ": unterminated section header '" + line + "'");
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty() || !known_keys().count(section)) {
        entries.errors.push_back(where + ": unknown section '[" + section + "]'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      entries.errors.push_back(where + ": expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      entries.errors.push_back(where + ": missing key before '='");
      continue;
    }
    if (!known_keys().count(section)) continue;  // already reported
    entries.add(section, key, value, line_no);
  }
}

void read_overrides(const std::vector<std::string>& overrides, Entries& entries) {
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      entries.errors.push_back("override: expected 'section.key=value', got '" + o + "'");
      continue;
    }
    const std::string path = trim(std::string_view(o).substr(0, eq));
    const std::string value = trim(std::string_view(o).substr(eq + 1));
    const auto dot = path.find('.');
    if (dot == std::string::npos) entries.add("", path, value, 0);
    else entries.add(path.substr(0, dot), path.substr(dot + 1), value, 0);
  }
}

ExperimentConfig materialize(Entries& in) {
  ExperimentConfig cfg;
  const bool from_preset = in.has("preset");
  if (from_preset) {
    try {
      cfg = preset_config(in.text("preset"));
    } catch (const std::invalid_argument& e) {
      in.errors.push_back(e.what());
    }
  } else {
    std::vector<std::string> missing;
    for (const char* key : {"mesh.dim", "mesh.intervals", "mesh.length", "model.a", "model.c", "model.L1",
                            "scheme.name", "time.T", "initial.kind"})
      if (!in.has(key)) missing.push_back(key);
    bool adaptive = false;
    if (in.has("time.adaptive")) {
      const std::string& v = in.text("time.adaptive");
      adaptive = v == "true" || v == "yes" || v == "1";
    }
    if (!in.has("time.tau") && !adaptive) missing.push_back("time.tau");
    if (!missing.empty()) {
      std::string msg = "missing mandatory keys:";
      for (const auto& k : missing) msg += " " + k;
      in.errors.push_back(msg);
    }
  }

  long long iv = 0;
  if (in.integer("mesh.dim", iv)) cfg.dim = static_cast<int>(iv);
  if (in.integer("mesh.intervals", iv)) cfg.intervals = static_cast<int>(iv);
  in.number("mesh.length", cfg.length);

  ModelParams& p = cfg.params;
  in.number("model.a", p.a);
  in.number("model.b", p.b);
  in.number("model.c", p.c);
  in.number("model.L1", p.L1);
  in.number("model.L2", p.L2);
  in.number("model.L3", p.L3);
  const bool kappa_given = in.number("model.kappa", p.kappa) || (from_preset && !in.has("model.kappa"));
  const bool c_star_given = in.number("model.c_star", p.c_star) || (from_preset && !in.has("model.c_star"));
  in.number("model.eta", p.eta);

  if (in.has("scheme.name")) {
    try {
      cfg.scheme = parse_scheme(in.text("scheme.name"));
    } catch (const std::invalid_argument& e) {
      in.errors.push_back(e.what());
    }
  }
  if (in.has("scheme.backend")) {
    const std::string& b = in.text("scheme.backend");
    if (b == "fast") cfg.solver.backend = LinearBackend::fast;
    else if (b == "dense") cfg.solver.backend = LinearBackend::dense_oracle;
    else in.errors.push_back("scheme.backend must be 'fast' or 'dense', got '" + b + "'");
  }
  in.number("scheme.cg_tol", cfg.solver.cg_tol);
  if (in.integer("scheme.cg_max_iter", iv)) cfg.solver.cg_max_iter = static_cast<int>(iv);

  TimeSpec& t = cfg.time;
  in.number("time.T", t.T);
  in.boolean("time.adaptive", t.adaptive);
  in.number("time.tau_min", t.controller.tau_min);
  in.number("time.tau_max", t.controller.tau_max);
  in.number("time.alpha", t.controller.alpha);
  if (!in.number("time.tau", t.tau) && t.adaptive && !from_preset) t.tau = t.controller.tau_min;
  in.number("time.energy_tol", cfg.energy_tol);

  InitialSpec& init = cfg.initial;
  if (in.has("initial.kind")) init.kind = in.text("initial.kind");
  if (in.has("initial.preset")) init.preset = in.text("initial.preset");
  if (in.integer("initial.seed", iv)) init.seed = static_cast<std::uint64_t>(iv);
  in.number("initial.amplitude", init.amplitude);

  if (in.integer("output.snapshot_every", iv)) cfg.output.snapshot_every = static_cast<int>(iv);
  if (in.has("output.format")) {
    const std::string& f = in.text("output.format");
    if (f == "vtk") cfg.output.format = SnapshotFormat::vtk;
    else if (f == "csv") cfg.output.format = SnapshotFormat::csv;
    else in.errors.push_back("output.format must be 'vtk' or 'csv', got '" + f + "'");
  }

  in.range("mesh.dim", cfg.dim == 2 || cfg.dim == 3, "dim in {2, 3}");
  in.range("mesh.intervals", cfg.intervals >= 4, "intervals >= 4");
  in.range("mesh.length", cfg.length > 0, "length > 0");
  in.range("model.b", p.b >= 0, "b >= 0");
  in.range("model.c", p.c > 0, "c > 0");
  in.range("model.L1", p.L1 > 0, "L1 > 0");
  in.range("model.kappa", p.kappa >= 0, "kappa >= 0");
  in.range("model.eta", p.eta >= 0, "eta >= 0");
  in.range("scheme.cg_tol", cfg.solver.cg_tol > 0, "cg_tol > 0");
  in.range("time.T", t.T > 0, "T > 0");
  in.range("time.tau", t.tau > 0, "tau > 0");
  in.range("time.tau_min", t.controller.tau_min > 0, "tau_min > 0");
  in.range("time.tau_max", t.controller.tau_max >= t.controller.tau_min, "tau_max >= tau_min");
  in.range("time.alpha", t.controller.alpha >= 0, "alpha >= 0");
  in.range("time.energy_tol", cfg.energy_tol >= 0, "energy_tol >= 0");
  in.range("initial.amplitude", init.amplitude >= 0, "amplitude >= 0");
  in.range("output.snapshot_every", cfg.output.snapshot_every >= 0, "snapshot_every >= 0");
  if (init.kind != "preset" && init.kind != "random" && init.kind != "zero")
    in.errors.push_back("initial.kind must be preset, random or zero, got '" + init.kind + "'");
  if (init.kind == "preset") {
    const std::string name = init.preset.empty() ? cfg.preset : init.preset;
    if (name.empty()) {
      in.errors.push_back("initial.kind = preset needs initial.preset or a top-level preset");
    } else {
      try {
        if (find_preset(name).dim != cfg.dim)
          in.errors.push_back("initial preset '" + name + "' does not match mesh.dim = " + std::to_string(cfg.dim));
      } catch (const std::invalid_argument& e) {
        in.errors.push_back(e.what());
      }
    }
  }
  if (!in.errors.empty()) return cfg;

  const bool mbp = is_mbp(cfg.scheme);
  if (kappa_given && c_star_given && !mbp) return cfg;

  const Mesh mesh = config_mesh(cfg);
  const QTensorField q0 = initial_field(cfg, mesh);
  const double eta = p.eta > 0 ? p.eta : eta_bound(p, frobenius_sup_norm(q0), cfg.dim);
  if (!c_star_given) p.c_star = default_c_star(p, eta, std::pow(cfg.length, cfg.dim));
  if (!kappa_given) p.kappa = round_up_two_figures(kappa_min(p, eta));
  if (mbp && p.kappa < kappa_min(p, eta) * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "kappa = " << p.kappa << " is below kappa_min = " << kappa_min(p, eta)
       << "; energy stability holds but the maximum bound is not guaranteed";
    cfg.warnings.push_back(os.str());
  }
  return cfg;
}

}  // namespace

double round_up_two_figures(double x) {
  if (!(x > 0.0)) return 0.0;
  const double scale = std::pow(10.0, std::floor(std::log10(x)) - 1.0);
  return std::ceil(x / scale - 1e-9) * scale;
}

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  Entries entries;
  read_text(text, entries);
  read_overrides(overrides, entries);
  ExperimentConfig cfg;
  if (entries.errors.empty()) cfg = materialize(entries);
  if (!entries.errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : entries.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

}  // namespace qtflow
