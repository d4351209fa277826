#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "qtflow/config.hpp"
#include "qtflow/harness.hpp"
#include "qtflow/linsolve.hpp"
#include "qtflow/output.hpp"
#include "qtflow/qtensor.hpp"
#include "qtflow/sesav.hpp"

namespace py = pybind11;
using namespace qtflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Tensor fields cross the boundary as (components, [nz,] ny, nx) arrays of
// the unique entries Q_11, Q_12, ..., x index fastest.
Array to_numpy(const QTensorField& q) {
  const Mesh& m = q.mesh();
  const auto n = static_cast<py::ssize_t>(m.intervals + 1);
  std::vector<py::ssize_t> shape{q.component_count()};
  for (int d = 0; d < m.dim; ++d) shape.push_back(n);
  Array out(shape);
  double* dst = out.mutable_data();
  for (int c = 0; c < q.component_count(); ++c) {
    const auto v = q.component(c).values();
    std::memcpy(dst + c * v.size(), v.data(), v.size() * sizeof(double));
  }
  return out;
}

Mesh mesh_of(const Array& a, double length) {
  const int dim = static_cast<int>(a.ndim()) - 1;
  if (dim != 2 && dim != 3) throw std::invalid_argument("tensor array must have 3 or 4 dimensions");
  for (int d = 2; d <= dim; ++d)
    if (a.shape(d) != a.shape(1)) throw std::invalid_argument("tensor array must be square in space");
  const Mesh m = build_mesh(dim, static_cast<int>(a.shape(1)) - 1, length);
  if (a.shape(0) != QTensorField::component_count(dim))
    throw std::invalid_argument("expected " + std::to_string(QTensorField::component_count(dim)) + " components");
  return m;
}

QTensorField from_numpy(const Array& a, const Mesh& m) {
  QTensorField q(m);
  const double* src = a.data();
  for (int c = 0; c < q.component_count(); ++c) {
    auto v = q.component(c).values();
    std::memcpy(v.data(), src + c * v.size(), v.size() * sizeof(double));
  }
  if (!q.boundary_is_zero()) throw std::invalid_argument("tensor array must vanish on the boundary");
  return q;
}

py::dict report_dict(const StepReport& r) {
  py::dict d;
  d["Q"] = to_numpy(r.state.Q);
  d["s"] = r.state.s;
  d["t"] = r.state.t;
  d["tau"] = r.tau_used;
  d["energy"] = r.energy;
  d["sup_norm"] = r.sup_norm;
  d["g"] = r.g_value;
  d["clamped"] = r.clamped;
  return d;
}

py::dict rates_dict(const RateTable& t) {
  std::vector<double> res, eg, el, es, rg, rl, rs;
  for (const RateRow& r : t.rows) {
    res.push_back(r.resolution);
    eg.push_back(r.error_grad);
    el.push_back(r.error_L2);
    es.push_back(r.error_s);
    rg.push_back(r.rate_grad);
    rl.push_back(r.rate_L2);
    rs.push_back(r.rate_s);
  }
  py::dict d;
  d[py::str(t.variable)] = py::array(py::cast(res));
  d["error_grad"] = py::array(py::cast(eg));
  d["error_L2"] = py::array(py::cast(el));
  d["error_s"] = py::array(py::cast(es));
  d["rate_grad"] = py::array(py::cast(rg));
  d["rate_L2"] = py::array(py::cast(rl));
  d["rate_s"] = py::array(py::cast(rs));
  return d;
}

class PyIntegrator {
 public:
  PyIntegrator(int dim, int intervals, double length, const ModelParams& p, const std::string& backend, double cg_tol)
      : mesh_(build_mesh(dim, intervals, length)), integ_(mesh_, p, options(backend, cg_tol)) {}

  py::dict step(const std::string& scheme, const Array& q, double s, double tau, double t) const {
    const SavState st{from_numpy(q, check(q)), s, t};
    StepReport r;
    {
      py::gil_scoped_release release;
      r = integ_.step(parse_scheme(scheme), st, tau);
    }
    return report_dict(r);
  }

  double energy(const std::string& scheme, const Array& q, double s) const {
    return integ_.energy(parse_scheme(scheme), SavState{from_numpy(q, check(q)), s, 0.0});
  }

  const Mesh& mesh() const { return mesh_; }
  const ModelParams& params() const { return integ_.params(); }

 private:
  static IntegratorOptions options(const std::string& backend, double cg_tol) {
    IntegratorOptions o;
    o.cg_tol = cg_tol;
    if (backend == "dense") o.backend = LinearBackend::dense_oracle;
    else if (backend != "fast") throw std::invalid_argument("backend must be 'fast' or 'dense'");
    return o;
  }
  const Mesh& check(const Array& q) const {
    const Mesh m = mesh_of(q, mesh_.length);
    if (m.dim != mesh_.dim || m.intervals != mesh_.intervals) throw std::invalid_argument("array does not match the mesh");
    return mesh_;
  }

  Mesh mesh_;
  Integrator integ_;
};

}  // namespace

PYBIND11_MODULE(_qtflow, m) {
  m.doc() = "Landau-de Gennes Q-tensor gradient flow with stabilized exponential SAV schemes.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);
  py::register_exception<BlowUpError>(m, "BlowUpError", PyExc_FloatingPointError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double a, double b, double c, double L1, double L2, double L3, double kappa, double c_star,
                       double eta) { return ModelParams{a, b, c, L1, L2, L3, kappa, c_star, eta}; }),
           py::kw_only(), py::arg("a") = 0.0, py::arg("b") = 0.0, py::arg("c") = 1.0, py::arg("L1") = 1.0,
           py::arg("L2") = 0.0, py::arg("L3") = 0.0, py::arg("kappa") = 0.0, py::arg("c_star") = 1.0,
           py::arg("eta") = 0.0)
      .def_readwrite("a", &ModelParams::a)
      .def_readwrite("b", &ModelParams::b)
      .def_readwrite("c", &ModelParams::c)
      .def_readwrite("L1", &ModelParams::L1)
      .def_readwrite("L2", &ModelParams::L2)
      .def_readwrite("L3", &ModelParams::L3)
      .def_readwrite("kappa", &ModelParams::kappa)
      .def_readwrite("c_star", &ModelParams::c_star)
      .def_readwrite("eta", &ModelParams::eta)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(a=" + std::to_string(p.a) + ", b=" + std::to_string(p.b) + ", c=" + std::to_string(p.c) +
               ", L1=" + std::to_string(p.L1) + ", L2=" + std::to_string(p.L2) + ", L3=" + std::to_string(p.L3) +
               ", kappa=" + std::to_string(p.kappa) + ", c_star=" + std::to_string(p.c_star) + ")";
      });

  py::class_<PyIntegrator>(m, "Integrator")
      .def(py::init<int, int, double, const ModelParams&, const std::string&, double>(), py::arg("dim"),
           py::arg("intervals"), py::arg("length"), py::arg("params"), py::arg("backend") = "fast",
           py::arg("cg_tol") = 1e-10)
      .def("step", &PyIntegrator::step, py::arg("scheme"), py::arg("Q"), py::arg("s"), py::arg("tau"),
           py::arg("t") = 0.0, "One step; returns a dict with Q, s, t, tau, energy, sup_norm, g, clamped.")
      .def("energy", &PyIntegrator::energy, py::arg("scheme"), py::arg("Q"), py::arg("s"))
      .def_property_readonly("h", [](const PyIntegrator& i) { return i.mesh().h; })
      .def_property_readonly("params", &PyIntegrator::params);

  m.def("presets", [] {
    std::vector<std::string> names;
    for (const Preset& p : presets()) names.push_back(p.name);
    return names;
  });
  m.def(
      "preset_field",
      [](const std::string& name, int intervals) {
        const Preset& p = find_preset(name);
        return to_numpy(preset_field(name, build_mesh(p.dim, intervals > 0 ? intervals : p.intervals, p.length)));
      },
      py::arg("name"), py::arg("intervals") = 0, "Initial tensor field of a preset.");
  m.def(
      "random_field",
      [](int dim, int intervals, std::uint64_t seed, double amplitude) {
        return to_numpy(random_field(build_mesh(dim, intervals, 1.0), seed, amplitude));
      },
      py::arg("dim"), py::arg("intervals"), py::arg("seed") = 0, py::arg("amplitude") = 0.1);

  m.def(
      "bulk_energy", [](const Array& q, double length, const ModelParams& p) {
        return bulk_energy(from_numpy(q, mesh_of(q, length)), p);
      },
      py::arg("Q"), py::arg("length"), py::arg("params"));
  m.def(
      "elastic_energy", [](const Array& q, double length, const ModelParams& p) {
        return elastic_energy(from_numpy(q, mesh_of(q, length)), p);
      },
      py::arg("Q"), py::arg("length"), py::arg("params"));
  m.def(
      "sup_norm", [](const Array& q) { return frobenius_sup_norm(from_numpy(q, mesh_of(q, 1.0))); }, py::arg("Q"));
  m.def(
      "eigen_gap", [](const Array& q) {
        const Mesh mesh = mesh_of(q, 1.0);
        const ScalarField g = eigen_gap_field(from_numpy(q, mesh), 1.0 / mesh.dim);
        return py::array(py::cast(std::vector<double>(g.values().begin(), g.values().end())));
      },
      py::arg("Q"), "Gap between the two largest eigenvalues of Q + I/d, flat node order.");
  m.def("eta_bound", &eta_bound, py::arg("params"), py::arg("q0_sup"), py::arg("dim"));
  m.def("kappa_min", &kappa_min, py::arg("params"), py::arg("eta"));
  m.def("default_c_star", &default_c_star, py::arg("params"), py::arg("eta"), py::arg("domain_volume"));
  m.def("mbp_tau_max", &mbp_tau_max, py::arg("params"), py::arg("h"), py::arg("dim"), py::arg("g_star"));

  m.def(
      "run",
      [](const std::string& text, const std::vector<std::string>& overrides) {
        const ExperimentConfig cfg = parse_config(text, overrides);
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = run_simulation(cfg);
        }
        py::dict diag;
        auto column = [&](auto get) {
          std::vector<double> v;
          for (const auto& rec : r.records) v.push_back(get(rec));
          return py::array(py::cast(v));
        };
        diag["step"] = column([](const DiagnosticsRecord& d) { return d.step; });
        diag["time"] = column([](const DiagnosticsRecord& d) { return d.time; });
        diag["tau"] = column([](const DiagnosticsRecord& d) { return d.tau; });
        diag["energy"] = column([](const DiagnosticsRecord& d) { return d.energy; });
        diag["sup_norm"] = column([](const DiagnosticsRecord& d) { return d.sup_norm; });
        diag["s"] = column([](const DiagnosticsRecord& d) { return d.s; });
        diag["g"] = column([](const DiagnosticsRecord& d) { return d.g; });
        py::dict out;
        out["Q"] = to_numpy(r.final_state.Q);
        out["s"] = r.final_state.s;
        out["t"] = r.final_state.t;
        out["diagnostics"] = diag;
        out["eta"] = r.mbp.eta;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
      "Parse configuration text and run it to the final time.");
  m.def(
      "convergence_time",
      [](const std::string& text, const std::vector<double>& taus, double ref, const std::vector<std::string>& ov) {
        const ExperimentConfig cfg = parse_config(text, ov);
        py::gil_scoped_release release;
        RateTable t = convergence_study_time(cfg, taus, ref);
        py::gil_scoped_acquire acquire;
        return rates_dict(t);
      },
      py::arg("config"), py::arg("taus"), py::arg("reference_tau"), py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "convergence_space",
      [](const std::string& text, const std::vector<int>& ms, const std::vector<std::string>& ov) {
        const ExperimentConfig cfg = parse_config(text, ov);
        py::gil_scoped_release release;
        RateTable t = convergence_study_space(cfg, ms);
        py::gil_scoped_acquire acquire;
        return rates_dict(t);
      },
      py::arg("config"), py::arg("Ms"), py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "write_snapshot",
      [](const Array& q, double length, const std::filesystem::path& path, const std::string& format) {
        SnapshotFormat f;
        if (format == "vtk") f = SnapshotFormat::vtk;
        else if (format == "csv") f = SnapshotFormat::csv;
        else throw std::invalid_argument("format must be 'vtk' or 'csv'");
        write_snapshot(from_numpy(q, mesh_of(q, length)), path, f);
      },
      py::arg("Q"), py::arg("length"), py::arg("path"), py::arg("format") = "vtk");
}
