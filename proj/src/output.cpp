#include "qtflow/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qtflow {

namespace {

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

std::string g17(double x) { return fmt("%.17g", x); }
std::string g12(double x) { return fmt("%.12g", x); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::string component_name(int dim, int c) {
  const auto [i, j] = QTensorField::component_ij(dim, c);
  return "Q_" + std::to_string(i + 1) + std::to_string(j + 1);
}

struct NodeData {
  ScalarField gap;
  std::vector<std::array<double, 3>> director;
};

NodeData node_data(const QTensorField& q) {
  const int d = q.dim();
  NodeData nd{eigen_gap_field(q, 1.0 / d), {}};
  const std::size_t nodes = q.mesh().node_count();
  nd.director.resize(nodes);
  for (std::size_t n = 0; n < nodes; ++n) {
    if (nd.gap[n] <= 1e-12) nd.director[n] = {0.0, 0.0, 0.0};
    else nd.director[n] = dominant_eigenvector(q.node_matrix(n), d);
  }
  return nd;
}

void check_extras(const QTensorField& q, const std::vector<NamedScalar>& extras) {
  for (const auto& e : extras)
    if (!(e.field.mesh() == q.mesh())) throw std::invalid_argument("snapshot extra '" + e.name + "' is on another mesh");
}

void write_vtk(const QTensorField& q, const std::filesystem::path& path, const std::vector<NamedScalar>& extras) {
  const Mesh& mesh = q.mesh();
  const NodeData nd = node_data(q);
  const int n = mesh.nodes_per_axis();
  const std::size_t nodes = mesh.node_count();
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n"
      << "qtflow Q-tensor snapshot\n"
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << n << ' ' << n << ' ' << (mesh.dim == 3 ? n : 1) << '\n'
      << "ORIGIN 0 0 0\n"
      << "SPACING " << g17(mesh.h) << ' ' << g17(mesh.h) << ' ' << g17(mesh.h) << '\n'
      << "POINT_DATA " << nodes << '\n';
  auto scalars = [&](const std::string& name, const ScalarField& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t k = 0; k < nodes; ++k) out << g12(f[k]) << '\n';
  };
  for (int c = 0; c < q.component_count(); ++c) scalars(component_name(mesh.dim, c), q.component(c));
  out << "VECTORS director double\n";
  for (const auto& v : nd.director) out << g12(v[0]) << ' ' << g12(v[1]) << ' ' << g12(v[2]) << '\n';
  scalars("eigen_gap", nd.gap);
  for (const auto& e : extras) scalars(e.name, e.field);
  finish(out, path);
}

void write_node_csv(const QTensorField& q, const std::filesystem::path& path, const std::vector<NamedScalar>& extras) {
  const Mesh& mesh = q.mesh();
  const NodeData nd = node_data(q);
  const int n = mesh.nodes_per_axis();
  std::ofstream out = open_out(path);
  out << "i,j,k,x,y,z";
  for (int c = 0; c < q.component_count(); ++c) out << ',' << component_name(mesh.dim, c);
  out << ",director_x,director_y,director_z,eigen_gap";
  for (const auto& e : extras) out << ',' << e.name;
  out << '\n';
  const int k_hi = mesh.dim == 3 ? n - 1 : 0;
  for (int k = 0; k <= k_hi; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t f = mesh.index(i, j, k);
        out << i << ',' << j << ',' << k << ',' << g17(i * mesh.h) << ',' << g17(j * mesh.h) << ','
            << g17(k * mesh.h);
        for (int c = 0; c < q.component_count(); ++c) out << ',' << g17(q.component(c)[f]);
        const auto& v = nd.director[f];
        out << ',' << g17(v[0]) << ',' << g17(v[1]) << ',' << g17(v[2]) << ',' << g17(nd.gap[f]);
        for (const auto& e : extras) out << ',' << g17(e.field[f]);
        out << '\n';
      }
  finish(out, path);
}

std::string rate_cell(double r) { return std::isnan(r) ? "---" : fmt("%.2f", r); }

}  // namespace

void write_diagnostics(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("write_diagnostics: no records");
  std::ofstream out = open_out(path);
  out << "step,time,tau,energy,sup_norm,s,g,clamped\n";
  for (const auto& r : records)
    out << r.step << ',' << g17(r.time) << ',' << g17(r.tau) << ',' << g17(r.energy) << ',' << g17(r.sup_norm) << ','
        << g17(r.s) << ',' << g17(r.g) << ',' << (r.clamped ? 1 : 0) << '\n';
  finish(out, path);
}

std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != "step,time,tau,energy,sup_norm,s,g,clamped")
    throw IoError("'" + path.string() + "' is not a diagnostics file");
  std::vector<DiagnosticsRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 8) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 8 columns");
    DiagnosticsRecord r;
    r.step = std::atoi(cells[0].c_str());
    r.time = std::strtod(cells[1].c_str(), nullptr);
    r.tau = std::strtod(cells[2].c_str(), nullptr);
    r.energy = std::strtod(cells[3].c_str(), nullptr);
    r.sup_norm = std::strtod(cells[4].c_str(), nullptr);
    r.s = std::strtod(cells[5].c_str(), nullptr);
    r.g = std::strtod(cells[6].c_str(), nullptr);
    r.clamped = cells[7] == "1";
    out.push_back(r);
  }
  return out;
}

void write_snapshot(const QTensorField& q, const std::filesystem::path& path, SnapshotFormat format,
                    const std::vector<NamedScalar>& extras) {
  check_extras(q, extras);
  if (format == SnapshotFormat::vtk) write_vtk(q, path, extras);
  else write_node_csv(q, path, extras);
}

void write_rates_csv(const RateTable& table, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << table.variable << ",error_grad,rate_grad,error_L2,rate_L2,error_s,rate_s\n";
  auto cell = [](double r) { return std::isnan(r) ? std::string() : g17(r); };
  for (const auto& r : table.rows)
    out << g17(r.resolution) << ',' << g17(r.error_grad) << ',' << cell(r.rate_grad) << ',' << g17(r.error_L2) << ','
        << cell(r.rate_L2) << ',' << g17(r.error_s) << ',' << cell(r.rate_s) << '\n';
  finish(out, path);
}

std::string format_rate_table(const RateTable& table) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %-12s %-6s %-12s %-6s %-12s %-6s\n", table.variable.c_str(), "|grad e_Q|",
                "rate", "|e_Q|", "rate", "|e_s|", "rate");
  os << buf;
  for (const auto& r : table.rows) {
    const std::string res = r.resolution > 0 && r.resolution < 1 ? "1/" + fmt("%.6g", 1.0 / r.resolution)
                                                                   : fmt("%.6g", r.resolution);
    std::snprintf(buf, sizeof buf, "%-12s %-12.3e %-6s %-12.3e %-6s %-12.3e %-6s\n", res.c_str(), r.error_grad,
                  rate_cell(r.rate_grad).c_str(), r.error_L2, rate_cell(r.rate_L2).c_str(), r.error_s,
                  rate_cell(r.rate_s).c_str());
    os << buf;
  }
  return os.str();
}

std::string format_presets() {
  std::ostringstream os;
  for (const Preset& p : presets()) {
    const ModelParams& m = p.params;
    os << p.name << ": " << p.description << '\n'
       << "  mesh    dim=" << p.dim << " intervals=" << p.intervals << " length=" << p.length << '\n'
       << "  model   a=" << m.a << " b=" << m.b << " c=" << m.c << " L1=" << m.L1 << " L2=" << m.L2
       << " L3=" << m.L3 << " kappa=" << m.kappa << " c_star=" << m.c_star << '\n'
       << "  scheme  " << to_string(p.scheme) << '\n'
       << "  time    T=" << p.T;
    if (p.adaptive)
      os << " adaptive tau_min=" << p.controller.tau_min << " tau_max=" << p.controller.tau_max
         << " alpha=" << p.controller.alpha;
    else
      os << " tau=" << p.tau;
    os << '\n';
  }
  return os.str();
}

std::string snapshot_filename(int step, SnapshotFormat format) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%06d.%s", step, format == SnapshotFormat::vtk ? "vtk" : "csv");
  return buf;
}

}  // namespace qtflow
