#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtflow/harness.hpp"

namespace qtflow {

/// File could not be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV with header step,time,tau,energy,sup_norm,s,g,clamped; reals at 17
/// significant digits so values round-trip exactly.
void write_diagnostics(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path);
std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path);

/// Extra per-node scalar written alongside the tensor.
struct NamedScalar {
  std::string name;
  ScalarField field;
};

/// Field snapshot. VTK (legacy STRUCTURED_POINTS, ASCII) carries every
/// stored component as Q_ij, the unit director of the largest eigenvalue as
/// a vector field (zero where that eigenvalue is degenerate), eigen_gap of
/// Q + I/d, and the extras. CSV writes one row per node with the same data.
void write_snapshot(const QTensorField& q, const std::filesystem::path& path, SnapshotFormat format,
                    const std::vector<NamedScalar>& extras = {});

/// resolution,error_grad,rate_grad,error_L2,rate_L2,error_s,rate_s
void write_rates_csv(const RateTable& table, const std::filesystem::path& path);
/// Aligned text table of the same columns ("---" for missing rates).
std::string format_rate_table(const RateTable& table);

/// One block per preset listing mesh, model constants, scheme and time stepping.
std::string format_presets();

/// "snapshot_000120.vtk" style names.
std::string snapshot_filename(int step, SnapshotFormat format);

}  // namespace qtflow
