#include "qtflow/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace qtflow {

std::vector<double> axis_eigenvalues(int intervals, double h) {
  if (intervals < 2 || !(h > 0.0)) throw std::invalid_argument("axis_eigenvalues: need M >= 2 and h > 0");
  std::vector<double> lambda(static_cast<std::size_t>(intervals - 1));
  for (int k = 1; k < intervals; ++k) {
    const double s = std::sin(k * std::numbers::pi / (2.0 * intervals));
    lambda[k - 1] = -4.0 / (h * h) * s * s;
  }
  return lambda;
}

DirichletSpectrum dirichlet_spectrum(const Mesh& mesh) {
  return DirichletSpectrum{mesh, axis_eigenvalues(mesh.intervals, mesh.h)};
}

std::vector<double> DirichletSpectrum::kronecker_eigenvalues() const {
  const std::size_t n = eigenvalues.size();
  std::vector<double> out;
  out.reserve(mesh.interior_count());
  const std::size_t nz = mesh.dim == 3 ? n : 1;
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        out.push_back(eigenvalues[i] + eigenvalues[j] + (mesh.dim == 3 ? eigenvalues[k] : 0.0));
  return out;
}

// ---------------------------------------------------------------------------

namespace {
// FFTW planning touches global state; execution of an existing plan is
// thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SineTransform::Plan {
  fftw_plan handle = nullptr;
  ~Plan() {
    if (handle) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(handle);
    }
  }
};

SineTransform::SineTransform(const Mesh& mesh) : mesh_(mesh), plan_(std::make_unique<Plan>()) {
  const int n = mesh.intervals - 1;
  if (n < 1) throw std::invalid_argument("SineTransform: mesh too small");
  std::vector<int> dims(static_cast<std::size_t>(mesh.dim), n);
  std::vector<fftw_r2r_kind> kinds(static_cast<std::size_t>(mesh.dim), FFTW_RODFT00);
  std::vector<double> scratch(mesh.interior_count());
  {
    std::lock_guard lock(planner_mutex());
    // In-place plan: raw() copies the input into the output array first.
    plan_->handle = fftw_plan_r2r(mesh.dim, dims.data(), scratch.data(), scratch.data(), kinds.data(),
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!plan_->handle) throw std::runtime_error("SineTransform: FFTW planning failed");
  // RODFT00 of length n is 2 * sum x_j sin(pi (j+1)(k+1)/(n+1)); the
  // orthonormal transform divides by sqrt(2 (n+1)) = sqrt(2M) per axis.
  scale_ = std::pow(2.0 * mesh.intervals, -0.5 * mesh.dim);
}

SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

void SineTransform::raw(std::span<const double> in, std::span<double> out) const {
  if (in.size() != size() || out.size() != size()) throw std::invalid_argument("SineTransform: size mismatch");
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  fftw_execute_r2r(plan_->handle, out.data(), out.data());
}

void SineTransform::forward(std::span<const double> in, std::span<double> out) const {
  raw(in, out);
  for (double& v : out) v *= scale_;
}

void gather_interior(const ScalarField& u, std::span<double> packed) {
  auto values = u.values();
  std::size_t p = 0;
  for_each_interior(u.mesh(), [&](std::size_t n, int, int, int) { packed[p++] = values[n]; });
}

void scatter_interior(std::span<const double> packed, ScalarField& u) {
  auto values = u.values();
  std::size_t p = 0;
  for_each_interior(u.mesh(), [&](std::size_t n, int, int, int) { values[n] = packed[p++]; });
}

}  // namespace qtflow
