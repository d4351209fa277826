#include "qtflow/qtensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qtflow/grid_ops.hpp"

namespace qtflow {

namespace {

constexpr double kSqrt6 = 2.449489742783178098197284;

using Mat3 = std::array<double, 9>;

// tr(Q^2) and tr(Q^3) of a dim x dim block.
double trace_sq(const Mat3& q, int d) {
  double t = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t += q[3 * i + j] * q[3 * i + j];
  return t;
}

Mat3 square(const Mat3& q, int d) {
  Mat3 r{};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += q[3 * i + k] * q[3 * k + j];
      r[3 * i + j] = s;
    }
  return r;
}

double trace_cube(const Mat3& q, int d) {
  const Mat3 q2 = square(q, d);
  double t = 0.0;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) t += q2[3 * i + k] * q[3 * k + i];
  return t;
}

}  // namespace

void validate(const ModelParams& p) {
  if (!(p.c > 0.0)) throw std::invalid_argument("model parameter c must be > 0");
  if (!(p.L1 > 0.0)) throw std::invalid_argument("model parameter L1 must be > 0");
  if (p.b < 0.0) throw std::invalid_argument("model parameter b must be >= 0");
  if (p.kappa < 0.0) throw std::invalid_argument("stabilisation kappa must be >= 0");
}

std::array<double, 9> bulk_force_node(const Mat3& q, int d, const ModelParams& p) {
  const double tr2 = trace_sq(q, d);
  Mat3 f{};
  const double diag_coeff = -p.a - p.c * tr2;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f[3 * i + j] = diag_coeff * q[3 * i + j];
  if (p.b != 0.0) {
    const Mat3 q2 = square(q, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) f[3 * i + j] += p.b * (q2[3 * i + j] - (i == j ? tr2 / d : 0.0));
  }
  return f;
}

QTensorField bulk_force(const QTensorField& q, const ModelParams& p) {
  QTensorField out(q.mesh());
  const int d = q.dim();
  for_each_interior(q.mesh(), [&](std::size_t n, int, int, int) {
    out.set_node_matrix(n, bulk_force_node(q.node_matrix(n), d, p));
  });
  return out;
}

double bulk_density(const Mat3& q, int d, const ModelParams& p) {
  const double tr2 = trace_sq(q, d);
  const double tr3 = p.b != 0.0 ? trace_cube(q, d) : 0.0;
  return 0.5 * p.a * tr2 - p.b / 3.0 * tr3 + 0.25 * p.c * tr2 * tr2;
}

double bulk_energy(const QTensorField& q, const ModelParams& p) {
  double sum = 0.0;
  const int d = q.dim();
  for_each_interior(q.mesh(), [&](std::size_t n, int, int, int) { sum += bulk_density(q.node_matrix(n), d, p); });
  return sum * q.mesh().cell_volume();
}

double elastic_energy(const QTensorField& q, const ModelParams& p) {
  double e = 0.5 * p.L1 * tensor_grad_norm_sq(q);
  const double l23 = p.L23();
  if (l23 != 0.0) {
    double div = 0.0;
    for (const auto& w : tensor_divergence(q)) div += norm_sq(w);
    e += l23 * div;
  }
  return e;
}

double total_energy(const QTensorField& q, double s, const ModelParams& p) { return elastic_energy(q, p) + s; }

double frobenius_sup_norm(const QTensorField& q) {
  const std::size_t nodes = q.mesh().node_count();
  const int d = q.dim();
  double best = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) {
    double sq = 0.0;
    for (int c = 0; c < q.component_count(); ++c) {
      const double v = q.component(c)[n];
      sq += QTensorField::frobenius_weight(d, c) * v * v;
    }
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

double eta_bound(const ModelParams& p, double q0_sup, int dim) {
  if (!(p.c > 0.0)) throw std::invalid_argument("eta_bound: c must be > 0");
  if (q0_sup < 0.0) throw std::invalid_argument("eta_bound: negative sup-norm");
  if (dim == 2) return std::max(q0_sup, std::sqrt(std::max(0.0, -p.a) / p.c));
  if (dim != 3) throw std::invalid_argument("eta_bound: dimension must be 2 or 3");
  if (p.a <= p.b * p.b / (24.0 * p.c)) {
    const double root = (std::abs(p.b) + std::sqrt(p.b * p.b - 24.0 * p.a * p.c)) / (2.0 * kSqrt6 * p.c);
    return std::max(q0_sup, root);
  }
  return q0_sup;
}

double fbar(double xi, const ModelParams& p) { return -p.a * xi + p.b / kSqrt6 * xi * xi - p.c * xi * xi * xi; }

double fbar_prime(double xi, const ModelParams& p) { return -p.a + 2.0 * p.b / kSqrt6 * xi - 3.0 * p.c * xi * xi; }

double kappa_min(const ModelParams& p, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("kappa_min: eta must be > 0");
  double slope = std::max(std::abs(fbar_prime(0.0, p)), std::abs(fbar_prime(eta, p)));
  const double vertex = p.b / (3.0 * kSqrt6 * p.c);
  if (vertex > 0.0 && vertex < eta) slope = std::max(slope, std::abs(fbar_prime(vertex, p)));
  return std::max(p.a + p.c * eta * eta, slope);
}

double default_c_star(const ModelParams& p, double eta, double domain_volume) {
  auto phi = [&](double x) {
    return 0.5 * p.a * x * x - p.b / (3.0 * kSqrt6) * x * x * x + 0.25 * p.c * x * x * x * x;
  };
  double lowest = std::min(phi(0.0), phi(eta));
  // phi'(x) = x (c x^2 - (b/sqrt6) x + a)
  const double bq = -p.b / kSqrt6;
  const double disc = bq * bq - 4.0 * p.c * p.a;
  if (disc >= 0.0) {
    for (double sign : {-1.0, 1.0}) {
      const double x = (-bq + sign * std::sqrt(disc)) / (2.0 * p.c);
      if (x > 0.0 && x < eta) lowest = std::min(lowest, phi(x));
    }
  }
  return -domain_volume * lowest;
}

// ---------------------------------------------------------------------------

namespace {

// Cyclic Jacobi on a symmetric 3x3 matrix. On return `a` is (nearly)
// diagonal and the columns of `v` are the eigenvectors.
void jacobi3(Mat3& a, Mat3& v) {
  v = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  double frob = 0.0;
  for (double x : a) frob += x * x;
  const double tol = std::min(1e-12, 1e-15 * std::sqrt(frob));
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::sqrt(2.0 * (a[1] * a[1] + a[2] * a[2] + a[5] * a[5]));
    if (off <= tol) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        const double apq = a[3 * p + q];
        if (apq == 0.0) continue;
        const double theta = (a[3 * q + q] - a[3 * p + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[3 * k + p], akq = a[3 * k + q];
          a[3 * k + p] = c * akp - s * akq;
          a[3 * k + q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[3 * p + k], aqk = a[3 * q + k];
          a[3 * p + k] = c * apk - s * aqk;
          a[3 * q + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[3 * k + p], vkq = v[3 * k + q];
          v[3 * k + p] = c * vkp - s * vkq;
          v[3 * k + q] = s * vkp + c * vkq;
        }
      }
  }
}

std::array<double, 3> fix_sign(std::array<double, 3> e) {
  std::size_t big = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(e[i]) > std::abs(e[big])) big = i;
  if (e[big] < 0.0)
    for (double& x : e) x = -x;
  return e;
}

}  // namespace

std::array<double, 3> symmetric_eigenvalues(const Mat3& m, int dim) {
  if (dim == 2) {
    const double mean = 0.5 * (m[0] + m[4]);
    const double half = 0.5 * (m[0] - m[4]);
    const double r = std::hypot(half, m[1]);
    return {mean - r, mean + r, 0.0};
  }
  Mat3 a = m, v{};
  jacobi3(a, v);
  std::array<double, 3> ev{a[0], a[4], a[8]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::array<double, 3> dominant_eigenvector(const Mat3& m, int dim) {
  if (dim == 2) {
    const double half = 0.5 * (m[0] - m[4]);
    const double r = std::hypot(half, m[1]);
    if (r == 0.0) return {1.0, 0.0, 0.0};
    // (cos phi, sin phi) with tan(2 phi) = 2 m01 / (m00 - m11).
    const double phi = 0.5 * std::atan2(m[1], half);
    return fix_sign({std::cos(phi), std::sin(phi), 0.0});
  }
  Mat3 a = m, v{};
  jacobi3(a, v);
  int top = 0;
  for (int i = 1; i < 3; ++i)
    if (a[4 * i] > a[4 * top]) top = i;
  std::array<double, 3> e{v[top], v[3 + top], v[6 + top]};
  const double norm = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
  for (double& x : e) x /= norm;
  return fix_sign(e);
}

ScalarField eigen_gap_field(const QTensorField& q, double shift) {
  ScalarField gap(q.mesh());
  const int d = q.dim();
  const std::size_t nodes = q.mesh().node_count();
  for (std::size_t n = 0; n < nodes; ++n) {
    Mat3 m = q.node_matrix(n);
    for (int i = 0; i < d; ++i) m[4 * i] += shift;
    const auto ev = symmetric_eigenvalues(m, d);
    gap[n] = d == 2 ? ev[1] - ev[0] : ev[2] - ev[1];
  }
  return gap;
}

}  // namespace qtflow
