#include "nbv/sh/sphere_dirs.hpp"

#include <cmath>

#include "nbv/core/errors.hpp"

namespace nbv {

std::vector<Vec3> fibonacci_directions(std::size_t n) {
  if (n == 0) throw InvalidInput("fibonacci_directions: n must be positive");
  // Golden angle in radians.
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = ga * static_cast<double>(i);
    dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return dirs;
}

std::vector<Vec3> symmetric_fibonacci_directions(std::size_t half_n) {
  std::vector<Vec3> dirs = fibonacci_directions(half_n);
  dirs.reserve(2 * half_n);
  for (std::size_t i = 0; i < half_n; ++i) dirs.push_back(-dirs[i]);
  return dirs;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("gauss_legendre: n must be positive");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  // Newton iteration per root, seeded with the Chebyshev-like estimate.
  // Roots are symmetric, so solve the lower half and mirror.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Three-term recurrence for P_n(x) and its derivative.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;  // ascending order: most negative root first
    gl.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

SphereQuadrature product_quadrature(int n_polar, int n_azimuth) {
  if (n_polar < 1 || n_azimuth < 1)
    throw InvalidInput("product_quadrature: node counts must be positive");
  const GaussLegendre gl = gauss_legendre(n_polar);
  SphereQuadrature q;
  q.dirs.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  q.weights.reserve(q.dirs.capacity());
  const double wphi = 2.0 * M_PI / static_cast<double>(n_azimuth);
  for (int i = 0; i < n_polar; ++i) {
    const double z = gl.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = wphi * (static_cast<double>(j) + 0.5);
      q.dirs.push_back({s * std::cos(phi), s * std::sin(phi), z});
      q.weights.push_back(gl.weights[i] * wphi);
    }
  }
  return q;
}

}  // namespace nbv
