#include <cmath>
#include <limits>

#include "nbv/kernels/kernels.hpp"
#include "sh_tables.hpp"

// Scalar reference lane. Straight-line portable C++; the SIMD lanes must
// reproduce these results (bit-identical where the header says so).

namespace nbv::kern {
namespace {

void sh_basis_point(double x, double y, double z, double* out) {
  const auto& T = detail::sh_tables();

  // cos(m phi) sin^m and sin(m phi) sin^m via (x + i y)^m.
  double cm[kShBands], sm[kShBands];
  cm[0] = 1.0;
  sm[0] = 0.0;
  for (int m = 1; m < kShBands; ++m) {
    cm[m] = cm[m - 1] * x - sm[m - 1] * y;
    sm[m] = cm[m - 1] * y + sm[m - 1] * x;
  }

  for (int m = 0; m < kShBands; ++m) {
    auto emit = [&](int l, double p) {
      if (m == 0) {
        out[l * (l + 1)] = T.k0[l] * p;
      } else {
        out[l * (l + 1) + m] = T.k[l][m] * p * cm[m];
        out[l * (l + 1) - m] = T.k[l][m] * p * sm[m];
      }
    };
    double pmm = T.dfact[m];
    emit(m, pmm);
    if (m + 1 < kShBands) {
      double pl1 = z * (2.0 * m + 1.0) * pmm;
      emit(m + 1, pl1);
      double pl2 = pmm;
      for (int l = m + 2; l < kShBands; ++l) {
        const double pl = ((2.0 * l - 1.0) * z * pl1 - (l + m - 1.0) * pl2) / (l - m);
        emit(l, pl);
        pl2 = pl1;
        pl1 = pl;
      }
    }
  }
}

void sh_basis_batch(const double* xs, const double* ys, const double* zs,
                    std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) sh_basis_point(xs[i], ys[i], zs[i], out + i * kShCoeffs);
}

double dot64(const double* a, const double* b) {
  double acc = 0.0;
  for (int i = 0; i < kShCoeffs; ++i) acc += a[i] * b[i];
  return acc;
}

void dot64_batch(const double* a, const double* b, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot64(a + i * kShCoeffs, b + i * kShCoeffs);
}

void dist2_batch(double px, double py, double pz, const double* xs, const double* ys,
                 const double* zs, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    const double dz = zs[i] - pz;
    out[i] = (dx * dx + dy * dy) + dz * dz;
  }
}

bool any_within(double px, double py, double pz, const double* xs, const double* ys,
                const double* zs, std::size_t n, double r2) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    const double dz = zs[i] - pz;
    if ((dx * dx + dy * dy) + dz * dz < r2) return true;
  }
  return false;
}

void ray_tri_block(const double origin[3], const double dir[3],
                   const double* v0x, const double* v0y, const double* v0z,
                   const double* e1x, const double* e1y, const double* e1z,
                   const double* e2x, const double* e2y, const double* e2z,
                   std::size_t n, double graze_eps,
                   double* t_out, std::uint8_t* hit_out, std::uint8_t* graze_out) {
  const double ox = origin[0], oy = origin[1], oz = origin[2];
  const double dx = dir[0], dy = dir[1], dz = dir[2];
  for (std::size_t i = 0; i < n; ++i) {
    // Moller-Trumbore with epsilon margins on the barycentric bounds.
    const double px = dy * e2z[i] - dz * e2y[i];
    const double py = dz * e2x[i] - dx * e2z[i];
    const double pz2 = dx * e2y[i] - dy * e2x[i];
    const double det = e1x[i] * px + e1y[i] * py + e1z[i] * pz2;

    t_out[i] = std::numeric_limits<double>::infinity();
    hit_out[i] = 0;
    graze_out[i] = 0;
    if (det == 0.0) continue;

    const double inv_det = 1.0 / det;
    const double sx = ox - v0x[i], sy = oy - v0y[i], sz = oz - v0z[i];
    const double u = (sx * px + sy * py + sz * pz2) * inv_det;

    const double qx = sy * e1z[i] - sz * e1y[i];
    const double qy = sz * e1x[i] - sx * e1z[i];
    const double qz = sx * e1y[i] - sy * e1x[i];
    const double v = (dx * qx + dy * qy + dz * qz) * inv_det;
    const double t = (e2x[i] * qx + e2y[i] * qy + e2z[i] * qz) * inv_det;

    if (!std::isfinite(u) || !std::isfinite(v) || !std::isfinite(t)) {
      graze_out[i] = 1;
      continue;
    }
    const double w = u + v;
    const bool hit = u >= -graze_eps && v >= -graze_eps && w <= 1.0 + graze_eps && t > 0.0;
    const bool near_edge = std::abs(u) <= graze_eps || std::abs(v) <= graze_eps ||
                           std::abs(1.0 - w) <= graze_eps;
    if (hit) {
      hit_out[i] = 1;
      t_out[i] = t;
      if (near_edge) graze_out[i] = 1;
    } else if (near_edge && t > 0.0) {
      // Marginal reject: the true intersection may sit on the shared edge of
      // the neighboring face. Flag so the caller can re-cast with jitter.
      graze_out[i] = 1;
    }
  }
}

}  // namespace

const Dispatch& scalar_kernels() {
  static const Dispatch d{
      "scalar", &sh_basis_batch, &dot64_batch, &dot64,
      &dist2_batch, &any_within, &ray_tri_block,
  };
  return d;
}

}  // namespace nbv::kern
