// AVX2+FMA lane. Built with -mavx2 -mfma on x86-64 only; runtime-gated by
// cpuid so the binary stays runnable on older CPUs.
//
// dist2_batch and ray_tri_block use mul/add with the same expression tree as
// the scalar lane (no FMA contraction) so their outputs are bit-identical;
// sh_basis and dot64 use FMA and are equivalence-tested to tight tolerances.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "nbv/kernels/kernels.hpp"
#include "sh_tables.hpp"

namespace nbv::kern {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

void sh_basis_batch(const double* xs, const double* ys, const double* zs,
                    std::size_t n, double* out) {
  const auto& T = detail::sh_tables();
  std::size_t i = 0;
  alignas(32) double tmp[kShCoeffs * 4];  // coeff-major staging for 4 points
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d y = _mm256_loadu_pd(ys + i);
    const __m256d z = _mm256_loadu_pd(zs + i);

    __m256d cm[kShBands], sm[kShBands];
    cm[0] = _mm256_set1_pd(1.0);
    sm[0] = _mm256_setzero_pd();
    for (int m = 1; m < kShBands; ++m) {
      cm[m] = _mm256_fmsub_pd(cm[m - 1], x, _mm256_mul_pd(sm[m - 1], y));
      sm[m] = _mm256_fmadd_pd(cm[m - 1], y, _mm256_mul_pd(sm[m - 1], x));
    }

    for (int m = 0; m < kShBands; ++m) {
      auto emit = [&](int l, __m256d p) {
        if (m == 0) {
          _mm256_store_pd(tmp + 4 * (l * (l + 1)), _mm256_mul_pd(_mm256_set1_pd(T.k0[l]), p));
        } else {
          const __m256d kp = _mm256_mul_pd(_mm256_set1_pd(T.k[l][m]), p);
          _mm256_store_pd(tmp + 4 * (l * (l + 1) + m), _mm256_mul_pd(kp, cm[m]));
          _mm256_store_pd(tmp + 4 * (l * (l + 1) - m), _mm256_mul_pd(kp, sm[m]));
        }
      };
      __m256d pmm = _mm256_set1_pd(T.dfact[m]);
      emit(m, pmm);
      if (m + 1 < kShBands) {
        __m256d pl1 = _mm256_mul_pd(_mm256_mul_pd(z, _mm256_set1_pd(2.0 * m + 1.0)), pmm);
        emit(m + 1, pl1);
        __m256d pl2 = pmm;
        for (int l = m + 2; l < kShBands; ++l) {
          const __m256d a = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0 * l - 1.0), z), pl1);
          const __m256d b = _mm256_mul_pd(_mm256_set1_pd(l + m - 1.0), pl2);
          const __m256d pl =
              _mm256_mul_pd(_mm256_sub_pd(a, b), _mm256_set1_pd(1.0 / (l - m)));
          emit(l, pl);
          pl2 = pl1;
          pl1 = pl;
        }
      }
    }

    for (int p = 0; p < 4; ++p) {
      double* dst = out + (i + p) * kShCoeffs;
      for (int c = 0; c < kShCoeffs; ++c) dst[c] = tmp[4 * c + p];
    }
  }
  if (i < n) scalar_kernels().sh_basis_batch(xs + i, ys + i, zs + i, n - i, out + i * kShCoeffs);
}

double dot64(const double* a, const double* b) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (int c = 0; c < kShCoeffs; c += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + c), _mm256_loadu_pd(b + c), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + c + 4), _mm256_loadu_pd(b + c + 4), acc1);
  }
  return hsum(_mm256_add_pd(acc0, acc1));
}

void dot64_batch(const double* a, const double* b, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot64(a + i * kShCoeffs, b + i * kShCoeffs);
}

void dist2_batch(double px, double py, double pz, const double* xs, const double* ys,
                 const double* zs, std::size_t n, double* out) {
  const __m256d qx = _mm256_set1_pd(px), qy = _mm256_set1_pd(py), qz = _mm256_set1_pd(pz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), qx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), qy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), qz);
    const __m256d d2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
    _mm256_storeu_pd(out + i, d2);
  }
  if (i < n) scalar_kernels().dist2_batch(px, py, pz, xs + i, ys + i, zs + i, n - i, out + i);
}

bool any_within(double px, double py, double pz, const double* xs, const double* ys,
                const double* zs, std::size_t n, double r2) {
  const __m256d qx = _mm256_set1_pd(px), qy = _mm256_set1_pd(py), qz = _mm256_set1_pd(pz);
  const __m256d rr = _mm256_set1_pd(r2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), qx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), qy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), qz);
    const __m256d d2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
    if (_mm256_movemask_pd(_mm256_cmp_pd(d2, rr, _CMP_LT_OQ)) != 0) return true;
  }
  return i < n && scalar_kernels().any_within(px, py, pz, xs + i, ys + i, zs + i, n - i, r2);
}

void ray_tri_block(const double origin[3], const double dir[3],
                   const double* v0x, const double* v0y, const double* v0z,
                   const double* e1x, const double* e1y, const double* e1z,
                   const double* e2x, const double* e2y, const double* e2z,
                   std::size_t n, double graze_eps,
                   double* t_out, std::uint8_t* hit_out, std::uint8_t* graze_out) {
  const __m256d ox = _mm256_set1_pd(origin[0]);
  const __m256d oy = _mm256_set1_pd(origin[1]);
  const __m256d oz = _mm256_set1_pd(origin[2]);
  const __m256d dx = _mm256_set1_pd(dir[0]);
  const __m256d dy = _mm256_set1_pd(dir[1]);
  const __m256d dz = _mm256_set1_pd(dir[2]);
  const __m256d eps = _mm256_set1_pd(graze_eps);
  const __m256d neg_eps = _mm256_set1_pd(-graze_eps);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d one_p_eps = _mm256_set1_pd(1.0 + graze_eps);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d huge = _mm256_set1_pd(std::numeric_limits<double>::max());
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

  std::size_t i = 0;
  alignas(32) double tbuf[4];
  for (; i + 4 <= n; i += 4) {
    const __m256d E1x = _mm256_loadu_pd(e1x + i), E1y = _mm256_loadu_pd(e1y + i),
                  E1z = _mm256_loadu_pd(e1z + i);
    const __m256d E2x = _mm256_loadu_pd(e2x + i), E2y = _mm256_loadu_pd(e2y + i),
                  E2z = _mm256_loadu_pd(e2z + i);

    // Same expression tree as scalar (no FMA) for bit-identical decisions.
    const __m256d px = _mm256_sub_pd(_mm256_mul_pd(dy, E2z), _mm256_mul_pd(dz, E2y));
    const __m256d py = _mm256_sub_pd(_mm256_mul_pd(dz, E2x), _mm256_mul_pd(dx, E2z));
    const __m256d pz = _mm256_sub_pd(_mm256_mul_pd(dx, E2y), _mm256_mul_pd(dy, E2x));
    const __m256d det = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(E1x, px), _mm256_mul_pd(E1y, py)), _mm256_mul_pd(E1z, pz));

    const __m256d inv_det = _mm256_div_pd(one, det);
    const __m256d sx = _mm256_sub_pd(ox, _mm256_loadu_pd(v0x + i));
    const __m256d sy = _mm256_sub_pd(oy, _mm256_loadu_pd(v0y + i));
    const __m256d sz = _mm256_sub_pd(oz, _mm256_loadu_pd(v0z + i));
    const __m256d u = _mm256_mul_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(sx, px), _mm256_mul_pd(sy, py)),
                      _mm256_mul_pd(sz, pz)),
        inv_det);

    const __m256d qx = _mm256_sub_pd(_mm256_mul_pd(sy, E1z), _mm256_mul_pd(sz, E1y));
    const __m256d qy = _mm256_sub_pd(_mm256_mul_pd(sz, E1x), _mm256_mul_pd(sx, E1z));
    const __m256d qz = _mm256_sub_pd(_mm256_mul_pd(sx, E1y), _mm256_mul_pd(sy, E1x));
    const __m256d v = _mm256_mul_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, qx), _mm256_mul_pd(dy, qy)),
                      _mm256_mul_pd(dz, qz)),
        inv_det);
    const __m256d t = _mm256_mul_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(E2x, qx), _mm256_mul_pd(E2y, qy)),
                      _mm256_mul_pd(E2z, qz)),
        inv_det);

    const __m256d det_nonzero = _mm256_cmp_pd(det, zero, _CMP_NEQ_OQ);
    auto finite = [&](__m256d x) {
      return _mm256_cmp_pd(_mm256_and_pd(x, abs_mask), huge, _CMP_LE_OQ);
    };
    const __m256d all_finite =
        _mm256_and_pd(finite(u), _mm256_and_pd(finite(v), finite(t)));

    const __m256d w = _mm256_add_pd(u, v);
    const __m256d hit = _mm256_and_pd(
        _mm256_and_pd(_mm256_cmp_pd(u, neg_eps, _CMP_GE_OQ),
                      _mm256_cmp_pd(v, neg_eps, _CMP_GE_OQ)),
        _mm256_and_pd(_mm256_cmp_pd(w, one_p_eps, _CMP_LE_OQ),
                      _mm256_cmp_pd(t, zero, _CMP_GT_OQ)));
    const __m256d near_edge = _mm256_or_pd(
        _mm256_or_pd(
            _mm256_cmp_pd(_mm256_and_pd(u, abs_mask), eps, _CMP_LE_OQ),
            _mm256_cmp_pd(_mm256_and_pd(v, abs_mask), eps, _CMP_LE_OQ)),
        _mm256_cmp_pd(_mm256_and_pd(_mm256_sub_pd(one, w), abs_mask), eps, _CMP_LE_OQ));

    const int m_dnz = _mm256_movemask_pd(det_nonzero);
    const int m_fin = _mm256_movemask_pd(all_finite);
    const int m_hit = _mm256_movemask_pd(hit);
    const int m_edge = _mm256_movemask_pd(near_edge);
    const int m_tpos = _mm256_movemask_pd(_mm256_cmp_pd(t, zero, _CMP_GT_OQ));
    _mm256_store_pd(tbuf, t);

    for (int k = 0; k < 4; ++k) {
      const int bit = 1 << k;
      t_out[i + k] = std::numeric_limits<double>::infinity();
      hit_out[i + k] = 0;
      graze_out[i + k] = 0;
      if (!(m_dnz & bit)) continue;
      if (!(m_fin & bit)) {
        graze_out[i + k] = 1;
        continue;
      }
      if (m_hit & bit) {
        hit_out[i + k] = 1;
        t_out[i + k] = tbuf[k];
        if (m_edge & bit) graze_out[i + k] = 1;
      } else if ((m_edge & bit) && (m_tpos & bit)) {
        graze_out[i + k] = 1;
      }
    }
    (void)inf;
  }
  if (i < n) {
    scalar_kernels().ray_tri_block(origin, dir, v0x + i, v0y + i, v0z + i, e1x + i, e1y + i,
                                   e1z + i, e2x + i, e2y + i, e2z + i, n - i, graze_eps,
                                   t_out + i, hit_out + i, graze_out + i);
  }
}

}  // namespace

const Dispatch* avx2_kernels_or_null() {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
  static const Dispatch d{
      "avx2", &sh_basis_batch, &dot64_batch, &dot64,
      &dist2_batch, &any_within, &ray_tri_block,
  };
  return &d;
}

}  // namespace nbv::kern
