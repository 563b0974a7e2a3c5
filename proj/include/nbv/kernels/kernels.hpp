#pragma once

#include <cstddef>
#include <cstdint>

// Batched numeric kernels behind a runtime-dispatched table: a portable
// scalar reference implementation plus an AVX2+FMA variant selected on CPUs
// that support it. Every entry point computes the same contract; the unit
// suite cross-checks the lanes on random inputs.
//
// Selection: highest supported lane wins. Env var NBV_KERNELS=scalar|avx2
// forces a lane (used by the equivalence tests and for debugging).

namespace nbv::kern {

// Real spherical-harmonics band limit: l = 0..7 -> 64 coefficients.
inline constexpr int kShBands = 8;
inline constexpr int kShCoeffs = kShBands * kShBands;

struct Dispatch {
  const char* name;

  // Real orthonormal SH basis (no Condon-Shortley phase) for n unit
  // directions given as SoA arrays; out is row-major, 64 values per point.
  void (*sh_basis_batch)(const double* xs, const double* ys, const double* zs,
                         std::size_t n, double* out);

  // out[i] = dot(a + 64*i, b + 64*i) for i in [0, n).
  void (*dot64_batch)(const double* a, const double* b, std::size_t n, double* out);

  double (*dot64)(const double* a, const double* b);

  // Squared distances from point p to n SoA points. No FMA contraction in
  // any lane so results are bit-identical across lanes.
  void (*dist2_batch)(double px, double py, double pz, const double* xs,
                      const double* ys, const double* zs, std::size_t n, double* out);

  // True iff some point lies strictly within squared radius r2 of p.
  bool (*any_within)(double px, double py, double pz, const double* xs,
                     const double* ys, const double* zs, std::size_t n, double r2);

  // Moller-Trumbore over a block of n triangles (SoA: base vertex v0 and
  // edges e1 = v1-v0, e2 = v2-v0) against one ray. Per-triangle outputs:
  // hit flag, ray parameter t (valid when hit), and a graze flag raised when
  // the barycentric solution sits within `graze_eps` of a face boundary or
  // the ray is near-parallel to the plane. Misses still set graze when the
  // rejection was marginal, so callers can re-cast with jitter.
  void (*ray_tri_block)(const double origin[3], const double dir[3],
                        const double* v0x, const double* v0y, const double* v0z,
                        const double* e1x, const double* e1y, const double* e1z,
                        const double* e2x, const double* e2y, const double* e2z,
                        std::size_t n, double graze_eps,
                        double* t_out, std::uint8_t* hit_out, std::uint8_t* graze_out);
};

// Reference lane (always available).
const Dispatch& scalar_kernels();

// AVX2+FMA lane, or nullptr when unsupported by the build or the CPU.
const Dispatch* avx2_kernels_or_null();

// Runtime-selected lane honoring NBV_KERNELS; resolved once per process.
const Dispatch& active();

}  // namespace nbv::kern
