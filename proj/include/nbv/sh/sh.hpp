#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "nbv/core/vec3.hpp"
#include "nbv/kernels/kernels.hpp"

// Real spherical harmonics up to degree 7 (64 basis functions) with the
// orthonormal, Condon-Shortley-free convention:
//   integral over S2 of Y_l^m * Y_l'^m' dOmega = delta_ll' * delta_mm'.
// Coefficients are stored flat at index l*(l+1)+m for l in 0..7, m in -l..l.

namespace nbv {

inline constexpr int kShCoeffCount = kern::kShCoeffs;

constexpr int sh_index(int l, int m) { return l * (l + 1) + m; }

// A coefficient vector in the 64-function basis. Zero-initialized.
struct ShVector {
  std::array<double, kShCoeffCount> c{};

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  const double& operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  ShVector& operator+=(const ShVector& o) {
    for (int i = 0; i < kShCoeffCount; ++i) c[i] += o.c[i];
    return *this;
  }
  ShVector& operator*=(double s) {
    for (double& v : c) v *= s;
    return *this;
  }
};

inline ShVector operator+(ShVector a, const ShVector& b) { return a += b; }
inline ShVector operator*(ShVector a, double s) { return a *= s; }
inline ShVector operator*(double s, ShVector a) { return a *= s; }

// Basis values at a unit direction. Throws ContractViolation when the input
// is not unit length (tolerance 1e-8 on the norm).
ShVector sh_basis(const Vec3& d);

// Sum over (l,m) of coeffs * basis at d. Linear in coeffs.
double sh_eval(const ShVector& coeffs, const Vec3& d);

double sh_dot(const ShVector& a, const ShVector& b);

// Least-squares projection of sphere-valued samples onto the basis. The
// direction set is fixed at construction; the factorized normal equations are
// reused across calls, so projecting many functions over one set is cheap.
//
// Requires >= 64 directions spanning the basis: the constructor measures the
// design-matrix condition number and throws RankDeficiencyError at 1e6 or
// when the normal equations are singular (e.g. all directions coplanar).
class ShProjector {
 public:
  explicit ShProjector(const std::vector<Vec3>& dirs);

  // values[i] pairs with the i-th construction direction.
  ShVector project(const std::vector<double>& values) const;

  double condition() const { return cond_; }
  std::size_t sample_count() const { return n_; }

 private:
  std::size_t n_ = 0;
  double cond_ = 0.0;
  std::vector<double> pinv_;  // row-major 64 x n pseudo-inverse
};

// One-shot convenience: builds a projector for `dirs` and projects `values`.
ShVector project_directions(const std::vector<Vec3>& dirs,
                            const std::vector<double>& values);

}  // namespace nbv
