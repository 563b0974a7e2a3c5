#pragma once

#include <cmath>

#include "nbv/kernels/kernels.hpp"

// Normalization tables shared by the scalar and SIMD SH kernels so every lane
// multiplies by bit-identical constants.
//
// Basis convention: real orthonormal ("physics"-normalized) spherical
// harmonics without the Condon-Shortley phase,
//   Y_l^0      = K(l,0) P_l(z)
//   Y_l^{+m}   = sqrt(2) K(l,m) P_l^m(z) cos(m phi)
//   Y_l^{-m}   = sqrt(2) K(l,m) P_l^m(z) sin(m phi)
//   K(l,m)     = sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!)
// stored flat at index l*(l+1)+m.
//
// The kernels evaluate the z-polynomial part p_l^m = P_l^m / sin^m(theta)
// (finite at the poles) and recover sin^m(theta)*{cos,sin}(m phi) from the
// real/imaginary parts of (x + i y)^m, so no trig calls are needed.

namespace nbv::kern::detail {

struct ShTables {
  double k0[kShBands];                // K(l,0)
  double k[kShBands][kShBands];       // sqrt(2)*K(l,m) for m >= 1
  double dfact[kShBands];             // (2m-1)!!

  ShTables() {
    const double four_pi = 4.0 * 3.14159265358979323846;
    auto fact = [](int n) {
      double f = 1.0;
      for (int i = 2; i <= n; ++i) f *= i;
      return f;
    };
    for (int l = 0; l < kShBands; ++l) {
      k0[l] = std::sqrt((2.0 * l + 1.0) / four_pi);
      for (int m = 1; m <= l; ++m) {
        k[l][m] = std::sqrt(2.0) *
                  std::sqrt((2.0 * l + 1.0) / four_pi * fact(l - m) / fact(l + m));
      }
    }
    for (int m = 0; m < kShBands; ++m) {
      double d = 1.0;
      for (int i = 3; i <= 2 * m - 1; i += 2) d *= i;
      dfact[m] = d;
    }
  }
};

inline const ShTables& sh_tables() {
  static const ShTables t;
  return t;
}

}  // namespace nbv::kern::detail
