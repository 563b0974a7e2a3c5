#pragma once

#include <cstddef>
#include <vector>

#include "nbv/core/vec3.hpp"

namespace nbv {

// Deterministic near-uniform unit directions (Fibonacci spiral).  Latitudes
// sit at z = 1 - 2(i+0.5)/n, so no sample lands exactly on a pole or on the
// equator for even n.
std::vector<Vec3> fibonacci_directions(std::size_t n);

// 2*half_n directions: a Fibonacci set plus its exact antipodes.  Projecting
// an even function over this set yields (numerically) vanishing odd-degree
// coefficients because the design decouples into even/odd blocks.
std::vector<Vec3> symmetric_fibonacci_directions(std::size_t half_n);

// Gauss-Legendre nodes/weights on [-1, 1]; exact for polynomials of degree
// <= 2n-1.  Nodes are returned in ascending order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

// Product quadrature on the unit sphere: Gauss-Legendre in cos(theta) times
// a uniform (half-offset) azimuth grid.  Weights sum to 4*pi.  With
// n_polar=16, n_azimuth=32 it integrates every product of two basis functions
// of degree <= 7 exactly, which makes the Gram matrix identity to roundoff.
struct SphereQuadrature {
  std::vector<Vec3> dirs;
  std::vector<double> weights;
};
SphereQuadrature product_quadrature(int n_polar = 16, int n_azimuth = 32);

}  // namespace nbv
