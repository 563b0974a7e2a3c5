#pragma once

#include <vector>

#include "nbv/gain/visibility.hpp"
#include "nbv/occupancy/occupancy.hpp"
#include "nbv/sh/sh.hpp"

namespace nbv {

// Ray-cast ground-truth direction-gain field. For each proxy point the field
// answers "from which directions would a sensor placed far away along that
// direction gain this point's surface neighborhood?", projected onto the
// spherical-harmonic basis.
//
// A proxy contributes zero unless it passes the same static tests as the
// volumetric gain neighborhood: inward shell membership (signed distance in
// [0, mu)), foot alignment cone, and a foot the history has not seen. For a
// passing proxy each probe direction d scores 1 when the segment from the
// foot to a virtual camera at x - standoff * d is unoccluded; the estimator
// applies frustum and range limits itself, so the field stores pure
// per-direction visibility.
class GainFieldOracle {
 public:
  struct Params {
    double mu = 0.05;      // shell half-width
    int n_dirs = 512;      // probe directions (Fibonacci set), >= 64
    double standoff = 0.0; // virtual camera distance; <= 0 picks 2x scene scale
  };

  GainFieldOracle(const MeshQuery& scene, PoseHistory history, const Params& params);

  // Fills proxies.gains and proxies.history_features (sized to the point count).
  void attach(ProxyPointSet& proxies) const;

  // Planner fast path: gains only, history features left empty.
  void attach_gains(ProxyPointSet& proxies) const;

  const std::vector<Vec3>& directions() const { return dirs_; }
  const Params& params() const { return params_; }

 private:
  ShVector gain_at(const Vec3& x, std::vector<double>& values) const;

  const MeshQuery* scene_;
  PoseHistory history_;
  Params params_;
  double standoff_;
  std::vector<Vec3> dirs_;
  ShProjector projector_;
};

}  // namespace nbv
