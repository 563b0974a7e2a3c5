#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nbv/core/vec3.hpp"
#include "nbv/geometry/queries.hpp"
#include "nbv/sensor/cloud.hpp"
#include "nbv/sensor/depth.hpp"
#include "nbv/sh/sh.hpp"

namespace nbv {

// Occupancy probability field sigma-hat: [0, 1] everywhere, 1 = certainly
// solid. Implementations must be deterministic pure functions of their state.
class OccupancyField {
 public:
  virtual ~OccupancyField() = default;
  virtual double occupancy(const Vec3& x) const = 0;
};

// Ground-truth occupancy from the mesh inside test: exactly 1 inside, 0
// outside (and 0 everywhere for an empty scene).
class OracleOccupancy : public OccupancyField {
 public:
  explicit OracleOccupancy(const MeshQuery& query) : query_(&query) {}
  double occupancy(const Vec3& x) const override {
    return !query_->empty() && query_->point_inside(x) ? 1.0 : 0.0;
  }

 private:
  const MeshQuery* query_;
};

// Space-carving occupancy over a regular grid. Voxels start unknown; each
// depth map carves the voxels a returning ray traverses before its hit to
// observed-free and marks the hit voxel observed-surface. Transitions only
// leave the unknown state — observed-free never increases again, and a later
// pass-through never demotes observed-surface. Within one update a voxel both
// traversed and hit counts as hit.
//
// Queries blend in the reconstructed cloud when one is attached: any point
// within eps_cloud of a stored point reads surface_value regardless of its
// voxel. Points outside the grid read free_value (the grid bounds the scene).
class CarvingGrid : public OccupancyField {
 public:
  struct Params {
    int resolution = 64;          // voxels per axis
    double free_value = 0.02;     // sigma-hat of observed-free space
    double surface_value = 0.95;  // sigma-hat near observed surface
    double unknown_value = 0.5;   // sigma-hat prior
    double eps_cloud = 0.0;       // cloud proximity radius; <= 0 disables
  };

  CarvingGrid(const Aabb& bbox, const Params& params, const CloudStore* cloud = nullptr);

  void carving_update(const DepthMap& map);

  double occupancy(const Vec3& x) const override;

  // Per-voxel sigma-hat from the grid state alone (no cloud channel).
  double voxel_value(int ix, int iy, int iz) const;
  int resolution() const { return params_.resolution; }
  const Aabb& bbox() const { return bbox_; }

  // Raw dump: three little-endian uint32 dims, then resolution^3 float32
  // voxel values with iz fastest, iy next, ix slowest.
  void export_raw(const std::string& path) const;

 private:
  enum class State : uint8_t { unknown = 0, free = 1, surface = 2 };

  bool voxel_of(const Vec3& x, int* ix, int* iy, int* iz) const;
  std::size_t index(int ix, int iy, int iz) const;
  double state_value(State s) const;

  Aabb bbox_;
  Params params_;
  Vec3 cell_;  // per-axis voxel edge
  const CloudStore* cloud_;
  std::vector<State> states_;
};

// Occupancy-weighted point sample chi-hat of the scene volume, the common
// currency of the gain estimators: positions with their sigma-hat values,
// plus per-point direction-gain and camera-history coefficient blocks once a
// gain field attaches them (empty until then).
struct ProxyPointSet {
  std::vector<Vec3> points;
  std::vector<double> probs;
  std::vector<ShVector> gains;
  std::vector<ShVector> history_features;
  uint64_t seed = 0;
  std::size_t draws = 0;  // rejection draws consumed while sampling

  std::size_t size() const { return points.size(); }
};

// Rejection sampling of `n` points in `box` with acceptance probability
// sigma-hat(x). Draws are capped at 100 * n; starvation raises SamplingError
// naming the observed acceptance rate.
ProxyPointSet sample_proxy_points(const OccupancyField& field, const Aabb& box, std::size_t n,
                                  uint64_t seed);

}  // namespace nbv
