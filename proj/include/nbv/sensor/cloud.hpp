#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "nbv/core/vec3.hpp"

namespace nbv {

// Number of k-NN resolution levels: scale 0 queries the raw cloud, scale s>0
// a voxel-downsampled copy whose voxel edge doubles per level.
inline constexpr int kCloudScales = 4;

// The accumulated partial point cloud, partitioned into a uniform cell grid
// over the scene bounding box. Deduplication at insertion is per cell: a
// point is dropped iff some point already stored in the *same* cell lies
// strictly within eps_cloud, so near-duplicates straddling a cell boundary
// are deliberately kept.
//
// Mutation (accumulate) is exclusive-writer; all const queries may run
// concurrently between accumulate calls.
class CloudStore {
 public:
  // cell_size must be positive; the bounding box must be non-degenerate.
  CloudStore(const Aabb& scene_bbox, double cell_size);

  struct AccumulateStats {
    std::size_t inserted = 0;
    std::size_t duplicates = 0;
    std::size_t outside = 0;  // points off the scene box are skipped, not errors
  };
  // Inserts in input order. Requires 0 < eps_cloud <= cell size (the dedup
  // scan only looks at the point's own cell).
  AccumulateStats accumulate(const std::vector<Vec3>& points, double eps_cloud);

  // k nearest stored points to x among the 3x3x3 cells around x, after
  // deterministic voxel downsampling at `scale` (keep the point nearest each
  // voxel center; voxels align with the cell grid). Sorted by distance,
  // ties broken by storage order; fewer than k returned when the
  // neighborhood holds fewer points. scale must be in [0, kCloudScales).
  std::vector<Vec3> k_nearest(const Vec3& x, int k, int scale = 0) const;

  // True iff some stored point lies strictly within eps of x (searches the
  // ceil(eps/cell_size)-ring of cells, so any eps is honored).
  bool has_point_within(const Vec3& x, double eps) const;

  // Every stored point in a deterministic order: cells by ascending grid
  // index, points in insertion order within a cell.
  std::vector<Vec3> flatten() const;

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  double cell_size() const { return cell_; }
  const Aabb& scene_bbox() const { return bbox_; }
  std::size_t occupied_cells() const { return cells_.size(); }

 private:
  struct Cell {
    std::vector<double> xs, ys, zs;
  };

  bool cell_coords(const Vec3& p, long long c[3]) const;
  static std::uint64_t pack(const long long c[3]);

  Aabb bbox_;
  double cell_ = 0.0;
  std::size_t count_ = 0;
  std::unordered_map<std::uint64_t, Cell> cells_;
};

// Cell size heuristic: 2 * max_range / 32, clamped so the scene box spans at
// most 128 cells per axis.
double default_cell_size(const Aabb& scene_bbox, double max_range);

// ASCII point-cloud PLY (vertex element only), in flatten() order.
void export_cloud_ply(const CloudStore& store, const std::string& path);

}  // namespace nbv
