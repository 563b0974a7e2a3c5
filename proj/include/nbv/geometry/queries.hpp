#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "nbv/core/rng.hpp"
#include "nbv/core/vec3.hpp"
#include "nbv/geometry/bvh.hpp"
#include "nbv/geometry/mesh.hpp"

namespace nbv {

struct RayHit {
  double t{0.0};
  int face{-1};
  Vec3 point;
  Vec3 normal;  // face normal (outward per winding)
};

struct SurfacePoint {
  Vec3 point;
  Vec3 inward_normal;
  int face{-1};
  double distance{0.0};  // unsigned distance from the query point
};

// Ray/point queries over one finalized mesh; owns the BVH. Rays that graze an
// edge or vertex are re-cast with a deterministic tiny direction jitter (up
// to 3 retries) so parity counts and nearest hits stay robust.
class MeshQuery {
 public:
  // Accepts an empty (but finalized) mesh: ray queries then miss, occlusion
  // tests pass, and closest-point lookups return nothing.
  explicit MeshQuery(const TriangleMesh& mesh);

  const TriangleMesh& mesh() const { return *mesh_; }
  bool empty() const { return !bvh_.has_value(); }
  double scene_scale() const { return scene_scale_; }  // bbox diagonal

  // Nearest intersection with t in (t_min, t_max); nullopt when none.
  std::optional<RayHit> ray_intersect(const Vec3& origin, const Vec3& dir, double t_min,
                                      double t_max) const;

  // Any intersection strictly inside (t_min, t_max)? (occlusion tests)
  bool segment_blocked(const Vec3& origin, const Vec3& dir, double t_min, double t_max) const;

  // Parity test along a fixed direction. Requires a watertight mesh.
  bool point_inside(const Vec3& x) const;

  // Positive inside, negative outside (unsigned part from the closest face).
  double signed_distance(const Vec3& x) const;

  // Closest surface point within max_dist; nullopt when none is that close.
  std::optional<SurfacePoint> closest_surface_point(const Vec3& x, double max_dist) const;

 private:
  const TriangleMesh* mesh_;
  std::optional<Bvh> bvh_;
  double scene_scale_;
};

// Area-weighted surface samples with inward normals.
struct SurfaceSamples {
  std::vector<Vec3> points;
  std::vector<Vec3> inward_normals;
  std::vector<int> faces;
  std::size_t size() const { return points.size(); }
};

SurfaceSamples sample_surface(const TriangleMesh& mesh, std::size_t n, uint64_t seed);

}  // namespace nbv
