#pragma once

#include <vector>

#include "nbv/core/vec3.hpp"
#include "nbv/geometry/mesh.hpp"

namespace nbv {

// Median-split BVH over face centroids (largest-extent axis, <= 4 faces per
// leaf). Leaf triangles are re-packed into SoA blocks so the ray kernels can
// test a whole leaf per call.
class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh);

  struct Hit {
    double t{0.0};
    int face{-1};       // index into the source mesh's face array
    bool graze{false};  // some candidate along the ray was marginal
  };

  // Nearest intersection with t in (t_min, t_max); face < 0 when none.
  Hit nearest(const Vec3& origin, const Vec3& dir, double t_min, double t_max) const;

  struct Parity {
    int count{0};
    bool graze{false};
  };

  // Number of intersections with t > t_min along the full ray.
  Parity count_hits(const Vec3& origin, const Vec3& dir, double t_min) const;

  struct Closest {
    double dist2{0.0};
    Vec3 point;
    int face{-1};  // < 0 when nothing within max_dist
  };

  // Closest surface point within max_dist of x (pass a finite cap to prune).
  Closest closest_point(const Vec3& x, double max_dist) const;

  const Aabb& root_box() const { return nodes_[0].box; }

 private:
  struct Node {
    Aabb box;
    int left{-1};    // internal: child indices; leaf: left = -1
    int right{-1};
    int first{0};    // leaf: range into the packed triangle arrays
    int count{0};
    bool leaf() const { return left < 0; }
  };

  int build(std::vector<int>& order, int begin, int end, const std::vector<Vec3>& centroids,
            const std::vector<Aabb>& face_boxes);

  template <typename LeafFn>
  void traverse_ray(const Vec3& origin, const Vec3& dir, double& t_cap, LeafFn&& fn) const;

  const TriangleMesh* mesh_;
  std::vector<Node> nodes_;
  // Packed leaf-order triangle data (v0, e1 = v1-v0, e2 = v2-v0).
  std::vector<double> v0x_, v0y_, v0z_;
  std::vector<double> e1x_, e1y_, e1z_;
  std::vector<double> e2x_, e2y_, e2z_;
  std::vector<int> face_of_;  // packed index -> mesh face index
};

}  // namespace nbv
