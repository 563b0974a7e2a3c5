#pragma once

#include <array>
#include <string>
#include <vector>

#include "nbv/core/vec3.hpp"

namespace nbv {

// Indexed triangle mesh. Call finalize() after filling vertices/faces; all
// queries and samplers require a finalized mesh.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  // Derived by finalize():
  std::vector<Vec3> face_normals;   // unit, outward per winding; zero if degenerate
  std::vector<double> face_areas;
  Aabb bbox;
  double total_area{0.0};
  bool watertight{false};  // every undirected edge shared by exactly two faces

  void finalize();

  // Signed volume via the divergence theorem; positive for outward winding.
  double signed_volume() const;

  void flip_winding();
};

// Translate + uniformly scale so the bounding box is centered at the origin
// with maximum extent 1 (fits the unit cube). Re-finalizes.
void normalize_unit_cube(TriangleMesh& mesh);

// Concatenate meshes (disjoint closed components stay watertight).
TriangleMesh merge_meshes(const std::vector<TriangleMesh>& parts);

}  // namespace nbv
