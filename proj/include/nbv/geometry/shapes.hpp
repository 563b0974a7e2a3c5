#pragma once

#include <string>

#include "nbv/geometry/mesh.hpp"

namespace nbv {

// Tessellated closed shape with exact (closed-form) surface area and volume.
// `reach` is the minimum distance from the surface to its medial axis; the
// theorem trials keep the shell half-width below half of it.
struct AnalyticShape {
  std::string name;
  TriangleMesh mesh;
  double exact_area{0.0};
  double exact_volume{0.0};
  double reach{0.0};
};

// Icosphere tessellation: 20 * 4^level faces, vertices on the sphere.
AnalyticShape make_sphere(double radius, int level = 5);

// Ring around the z axis; ring_radius > tube_radius required.
AnalyticShape make_torus(double ring_radius, double tube_radius, int level = 5);

// Cube of outer side `side` with edges/corners rounded at `radius`
// (Minkowski sum of a side-2*radius core cube with a ball).
AnalyticShape make_rounded_cube(double side, double radius, int level = 5);

// By-name factory for CLI configs: "sphere", "torus", "rounded_cube", "blob".
// p1/p2 default to each shape's canonical parameters when <= 0.
AnalyticShape make_analytic(const std::string& name, double p1 = 0.0, double p2 = 0.0,
                            int level = 5);

// Deterministic star-shaped bumpy closed mesh (file-mesh stand-in for tests
// and demos; no closed-form area/volume, so returned as a plain mesh).
TriangleMesh make_blob(int level = 4);

// Axis-aligned closed box (12 faces, outward winding).
TriangleMesh make_box(const Vec3& center, const Vec3& half_extents);

// Desk-scale test scene: floor slab, a desk top on four legs, and a few
// objects on the desk — disjoint closed boxes merged into one watertight
// mesh (footprint 4 x 4, height just under 1).
TriangleMesh make_desk_scene();

}  // namespace nbv
