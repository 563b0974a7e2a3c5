#include "nbv/geometry/shapes.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>

#include "nbv/core/errors.hpp"

namespace nbv {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Unit icosphere: subdivide an icosahedron `level` times, projecting new
// vertices onto the sphere. 20 * 4^level faces.
TriangleMesh unit_icosphere(int level) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& v : m.vertices) v = v.normalized();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < level; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(m.vertices.size());
      m.vertices.push_back(((m.vertices[a] + m.vertices[b]) * 0.5).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  return m;
}

void orient_outward(TriangleMesh& m) {
  m.finalize();
  if (m.signed_volume() < 0.0) m.flip_winding();
}

}  // namespace

AnalyticShape make_sphere(double radius, int level) {
  if (radius <= 0.0) throw InvalidInput("sphere radius must be positive");
  AnalyticShape s;
  s.name = "sphere";
  s.mesh = unit_icosphere(level);
  for (Vec3& v : s.mesh.vertices) v *= radius;
  orient_outward(s.mesh);
  s.exact_area = 4.0 * kPi * radius * radius;
  s.exact_volume = 4.0 / 3.0 * kPi * radius * radius * radius;
  s.reach = radius;
  return s;
}

AnalyticShape make_torus(double ring_radius, double tube_radius, int level) {
  if (tube_radius <= 0.0 || ring_radius <= tube_radius) {
    throw InvalidInput("torus requires ring_radius > tube_radius > 0");
  }
  // Grid resolution grows with level; level 5 gives 128x64 (16384 faces).
  const int nu = 8 << std::max(1, level - 1);   // around the main axis
  const int nv = nu / 2;                        // around the tube
  AnalyticShape s;
  s.name = "torus";
  TriangleMesh& m = s.mesh;
  m.vertices.reserve(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    const double theta = 2.0 * kPi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double phi = 2.0 * kPi * j / nv;
      const double w = ring_radius + tube_radius * std::cos(phi);
      m.vertices.push_back({w * std::cos(theta), w * std::sin(theta),
                            tube_radius * std::sin(phi)});
    }
  }
  auto vid = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  }
  orient_outward(m);
  s.exact_area = 4.0 * kPi * kPi * ring_radius * tube_radius;
  s.exact_volume = 2.0 * kPi * kPi * ring_radius * tube_radius * tube_radius;
  s.reach = std::min(tube_radius, ring_radius - tube_radius);
  return s;
}

AnalyticShape make_rounded_cube(double side, double radius, int level) {
  const double core = side - 2.0 * radius;  // inner cube side
  if (radius <= 0.0 || core <= 0.0) {
    throw InvalidInput("rounded cube requires 0 < radius < side/2");
  }
  const double h = core / 2.0;

  // Offset surface of the core cube is star-shaped about the origin: map
  // icosphere vertices to the radius where dist(t*d, core) == radius.
  auto outside_dist = [h](const Vec3& p) {
    const double dx = std::max(std::abs(p.x) - h, 0.0);
    const double dy = std::max(std::abs(p.y) - h, 0.0);
    const double dz = std::max(std::abs(p.z) - h, 0.0);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };

  AnalyticShape s;
  s.name = "rounded_cube";
  s.mesh = unit_icosphere(level);
  for (Vec3& v : s.mesh.vertices) {
    const Vec3 d = v;  // unit
    double lo = h;     // inside the core -> dist 0 < radius
    double hi = h * std::sqrt(3.0) + radius + 1.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (outside_dist(d * mid) < radius ? lo : hi) = mid;
    }
    v = d * (0.5 * (lo + hi));
  }
  orient_outward(s.mesh);

  const double a = core;
  s.exact_area = 6.0 * a * a + 6.0 * kPi * radius * a + 4.0 * kPi * radius * radius;
  s.exact_volume = a * a * a + 6.0 * a * a * radius + 3.0 * kPi * a * radius * radius +
                   4.0 / 3.0 * kPi * radius * radius * radius;
  s.reach = radius;
  return s;
}

TriangleMesh make_blob(int level) {
  TriangleMesh m = unit_icosphere(level);
  for (Vec3& v : m.vertices) {
    const Vec3 d = v;  // unit direction
    const double r = 0.30 + 0.06 * std::sin(4.0 * d.x + 1.0) +
                     0.05 * std::cos(3.0 * d.y - 0.7) +
                     0.05 * std::sin(5.0 * d.z) * std::cos(2.0 * d.x);
    v = d * r;
  }
  orient_outward(m);
  return m;
}

TriangleMesh make_box(const Vec3& center, const Vec3& half_extents) {
  TriangleMesh m;
  const Vec3& h = half_extents;
  for (int corner = 0; corner < 8; ++corner) {
    m.vertices.push_back({center.x + ((corner & 1) ? h.x : -h.x),
                          center.y + ((corner & 2) ? h.y : -h.y),
                          center.z + ((corner & 4) ? h.z : -h.z)});
  }
  m.faces = {{0, 2, 3}, {0, 3, 1},   // z-
             {4, 5, 7}, {4, 7, 6},   // z+
             {0, 1, 5}, {0, 5, 4},   // y-
             {2, 6, 7}, {2, 7, 3},   // y+
             {0, 4, 6}, {0, 6, 2},   // x-
             {1, 3, 7}, {1, 7, 5}};  // x+
  orient_outward(m);
  return m;
}

AnalyticShape make_analytic(const std::string& name, double p1, double p2, int level) {
  if (name == "sphere") return make_sphere(p1 > 0.0 ? p1 : 1.0, level);
  if (name == "torus") {
    return make_torus(p1 > 0.0 ? p1 : 0.35, p2 > 0.0 ? p2 : 0.15, level);
  }
  if (name == "rounded_cube") {
    return make_rounded_cube(p1 > 0.0 ? p1 : 1.0, p2 > 0.0 ? p2 : 0.1, level);
  }
  if (name == "blob") {
    AnalyticShape s;
    s.name = "blob";
    s.mesh = make_blob(level > 4 ? 4 : level);
    s.exact_area = s.exact_volume = s.reach = 0.0;  // no closed form
    return s;
  }
  throw InvalidInput("unknown analytic shape: " + name);
}

TriangleMesh make_desk_scene() {
  // Disjoint closed boxes (hair-thin air gaps keep parity tests unambiguous
  // where parts would otherwise touch): floor slab, desk top on four legs,
  // and three objects resting on the desk.
  const double gap = 1e-3;
  std::vector<TriangleMesh> parts;
  parts.push_back(make_box({0.0, 0.0, 0.05}, {2.0, 2.0, 0.05}));          // floor
  parts.push_back(make_box({0.0, 0.0, 0.72}, {0.6, 0.35, 0.02}));         // desk top
  for (const double sx : {-1.0, 1.0}) {
    for (const double sy : {-1.0, 1.0}) {
      parts.push_back(make_box({0.55 * sx, 0.30 * sy, 0.40},
                               {0.03, 0.03, 0.30 - gap}));                // legs
    }
  }
  parts.push_back(make_box({0.0, -0.10, 0.74 + gap + 0.12},
                           {0.18, 0.03, 0.12}));                          // monitor
  parts.push_back(make_box({0.35, 0.15, 0.74 + gap + 0.05},
                           {0.03, 0.03, 0.05}));                          // mug
  parts.push_back(make_box({-0.30, 0.10, 0.74 + gap + 0.015},
                           {0.10, 0.07, 0.015}));                         // book
  return merge_meshes(parts);
}

}  // namespace nbv
