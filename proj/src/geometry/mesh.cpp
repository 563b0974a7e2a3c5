#include "nbv/geometry/mesh.hpp"

#include <cstdint>
#include <unordered_map>

#include "nbv/core/errors.hpp"

namespace nbv {

void TriangleMesh::finalize() {
  const int nv = static_cast<int>(vertices.size());
  face_normals.assign(faces.size(), Vec3{});
  face_areas.assign(faces.size(), 0.0);
  bbox = Aabb{};
  total_area = 0.0;

  for (const Vec3& v : vertices) bbox.expand(v);

  std::unordered_map<uint64_t, int> edge_count;
  edge_count.reserve(faces.size() * 3);
  bool indices_ok = true;

  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& idx = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (idx[k] < 0 || idx[k] >= nv) indices_ok = false;
    }
    if (!indices_ok) throw InvalidInput("mesh face references vertex out of range");

    const Vec3& a = vertices[idx[0]];
    const Vec3& b = vertices[idx[1]];
    const Vec3& c = vertices[idx[2]];
    const Vec3 n = cross(b - a, c - a);
    const double len = n.norm();
    face_areas[f] = 0.5 * len;
    total_area += face_areas[f];
    face_normals[f] = len > 0.0 ? n / len : Vec3{0.0, 0.0, 0.0};

    for (int k = 0; k < 3; ++k) {
      const uint64_t i = static_cast<uint32_t>(idx[k]);
      const uint64_t j = static_cast<uint32_t>(idx[(k + 1) % 3]);
      const uint64_t key = i < j ? (i << 32 | j) : (j << 32 | i);
      ++edge_count[key];
    }
  }

  watertight = !faces.empty();
  for (const auto& [key, count] : edge_count) {
    if (count != 2) {
      watertight = false;
      break;
    }
  }
}

double TriangleMesh::signed_volume() const {
  double vol = 0.0;
  for (const auto& idx : faces) {
    const Vec3& a = vertices[idx[0]];
    const Vec3& b = vertices[idx[1]];
    const Vec3& c = vertices[idx[2]];
    vol += dot(a, cross(b, c));
  }
  return vol / 6.0;
}

void TriangleMesh::flip_winding() {
  for (auto& idx : faces) std::swap(idx[1], idx[2]);
  finalize();
}

void normalize_unit_cube(TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw InvalidInput("cannot normalize an empty mesh");
  Aabb box;
  for (const Vec3& v : mesh.vertices) box.expand(v);
  const Vec3 ext = box.extent();
  const double max_extent = std::max({ext.x, ext.y, ext.z});
  if (max_extent <= 0.0) throw InvalidInput("cannot normalize a degenerate (zero-extent) mesh");
  const Vec3 center = box.center();
  const double scale = 1.0 / max_extent;
  for (Vec3& v : mesh.vertices) v = (v - center) * scale;
  mesh.finalize();
}

TriangleMesh merge_meshes(const std::vector<TriangleMesh>& parts) {
  TriangleMesh out;
  for (const TriangleMesh& part : parts) {
    const int base = static_cast<int>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), part.vertices.begin(), part.vertices.end());
    for (const auto& f : part.faces) {
      out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    }
  }
  out.finalize();
  return out;
}

}  // namespace nbv
