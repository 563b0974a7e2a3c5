#include "nbv/geometry/queries.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "nbv/core/errors.hpp"

namespace nbv {
namespace {

constexpr int kMaxRecast = 3;

// Fixed parity direction: irrational-ish components so axis-aligned geometry
// is never parallel to it.
const Vec3 kParityDir = Vec3{0.5773, 0.5774, 0.5775}.normalized();

// Deterministic jitter sequence for a grazing ray: perturb the direction by
// ~1e-7 radians, seeded from the ray itself so results are reproducible.
Vec3 jittered_dir(const Vec3& dir, const Vec3& origin, int attempt) {
  uint64_t h = 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(attempt + 1);
  auto mix = [&h](double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(origin.x); mix(origin.y); mix(origin.z);
  mix(dir.x); mix(dir.y); mix(dir.z);
  Rng rng(h);
  const Vec3 delta{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return (dir + delta * 1e-7).normalized();
}

}  // namespace

MeshQuery::MeshQuery(const TriangleMesh& mesh) : mesh_(&mesh), scene_scale_(0.0) {
  if (mesh.face_normals.size() != mesh.faces.size()) {
    throw InvalidInput("MeshQuery requires a finalized mesh (call finalize())");
  }
  if (!mesh.faces.empty()) {
    bvh_.emplace(mesh);
    scene_scale_ = mesh.bbox.diagonal();
  }
}

std::optional<RayHit> MeshQuery::ray_intersect(const Vec3& origin, const Vec3& dir, double t_min,
                                               double t_max) const {
  if (!bvh_) return std::nullopt;
  Vec3 d = dir;
  Bvh::Hit hit = bvh_->nearest(origin, d, t_min, t_max);
  for (int attempt = 0; hit.graze && attempt < kMaxRecast; ++attempt) {
    d = jittered_dir(dir, origin, attempt);
    hit = bvh_->nearest(origin, d, t_min, t_max);
  }
  if (hit.face < 0) return std::nullopt;
  RayHit out;
  out.t = hit.t;
  out.face = hit.face;
  out.point = origin + d * hit.t;
  out.normal = mesh_->face_normals[hit.face];
  return out;
}

bool MeshQuery::segment_blocked(const Vec3& origin, const Vec3& dir, double t_min,
                                double t_max) const {
  return ray_intersect(origin, dir, t_min, t_max).has_value();
}

bool MeshQuery::point_inside(const Vec3& x) const {
  if (!mesh_->watertight) {
    throw ContractViolation("point_inside requires a watertight mesh");
  }
  Bvh::Parity parity = bvh_->count_hits(x, kParityDir, 0.0);
  for (int attempt = 0; parity.graze && attempt < kMaxRecast; ++attempt) {
    parity = bvh_->count_hits(x, jittered_dir(kParityDir, x, attempt), 0.0);
  }
  return (parity.count % 2) == 1;
}

double MeshQuery::signed_distance(const Vec3& x) const {
  if (!bvh_) throw ContractViolation("signed_distance is undefined for an empty mesh");
  const Bvh::Closest c = bvh_->closest_point(x, std::numeric_limits<double>::infinity());
  const double d = std::sqrt(c.dist2);
  return point_inside(x) ? d : -d;
}

std::optional<SurfacePoint> MeshQuery::closest_surface_point(const Vec3& x,
                                                             double max_dist) const {
  if (!bvh_) return std::nullopt;
  const Bvh::Closest c = bvh_->closest_point(x, max_dist);
  if (c.face < 0) return std::nullopt;
  SurfacePoint sp;
  sp.point = c.point;
  sp.inward_normal = -mesh_->face_normals[c.face];
  sp.face = c.face;
  sp.distance = std::sqrt(c.dist2);
  return sp;
}

SurfaceSamples sample_surface(const TriangleMesh& mesh, std::size_t n, uint64_t seed) {
  if (mesh.faces.empty() || mesh.total_area <= 0.0) {
    throw InvalidInput("sample_surface requires a mesh with positive area");
  }
  // Cumulative area table for face selection.
  std::vector<double> cumulative(mesh.faces.size());
  double acc = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    acc += mesh.face_areas[f];
    cumulative[f] = acc;
  }

  Rng rng = named_stream(seed, "surface_sampling");
  SurfaceSamples out;
  out.points.reserve(n);
  out.inward_normals.reserve(n);
  out.faces.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = rng.uniform() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const int f = static_cast<int>(std::min<std::size_t>(it - cumulative.begin(),
                                                         mesh.faces.size() - 1));
    const auto& idx = mesh.faces[f];
    // Uniform barycentric point via the sqrt trick.
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const double u = 1.0 - r1;
    const double v = r1 * (1.0 - r2);
    const double w = r1 * r2;
    out.points.push_back(mesh.vertices[idx[0]] * u + mesh.vertices[idx[1]] * v +
                         mesh.vertices[idx[2]] * w);
    out.inward_normals.push_back(-mesh.face_normals[f]);
    out.faces.push_back(f);
  }
  return out;
}

}  // namespace nbv
