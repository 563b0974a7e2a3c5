#include "nbv/geometry/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbv/core/errors.hpp"
#include "nbv/kernels/kernels.hpp"

namespace nbv {
namespace {

constexpr int kLeafSize = 4;
constexpr double kBaryEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Slab test; handles zero direction components without relying on 0*inf.
bool ray_box(const Aabb& b, const Vec3& o, const Vec3& inv, const bool zero[3], double t_min,
             double t_max, double& t_entry) {
  double lo = t_min, hi = t_max;
  for (int a = 0; a < 3; ++a) {
    if (zero[a]) {
      if (o[a] < b.lo[a] || o[a] > b.hi[a]) return false;
      continue;
    }
    double t1 = (b.lo[a] - o[a]) * inv[a];
    double t2 = (b.hi[a] - o[a]) * inv[a];
    if (t1 > t2) std::swap(t1, t2);
    lo = std::max(lo, t1);
    hi = std::min(hi, t2);
    if (lo > hi) return false;
  }
  t_entry = lo;
  return true;
}

// Closest point on triangle (a, b, c) to p. Ericson, Real-Time Collision
// Detection, 5.1.5.
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + ab * v;
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + ac * w;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + (c - b) * w;
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return a + ab * v + ac * w;
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
  const int n = static_cast<int>(mesh.faces.size());
  if (n == 0) throw InvalidInput("cannot build BVH over an empty mesh");

  std::vector<Vec3> centroids(n);
  std::vector<Aabb> face_boxes(n);
  for (int f = 0; f < n; ++f) {
    const auto& idx = mesh.faces[f];
    Aabb box;
    box.expand(mesh.vertices[idx[0]]);
    box.expand(mesh.vertices[idx[1]]);
    box.expand(mesh.vertices[idx[2]]);
    face_boxes[f] = box;
    centroids[f] = (mesh.vertices[idx[0]] + mesh.vertices[idx[1]] + mesh.vertices[idx[2]]) / 3.0;
  }

  std::vector<int> order(n);
  for (int f = 0; f < n; ++f) order[f] = f;
  nodes_.reserve(2 * static_cast<std::size_t>(n) / kLeafSize + 2);
  build(order, 0, n, centroids, face_boxes);

  v0x_.resize(n); v0y_.resize(n); v0z_.resize(n);
  e1x_.resize(n); e1y_.resize(n); e1z_.resize(n);
  e2x_.resize(n); e2y_.resize(n); e2z_.resize(n);
  face_of_ = order;
  for (int i = 0; i < n; ++i) {
    const auto& idx = mesh.faces[order[i]];
    const Vec3& a = mesh.vertices[idx[0]];
    const Vec3 e1 = mesh.vertices[idx[1]] - a;
    const Vec3 e2 = mesh.vertices[idx[2]] - a;
    v0x_[i] = a.x; v0y_[i] = a.y; v0z_[i] = a.z;
    e1x_[i] = e1.x; e1y_[i] = e1.y; e1z_[i] = e1.z;
    e2x_[i] = e2.x; e2y_[i] = e2.y; e2z_[i] = e2.z;
  }
}

int Bvh::build(std::vector<int>& order, int begin, int end, const std::vector<Vec3>& centroids,
               const std::vector<Aabb>& face_boxes) {
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();

  Aabb box;
  for (int i = begin; i < end; ++i) box.expand(face_boxes[order[i]]);
  nodes_[node_index].box = box;

  const int count = end - begin;
  if (count <= kLeafSize) {
    nodes_[node_index].first = begin;
    nodes_[node_index].count = count;
    return node_index;
  }

  Aabb cbox;
  for (int i = begin; i < end; ++i) cbox.expand(centroids[order[i]]);
  const Vec3 ext = cbox.extent();
  int axis = 0;
  if (ext.y > ext.x) axis = 1;
  if (ext.z > ext[axis]) axis = 2;

  const int mid = begin + count / 2;
  std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                   [&](int a, int b) { return centroids[a][axis] < centroids[b][axis]; });

  const int left = build(order, begin, mid, centroids, face_boxes);
  const int right = build(order, mid, end, centroids, face_boxes);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

template <typename LeafFn>
void Bvh::traverse_ray(const Vec3& origin, const Vec3& dir, double& t_cap, LeafFn&& fn) const {
  // t_cap may be tightened by the leaf callback (nearest-hit queries); each
  // box test reads the current value.
  const bool zero[3] = {dir.x == 0.0, dir.y == 0.0, dir.z == 0.0};
  const Vec3 inv{zero[0] ? 0.0 : 1.0 / dir.x, zero[1] ? 0.0 : 1.0 / dir.y,
                 zero[2] ? 0.0 : 1.0 / dir.z};
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double entry;
    if (!ray_box(node.box, origin, inv, zero, 0.0, t_cap, entry)) continue;
    if (node.leaf()) {
      fn(node.first, node.count);
    } else {
      // Visit the nearer child first so nearest-hit queries tighten t_cap early.
      double e_left = kInf, e_right = kInf;
      const bool hit_l = ray_box(nodes_[node.left].box, origin, inv, zero, 0.0, t_cap, e_left);
      const bool hit_r = ray_box(nodes_[node.right].box, origin, inv, zero, 0.0, t_cap, e_right);
      if (hit_l && hit_r) {
        if (e_left <= e_right) {
          stack[top++] = node.right;
          stack[top++] = node.left;
        } else {
          stack[top++] = node.left;
          stack[top++] = node.right;
        }
      } else if (hit_l) {
        stack[top++] = node.left;
      } else if (hit_r) {
        stack[top++] = node.right;
      }
    }
  }
}

Bvh::Hit Bvh::nearest(const Vec3& origin, const Vec3& dir, double t_min, double t_max) const {
  const auto& k = kern::active();
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  Hit best;
  best.t = t_max;

  double t_buf[kLeafSize];
  std::uint8_t hit_buf[kLeafSize], graze_buf[kLeafSize];

  double cap = t_max;
  traverse_ray(origin, dir, cap, [&](int first, int count) {
    k.ray_tri_block(o, d, v0x_.data() + first, v0y_.data() + first, v0z_.data() + first,
                    e1x_.data() + first, e1y_.data() + first, e1z_.data() + first,
                    e2x_.data() + first, e2y_.data() + first, e2z_.data() + first,
                    static_cast<std::size_t>(count), kBaryEps, t_buf, hit_buf, graze_buf);
    for (int i = 0; i < count; ++i) {
      if (graze_buf[i]) best.graze = true;
      if (hit_buf[i] && t_buf[i] > t_min && t_buf[i] < best.t) {
        best.t = t_buf[i];
        best.face = face_of_[first + i];
        cap = best.t;
      }
    }
  });
  if (best.face < 0) best.t = 0.0;
  return best;
}

Bvh::Parity Bvh::count_hits(const Vec3& origin, const Vec3& dir, double t_min) const {
  const auto& k = kern::active();
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  Parity out;

  double t_buf[kLeafSize];
  std::uint8_t hit_buf[kLeafSize], graze_buf[kLeafSize];

  double cap = kInf;
  traverse_ray(origin, dir, cap, [&](int first, int count) {
    k.ray_tri_block(o, d, v0x_.data() + first, v0y_.data() + first, v0z_.data() + first,
                    e1x_.data() + first, e1y_.data() + first, e1z_.data() + first,
                    e2x_.data() + first, e2y_.data() + first, e2z_.data() + first,
                    static_cast<std::size_t>(count), kBaryEps, t_buf, hit_buf, graze_buf);
    for (int i = 0; i < count; ++i) {
      if (graze_buf[i]) out.graze = true;
      if (hit_buf[i] && t_buf[i] > t_min) ++out.count;
    }
  });
  return out;
}

Bvh::Closest Bvh::closest_point(const Vec3& x, double max_dist) const {
  Closest best;
  best.dist2 = max_dist * max_dist;

  // Depth-first with child ordering by box distance; prunes with best.dist2.
  struct Entry {
    int node;
    double d2;
  };
  Entry stack[64];
  int top = 0;
  stack[top++] = {0, nodes_[0].box.dist2(x)};

  while (top > 0) {
    const Entry e = stack[--top];
    if (e.d2 >= best.dist2) continue;
    const Node& node = nodes_[e.node];
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const Vec3 a{v0x_[i], v0y_[i], v0z_[i]};
        const Vec3 b = a + Vec3{e1x_[i], e1y_[i], e1z_[i]};
        const Vec3 c = a + Vec3{e2x_[i], e2y_[i], e2z_[i]};
        const Vec3 q = closest_on_triangle(x, a, b, c);
        const double d2 = (q - x).norm2();
        if (d2 < best.dist2) {
          best.dist2 = d2;
          best.point = q;
          best.face = face_of_[i];
        }
      }
    } else {
      const double dl = nodes_[node.left].box.dist2(x);
      const double dr = nodes_[node.right].box.dist2(x);
      // Push farther child first so the nearer is processed next.
      if (dl <= dr) {
        if (dr < best.dist2) stack[top++] = {node.right, dr};
        if (dl < best.dist2) stack[top++] = {node.left, dl};
      } else {
        if (dl < best.dist2) stack[top++] = {node.left, dl};
        if (dr < best.dist2) stack[top++] = {node.right, dr};
      }
    }
  }
  return best;
}

}  // namespace nbv
