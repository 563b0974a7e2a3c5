#include "nbv/occupancy/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "nbv/core/errors.hpp"
#include "nbv/core/rng.hpp"

namespace nbv {

CarvingGrid::CarvingGrid(const Aabb& bbox, const Params& params, const CloudStore* cloud)
    : bbox_(bbox), params_(params), cloud_(cloud) {
  const Vec3 ext = bbox.extent();
  if (!(ext.x > 0.0) || !(ext.y > 0.0) || !(ext.z > 0.0))
    throw InvalidInput("carving grid needs a non-degenerate bounding box");
  if (params.resolution < 1) throw InvalidInput("carving grid resolution must be at least 1");
  for (const double v : {params.free_value, params.surface_value, params.unknown_value})
    if (!(v >= 0.0) || !(v <= 1.0))
      throw InvalidInput("carving grid sigma-hat values must lie in [0, 1]");
  const double r = params.resolution;
  cell_ = {ext.x / r, ext.y / r, ext.z / r};
  states_.assign(static_cast<std::size_t>(params.resolution) * params.resolution *
                     params.resolution,
                 State::unknown);
}

std::size_t CarvingGrid::index(int ix, int iy, int iz) const {
  const std::size_t r = params_.resolution;
  return (static_cast<std::size_t>(ix) * r + iy) * r + iz;
}

bool CarvingGrid::voxel_of(const Vec3& x, int* ix, int* iy, int* iz) const {
  if (!bbox_.contains(x)) return false;
  const int last = params_.resolution - 1;
  *ix = std::min(last, static_cast<int>(std::floor((x.x - bbox_.lo.x) / cell_.x)));
  *iy = std::min(last, static_cast<int>(std::floor((x.y - bbox_.lo.y) / cell_.y)));
  *iz = std::min(last, static_cast<int>(std::floor((x.z - bbox_.lo.z) / cell_.z)));
  return true;
}

double CarvingGrid::state_value(State s) const {
  switch (s) {
    case State::free: return params_.free_value;
    case State::surface: return params_.surface_value;
    default: return params_.unknown_value;
  }
}

void CarvingGrid::carving_update(const DepthMap& map) {
  map.intrinsics.validate();
  map.pose.validate();

  // Hit voxels first, so in-update traversals cannot carve them free.
  std::unordered_set<std::size_t> hit_voxels;
  for (int py = 0; py < map.intrinsics.height; ++py) {
    for (int px = 0; px < map.intrinsics.width; ++px) {
      if (!map.has_return(px, py)) continue;
      const Vec3 dir = map.pose.to_world_dir(pixel_ray(map.intrinsics, px, py));
      const Vec3 hit = map.pose.position + dir * map.at(px, py);
      int hx, hy, hz;
      if (voxel_of(hit, &hx, &hy, &hz)) hit_voxels.insert(index(hx, hy, hz));
    }
  }

  for (int py = 0; py < map.intrinsics.height; ++py) {
    for (int px = 0; px < map.intrinsics.width; ++px) {
      if (!map.has_return(px, py)) continue;
      const double depth = map.at(px, py);
      const Vec3 dir = map.pose.to_world_dir(pixel_ray(map.intrinsics, px, py));
      const Vec3 origin = map.pose.position;

      // Clip [0, depth] to the grid box (slab test per axis).
      double t0 = 0.0, t1 = depth;
      bool miss = false;
      for (int a = 0; a < 3 && !miss; ++a) {
        const double o = origin[a], d = dir[a];
        const double lo = bbox_.lo[a], hi = bbox_.hi[a];
        if (std::abs(d) < 1e-300) {
          if (o < lo || o > hi) miss = true;
          continue;
        }
        double ta = (lo - o) / d, tb = (hi - o) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) miss = true;
      }
      if (miss) continue;

      // Amanatides-Woo traversal from the entry point toward the hit.
      const double nudge = 1e-9 * (t1 - t0 + 1.0);
      int ix, iy, iz;
      if (!voxel_of(origin + dir * (t0 + nudge), &ix, &iy, &iz)) continue;
      int step[3], cur[3] = {ix, iy, iz};
      double t_max[3], t_delta[3];
      for (int a = 0; a < 3; ++a) {
        const double d = dir[a];
        const double cell = cell_[a];
        if (std::abs(d) < 1e-300) {
          step[a] = 0;
          t_max[a] = 1e300;
          t_delta[a] = 1e300;
        } else if (d > 0.0) {
          step[a] = 1;
          const double edge = bbox_.lo[a] + (cur[a] + 1) * cell;
          t_max[a] = (edge - origin[a]) / d;
          t_delta[a] = cell / d;
        } else {
          step[a] = -1;
          const double edge = bbox_.lo[a] + cur[a] * cell;
          t_max[a] = (edge - origin[a]) / d;
          t_delta[a] = -cell / d;
        }
      }

      const int res = params_.resolution;
      for (;;) {
        const std::size_t vi = index(cur[0], cur[1], cur[2]);
        if (hit_voxels.count(vi)) break;  // reached (or started in) a hit voxel
        if (states_[vi] == State::unknown) states_[vi] = State::free;
        int axis = 0;
        if (t_max[1] < t_max[0]) axis = 1;
        if (t_max[2] < t_max[axis]) axis = 2;
        if (t_max[axis] >= t1) break;  // next crossing is past the hit point
        cur[axis] += step[axis];
        if (cur[axis] < 0 || cur[axis] >= res) break;
        t_max[axis] += t_delta[axis];
      }
    }
  }

  for (const std::size_t vi : hit_voxels)
    if (states_[vi] == State::unknown) states_[vi] = State::surface;
}

double CarvingGrid::occupancy(const Vec3& x) const {
  if (cloud_ && params_.eps_cloud > 0.0 && cloud_->has_point_within(x, params_.eps_cloud))
    return params_.surface_value;
  int ix, iy, iz;
  if (!voxel_of(x, &ix, &iy, &iz)) return params_.free_value;
  return state_value(states_[index(ix, iy, iz)]);
}

double CarvingGrid::voxel_value(int ix, int iy, int iz) const {
  const int res = params_.resolution;
  if (ix < 0 || iy < 0 || iz < 0 || ix >= res || iy >= res || iz >= res)
    throw InvalidInput("voxel index out of range");
  return state_value(states_[index(ix, iy, iz)]);
}

void CarvingGrid::export_raw(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw IoError("cannot open '" + path + "' for writing");
  const uint32_t res = static_cast<uint32_t>(params_.resolution);
  uint8_t dims[12];
  for (int i = 0; i < 3; ++i) {
    dims[4 * i + 0] = static_cast<uint8_t>(res & 0xff);
    dims[4 * i + 1] = static_cast<uint8_t>((res >> 8) & 0xff);
    dims[4 * i + 2] = static_cast<uint8_t>((res >> 16) & 0xff);
    dims[4 * i + 3] = static_cast<uint8_t>((res >> 24) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  std::vector<float> values(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i)
    values[i] = static_cast<float>(state_value(states_[i]));
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out.good()) throw IoError("failed while writing '" + path + "'");
}

ProxyPointSet sample_proxy_points(const OccupancyField& field, const Aabb& box, std::size_t n,
                                  uint64_t seed) {
  if (n == 0) throw InvalidInput("proxy sample size must be positive");
  const Vec3 ext = box.extent();
  if (!(ext.x > 0.0) || !(ext.y > 0.0) || !(ext.z > 0.0))
    throw InvalidInput("proxy sampling needs a non-degenerate box");

  Rng rng = named_stream(seed, "proxy_sampling");
  ProxyPointSet set;
  set.seed = seed;
  set.points.reserve(n);
  set.probs.reserve(n);
  const std::size_t max_draws = 100 * n;
  while (set.points.size() < n) {
    if (set.draws >= max_draws) {
      std::ostringstream msg;
      msg << "proxy sampling starved: acceptance rate "
          << static_cast<double>(set.points.size()) / static_cast<double>(set.draws) << " after "
          << set.draws << " draws (need " << n << " points)";
      throw SamplingError(msg.str());
    }
    const Vec3 x = rng.uniform_in_box(box);
    const double u = rng.uniform();
    ++set.draws;
    const double p = field.occupancy(x);
    if (u < p) {
      set.points.push_back(x);
      set.probs.push_back(p);
    }
  }
  return set;
}

}  // namespace nbv
