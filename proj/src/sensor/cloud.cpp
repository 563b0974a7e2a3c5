#include "nbv/sensor/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nbv/core/errors.hpp"
#include "nbv/kernels/kernels.hpp"

namespace nbv {
namespace {

// 21-bit two's-complement-style packing per axis; the offset keeps packed
// keys ordered the same as (cx, cy, cz) tuples.
constexpr long long kOffset = 1ll << 20;
constexpr long long kCoordMin = -kOffset;
constexpr long long kCoordMax = kOffset - 1;

bool packable(const long long c[3]) {
  for (int a = 0; a < 3; ++a)
    if (c[a] < kCoordMin || c[a] > kCoordMax) return false;
  return true;
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

CloudStore::CloudStore(const Aabb& scene_bbox, double cell_size)
    : bbox_(scene_bbox), cell_(cell_size) {
  if (!scene_bbox.valid() || scene_bbox.diagonal() <= 0.0)
    throw InvalidInput("CloudStore needs a non-degenerate scene bounding box");
  if (!(cell_size > 0.0)) throw InvalidInput("CloudStore cell size must be positive");
}

bool CloudStore::cell_coords(const Vec3& p, long long c[3]) const {
  if (!bbox_.contains(p)) return false;
  for (int a = 0; a < 3; ++a) {
    const double rel = (p[a] - bbox_.lo[a]) / cell_;
    // A point exactly on the far face belongs to the last cell.
    c[a] = std::min(static_cast<long long>(std::floor(rel)),
                    static_cast<long long>(std::floor((bbox_.hi[a] - bbox_.lo[a]) / cell_)));
    c[a] = std::max(c[a], 0ll);
  }
  return true;
}

std::uint64_t CloudStore::pack(const long long c[3]) {
  return (static_cast<std::uint64_t>(c[0] + kOffset) << 42) |
         (static_cast<std::uint64_t>(c[1] + kOffset) << 21) |
         static_cast<std::uint64_t>(c[2] + kOffset);
}

CloudStore::AccumulateStats CloudStore::accumulate(const std::vector<Vec3>& points,
                                                   double eps_cloud) {
  if (!(eps_cloud > 0.0) || eps_cloud > cell_) {
    std::ostringstream msg;
    msg << "accumulate needs 0 < eps_cloud <= cell size (" << eps_cloud << " vs " << cell_ << ")";
    throw InvalidInput(msg.str());
  }
  const double eps2 = eps_cloud * eps_cloud;
  const auto& kern = kern::active();
  AccumulateStats stats;
  for (const Vec3& p : points) {
    long long c[3];
    if (!cell_coords(p, c)) {
      ++stats.outside;
      continue;
    }
    Cell& cell = cells_[pack(c)];
    if (!cell.xs.empty() &&
        kern.any_within(p.x, p.y, p.z, cell.xs.data(), cell.ys.data(), cell.zs.data(),
                        cell.xs.size(), eps2)) {
      ++stats.duplicates;
      continue;
    }
    cell.xs.push_back(p.x);
    cell.ys.push_back(p.y);
    cell.zs.push_back(p.z);
    ++count_;
    ++stats.inserted;
  }
  return stats;
}

std::vector<Vec3> CloudStore::k_nearest(const Vec3& x, int k, int scale) const {
  if (k < 1) throw InvalidInput("k_nearest needs k >= 1");
  if (scale < 0 || scale >= kCloudScales) {
    std::ostringstream msg;
    msg << "k_nearest scale must be in [0, " << kCloudScales << "), got " << scale;
    throw InvalidInput(msg.str());
  }
  long long home[3];
  for (int a = 0; a < 3; ++a)
    home[a] = static_cast<long long>(std::floor((x[a] - bbox_.lo[a]) / cell_));

  auto find_cell = [this](const long long c[3]) -> const Cell* {
    if (!packable(c)) return nullptr;
    const auto it = cells_.find(pack(c));
    return it == cells_.end() ? nullptr : &it->second;
  };
  const auto in_window = [&home](const long long c[3]) {
    return c[0] >= home[0] - 1 && c[0] <= home[0] + 1 && c[1] >= home[1] - 1 &&
           c[1] <= home[1] + 1 && c[2] >= home[2] - 1 && c[2] <= home[2] + 1;
  };

  std::vector<std::pair<double, Vec3>> candidates;
  if (scale == 0) {
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          const long long c[3] = {home[0] + dx, home[1] + dy, home[2] + dz};
          const Cell* cell = find_cell(c);
          if (!cell) continue;
          for (std::size_t i = 0; i < cell->xs.size(); ++i) {
            const Vec3 p{cell->xs[i], cell->ys[i], cell->zs[i]};
            candidates.emplace_back((p - x).norm2(), p);
          }
        }
  } else {
    // The downsampled cloud keeps, per voxel, the stored point nearest the
    // voxel center (first-stored wins ties); a keeper is a candidate when it
    // lies inside the 3x3x3 cell window. Voxels align with the cell grid, so
    // a voxel's population is exactly the points of its m^3 cells.
    const long long m = 1ll << (scale - 1);
    const double edge = cell_ * static_cast<double>(m);
    long long vlo[3], vhi[3];
    for (int a = 0; a < 3; ++a) {
      vlo[a] = floor_div(home[a] - 1, m);
      vhi[a] = floor_div(home[a] + 1, m);
    }
    for (long long vx = vlo[0]; vx <= vhi[0]; ++vx)
      for (long long vy = vlo[1]; vy <= vhi[1]; ++vy)
        for (long long vz = vlo[2]; vz <= vhi[2]; ++vz) {
          const long long v[3] = {vx, vy, vz};
          const Vec3 center{bbox_.lo.x + (vx + 0.5) * edge, bbox_.lo.y + (vy + 0.5) * edge,
                            bbox_.lo.z + (vz + 0.5) * edge};
          bool found = false;
          double best_d2 = 0.0;
          Vec3 best{};
          long long best_cell[3] = {0, 0, 0};
          for (long long cx = vx * m; cx < (vx + 1) * m; ++cx)
            for (long long cy = vy * m; cy < (vy + 1) * m; ++cy)
              for (long long cz = vz * m; cz < (vz + 1) * m; ++cz) {
                const long long c[3] = {cx, cy, cz};
                const Cell* cell = find_cell(c);
                if (!cell) continue;
                for (std::size_t i = 0; i < cell->xs.size(); ++i) {
                  const Vec3 p{cell->xs[i], cell->ys[i], cell->zs[i]};
                  const double d2 = (p - center).norm2();
                  if (!found || d2 < best_d2) {
                    found = true;
                    best_d2 = d2;
                    best = p;
                    best_cell[0] = cx; best_cell[1] = cy; best_cell[2] = cz;
                  }
                }
              }
          if (found && in_window(best_cell)) candidates.emplace_back((best - x).norm2(), best);
        }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (candidates.size() > static_cast<std::size_t>(k)) candidates.resize(k);
  std::vector<Vec3> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(c.second);
  return out;
}

bool CloudStore::has_point_within(const Vec3& x, double eps) const {
  if (!(eps > 0.0) || cells_.empty()) return false;
  const double eps2 = eps * eps;
  const auto& kern = kern::active();
  const auto ring = static_cast<long long>(std::ceil(eps / cell_));
  long long home[3];
  for (int a = 0; a < 3; ++a)
    home[a] = static_cast<long long>(std::floor((x[a] - bbox_.lo[a]) / cell_));
  for (long long dx = -ring; dx <= ring; ++dx)
    for (long long dy = -ring; dy <= ring; ++dy)
      for (long long dz = -ring; dz <= ring; ++dz) {
        const long long c[3] = {home[0] + dx, home[1] + dy, home[2] + dz};
        if (!packable(c)) continue;
        const auto it = cells_.find(pack(c));
        if (it == cells_.end()) continue;
        const Cell& cell = it->second;
        if (kern.any_within(x.x, x.y, x.z, cell.xs.data(), cell.ys.data(), cell.zs.data(),
                            cell.xs.size(), eps2))
          return true;
      }
  return false;
}

std::vector<Vec3> CloudStore::flatten() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(cells_.size());
  for (const auto& [key, cell] : cells_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  std::vector<Vec3> out;
  out.reserve(count_);
  for (const std::uint64_t key : keys) {
    const Cell& cell = cells_.at(key);
    for (std::size_t i = 0; i < cell.xs.size(); ++i)
      out.push_back({cell.xs[i], cell.ys[i], cell.zs[i]});
  }
  return out;
}

double default_cell_size(const Aabb& scene_bbox, double max_range) {
  double cell = 2.0 * max_range / 32.0;
  const Vec3 ext = scene_bbox.extent();
  const double largest = std::max({ext.x, ext.y, ext.z});
  return std::max(cell, largest / 128.0);
}

void export_cloud_ply(const CloudStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const std::vector<Vec3> points = store.flatten();
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  out.precision(17);
  for (const Vec3& p : points) out << p.x << " " << p.y << " " << p.z << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace nbv
