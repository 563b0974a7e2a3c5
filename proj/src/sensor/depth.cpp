#include "nbv/sensor/depth.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>

#include "nbv/core/errors.hpp"

namespace nbv {

DepthMap render_depth(const MeshQuery& scene, const CameraPose& pose,
                      const SensorIntrinsics& intrinsics) {
  intrinsics.validate();
  pose.validate();
  DepthMap map;
  map.intrinsics = intrinsics;
  map.pose = pose;
  map.depth.assign(static_cast<std::size_t>(intrinsics.width) * intrinsics.height, 0.0);
  for (int py = 0; py < intrinsics.height; ++py) {
    for (int px = 0; px < intrinsics.width; ++px) {
      const Vec3 dir = pose.to_world_dir(pixel_ray(intrinsics, px, py));
      const auto hit =
          scene.ray_intersect(pose.position, dir, 0.0, std::numeric_limits<double>::infinity());
      if (!hit) continue;
      if (hit->t < intrinsics.min_range || hit->t > intrinsics.max_range) continue;
      map.depth[static_cast<std::size_t>(py) * intrinsics.width + px] = hit->t;
    }
  }
  return map;
}

std::vector<Vec3> backproject(const DepthMap& map) {
  std::vector<Vec3> points;
  for (int py = 0; py < map.intrinsics.height; ++py) {
    for (int px = 0; px < map.intrinsics.width; ++px) {
      const double d = map.at(px, py);
      if (d <= 0.0) continue;
      const Vec3 dir = map.pose.to_world_dir(pixel_ray(map.intrinsics, px, py));
      points.push_back(map.pose.position + dir * d);
    }
  }
  return points;
}

void write_depth_pgm(const DepthMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P5\n" << map.intrinsics.width << " " << map.intrinsics.height << "\n65535\n";
  for (double d : map.depth) {
    const double mm = std::round(d * 1000.0);
    const auto q = static_cast<std::uint16_t>(std::min(std::max(mm, 0.0), 65535.0));
    const unsigned char bytes[2] = {static_cast<unsigned char>(q >> 8),
                                    static_cast<unsigned char>(q & 0xff)};
    out.write(reinterpret_cast<const char*>(bytes), 2);
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace nbv
