#pragma once

#include <string>
#include <vector>

#include "nbv/geometry/queries.hpp"
#include "nbv/sensor/camera.hpp"

namespace nbv {

// A rendered range image. `depth` is row-major (index py * width + px) and
// holds the hit distance along the pixel ray in meters; 0.0 marks no return.
struct DepthMap {
  SensorIntrinsics intrinsics;
  CameraPose pose;
  std::vector<double> depth;

  double at(int px, int py) const { return depth[static_cast<std::size_t>(py) * intrinsics.width + px]; }
  bool has_return(int px, int py) const { return at(px, py) > 0.0; }
};

// Casts one ray through every pixel center; a hit registers only when its
// distance falls inside [min_range, max_range] (a too-near or too-far surface
// yields no return, it does not expose what lies behind).
DepthMap render_depth(const MeshQuery& scene, const CameraPose& pose,
                      const SensorIntrinsics& intrinsics);

// World-space points of every returning pixel, in row-major pixel order.
std::vector<Vec3> backproject(const DepthMap& map);

// 16-bit big-endian binary PGM, depth quantized to millimeters (clamped to
// 65535); no-return pixels write 0.
void write_depth_pgm(const DepthMap& map, const std::string& path);

}  // namespace nbv
