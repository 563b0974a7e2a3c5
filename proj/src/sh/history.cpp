#include "nbv/sh/history.hpp"

#include <cmath>

#include "nbv/sh/sphere_dirs.hpp"

namespace nbv {
namespace {

const std::vector<Vec3>& history_dirs() {
  static const std::vector<Vec3> dirs = symmetric_fibonacci_directions(500);
  return dirs;
}

const ShProjector& history_projector() {
  static const ShProjector proj(history_dirs());
  return proj;
}

}  // namespace

ShVector camera_history_feature(const Vec3& x, const std::vector<CameraPose>& history,
                                const SensorIntrinsics& intrinsics) {
  std::vector<Vec3> bearings;
  for (const CameraPose& pose : history) {
    if (!in_frustum(intrinsics, pose, x)) continue;
    const Vec3 to_cam = pose.position - x;
    if (to_cam.norm() < 1e-12) continue;  // camera exactly at x has no bearing
    bearings.push_back(to_cam.normalized());
  }
  if (bearings.empty()) return ShVector{};

  const std::vector<Vec3>& dirs = history_dirs();
  std::vector<double> values(dirs.size(), 0.0);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    double f = 0.0;
    for (const Vec3& u : bearings) f += std::exp(kHistoryKernelKappa * (dot(dirs[i], u) - 1.0));
    values[i] = f;
  }
  return history_projector().project(values);
}

}  // namespace nbv
