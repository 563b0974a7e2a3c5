#include "nbv/gain/visibility.hpp"

#include <algorithm>
#include <cmath>

#include "nbv/core/errors.hpp"

namespace nbv {

bool visible(const MeshQuery& scene, const SensorIntrinsics& intrinsics, const CameraPose& pose,
             const Vec3& x) {
  if (!in_frustum(intrinsics, pose, x)) return false;
  const Vec3 d = x - pose.position;
  const double dist = d.norm();
  if (dist < intrinsics.min_range || dist > intrinsics.max_range) return false;
  if (scene.empty()) return true;
  const double delta = kOcclusionDelta * scene.scene_scale();
  return !scene.segment_blocked(pose.position, d * (1.0 / dist), delta, dist - delta);
}

bool knowledge_indicator(const MeshQuery& scene, const PoseHistory& history, const Vec3& x) {
  for (const CameraPose& pose : history.poses)
    if (visible(scene, history.intrinsics, pose, x)) return true;
  return false;
}

std::vector<uint8_t> knowledge_mask(const MeshQuery& scene, const PoseHistory& history,
                                    const SurfaceSamples& samples) {
  std::vector<uint8_t> mask(samples.size(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i)
    mask[i] = knowledge_indicator(scene, history, samples.points[i]) ? 1 : 0;
  return mask;
}

double surface_coverage(const MeshQuery& scene, const SensorIntrinsics& intrinsics,
                        const CameraPose& pose, const SurfaceSamples& samples) {
  if (samples.size() == 0) throw InvalidInput("surface coverage needs at least one sample");
  std::size_t seen = 0;
  for (const Vec3& x : samples.points)
    if (visible(scene, intrinsics, pose, x)) ++seen;
  return static_cast<double>(seen) / static_cast<double>(samples.size());
}

double surface_coverage(const MeshQuery& scene, const PoseHistory& history,
                        const SurfaceSamples& samples) {
  if (samples.size() == 0) throw InvalidInput("surface coverage needs at least one sample");
  std::size_t seen = 0;
  for (const Vec3& x : samples.points)
    if (knowledge_indicator(scene, history, x)) ++seen;
  return static_cast<double>(seen) / static_cast<double>(samples.size());
}

double coverage_gain_gt(const MeshQuery& scene, const PoseHistory& history,
                        const CameraPose& candidate, const SurfaceSamples& samples) {
  const std::vector<uint8_t> mask = knowledge_mask(scene, history, samples);
  return coverage_gain_gt(scene, mask, history.intrinsics, std::span(&candidate, 1), samples);
}

double coverage_gain_gt(const MeshQuery& scene, const std::vector<uint8_t>& mask,
                        const SensorIntrinsics& intrinsics, std::span<const CameraPose> candidate,
                        const SurfaceSamples& samples) {
  if (samples.size() == 0) throw InvalidInput("coverage gain needs at least one sample");
  if (mask.size() != samples.size())
    throw InvalidInput("knowledge mask size does not match the sample set");
  std::size_t gained = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (mask[i]) continue;
    for (const CameraPose& pose : candidate) {
      if (visible(scene, intrinsics, pose, samples.points[i])) {
        ++gained;
        break;
      }
    }
  }
  return static_cast<double>(gained) / static_cast<double>(samples.size());
}

bool neighborhood_gain(const MeshQuery& scene, const PoseHistory& history,
                       const CameraPose& candidate, double mu, const Vec3& x) {
  return neighborhood_gain(scene, history, std::span(&candidate, 1), history.intrinsics, mu, x);
}

bool neighborhood_gain(const MeshQuery& scene, const PoseHistory& history,
                       std::span<const CameraPose> candidate, const SensorIntrinsics& intrinsics,
                       double mu, const Vec3& x) {
  if (!(mu > 0.0)) throw InvalidInput("neighborhood half-width mu must be positive");
  if (scene.empty()) return false;

  const auto foot = scene.closest_surface_point(x, mu);
  if (!foot) return false;  // no surface within mu
  const double lambda = foot->distance;
  const double tiny = 1e-7 * scene.scene_scale();
  if (lambda >= tiny) {
    if (!scene.point_inside(x)) return false;  // signed distance < 0
    const Vec3 disp = (x - foot->point) * (1.0 / lambda);
    if (dot(disp, foot->inward_normal) < kFootAlignmentCos) return false;
  }
  if (knowledge_indicator(scene, history, foot->point)) return false;
  for (const CameraPose& pose : candidate)
    if (visible(scene, intrinsics, pose, foot->point)) return true;
  return false;
}

}  // namespace nbv
