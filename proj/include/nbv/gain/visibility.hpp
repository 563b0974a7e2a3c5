#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbv/geometry/queries.hpp"
#include "nbv/sensor/camera.hpp"

namespace nbv {

// Occlusion tests back off this fraction of the scene scale from both segment
// endpoints so surface points do not occlude themselves.
inline constexpr double kOcclusionDelta = 1e-4;

// Half-angle cosine of the foot-alignment cone: the displacement from the
// closest surface point must stay within 30 degrees of the inward normal for
// a point to count as surface-attached (guards feet picked across edges).
inline constexpr double kFootAlignmentCos = 0.8660254037844387;

// Past sensor placements sharing one intrinsics block.
struct PoseHistory {
  SensorIntrinsics intrinsics;
  std::vector<CameraPose> poses;
};

// Point-wise visibility v_c(x): x inside the frustum and working range of c,
// and the open segment from the camera to x unoccluded by the scene.
bool visible(const MeshQuery& scene, const SensorIntrinsics& intrinsics, const CameraPose& pose,
             const Vec3& x);

// Knowledge indicator gamma_H(x): 1 iff any pose in the history sees x.
bool knowledge_indicator(const MeshQuery& scene, const PoseHistory& history, const Vec3& x);

// Batch gamma_H over surface samples.
std::vector<uint8_t> knowledge_mask(const MeshQuery& scene, const PoseHistory& history,
                                    const SurfaceSamples& samples);

// Fraction of surface samples visible from one pose.
double surface_coverage(const MeshQuery& scene, const SensorIntrinsics& intrinsics,
                        const CameraPose& pose, const SurfaceSamples& samples);

// Union coverage C(H): fraction visible from at least one pose of H.
double surface_coverage(const MeshQuery& scene, const PoseHistory& history,
                        const SurfaceSamples& samples);

// Ground-truth one-step gain G_H(c): mean over samples of (1 - gamma_H) * v_c.
double coverage_gain_gt(const MeshQuery& scene, const PoseHistory& history,
                        const CameraPose& candidate, const SurfaceSamples& samples);

// Same with a precomputed knowledge mask (scoring many candidates against one
// history) and a multi-pose candidate treated as one sensor (union visibility).
double coverage_gain_gt(const MeshQuery& scene, const std::vector<uint8_t>& mask,
                        const SensorIntrinsics& intrinsics, std::span<const CameraPose> candidate,
                        const SurfaceSamples& samples);

// Indicator of the volumetric gain neighborhood of candidate c at x: x lies
// in the inward shell of half-width mu (signed distance in [0, mu)), its
// displacement from the foot point stays inside the alignment cone, the
// history has not seen the foot, and c sees the foot.
bool neighborhood_gain(const MeshQuery& scene, const PoseHistory& history,
                       const CameraPose& candidate, double mu, const Vec3& x);

// Rig variant: the candidate is a pose set acting as one sensor.
bool neighborhood_gain(const MeshQuery& scene, const PoseHistory& history,
                       std::span<const CameraPose> candidate, const SensorIntrinsics& intrinsics,
                       double mu, const Vec3& x);

}  // namespace nbv
