#pragma once

#include <vector>

#include "nbv/sensor/camera.hpp"
#include "nbv/sh/sh.hpp"

namespace nbv {

// Smoothing kernel sharpness for a single camera's lobe. exp(kappa(d.u - 1))
// keeps the lobe representable by the degree-7 basis while staying peaked at
// the camera bearing.
inline constexpr double kHistoryKernelKappa = 10.0;

// SH feature of the pose history as seen from x: every pose whose frustum
// contains x contributes a smooth lobe around its bearing (c_pos - x)
// normalized; the summed function is least-squares projected over a fixed
// antipodally-symmetric 1000-direction set (so even functions keep exactly
// vanishing odd-degree coefficients). No pose selected -> zero vector.
ShVector camera_history_feature(const Vec3& x, const std::vector<CameraPose>& history,
                                const SensorIntrinsics& intrinsics);

}  // namespace nbv
