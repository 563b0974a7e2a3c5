#pragma once

#include <optional>
#include <span>

#include "nbv/occupancy/occupancy.hpp"
#include "nbv/sensor/camera.hpp"
#include "nbv/sensor/cloud.hpp"

namespace nbv {

struct GainEstimate {
  double value = 0.0;          // Monte Carlo estimate of the view's gain
  std::size_t contributing = 0;  // proxies inside the frustum and range
};

// Monte Carlo coverage-gain estimate of a candidate pose over an attached
// proxy set: the mean over ALL proxies of the clamped gain-field evaluation
// at the camera-to-point direction, with frustum/range gating and an optional
// inverse-square distance penalty 1 / (eta + dist^2). Contributions are summed
// in value order, so the estimate is exactly independent of proxy ordering.
GainEstimate estimate_gain(const ProxyPointSet& proxies, const SensorIntrinsics& intrinsics,
                           const CameraPose& pose, std::optional<double> eta = std::nullopt);

// Fraction of the reference points with a stored cloud point strictly within
// eps. The order of the reference points does not matter.
double total_coverage_metric(const CloudStore& cloud, std::span<const Vec3> reference, double eps);

// KL divergence D(softmax(gt) || softmax(pred)) between two per-view score
// vectors; 0 for identical or constant-shifted scores.
double kl_gain_divergence(std::span<const double> pred, std::span<const double> gt);

}  // namespace nbv
