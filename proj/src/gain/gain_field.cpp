#include "nbv/gain/gain_field.hpp"

#include <cmath>
#include <utility>

#include "nbv/core/errors.hpp"
#include "nbv/sh/history.hpp"
#include "nbv/sh/sphere_dirs.hpp"

namespace nbv {

GainFieldOracle::GainFieldOracle(const MeshQuery& scene, PoseHistory history, const Params& params)
    : scene_(&scene),
      history_(std::move(history)),
      params_(params),
      standoff_(params.standoff > 0.0 ? params.standoff : 2.0 * scene.scene_scale()),
      dirs_(fibonacci_directions(params.n_dirs)),
      projector_(dirs_) {
  if (!(params.mu > 0.0)) throw InvalidInput("gain field needs a positive shell half-width mu");
  if (params.n_dirs < kShCoeffCount)
    throw InvalidInput("gain field needs at least as many probe directions as basis functions");
  if (scene.empty()) throw InvalidInput("gain field needs a non-empty scene");
}

ShVector GainFieldOracle::gain_at(const Vec3& x, std::vector<double>& values) const {
  const auto foot = scene_->closest_surface_point(x, params_.mu);
  if (!foot) return ShVector{};
  const double lambda = foot->distance;
  const double tiny = 1e-7 * scene_->scene_scale();
  if (lambda >= tiny) {
    if (!scene_->point_inside(x)) return ShVector{};
    const Vec3 disp = (x - foot->point) * (1.0 / lambda);
    if (dot(disp, foot->inward_normal) < kFootAlignmentCos) return ShVector{};
  }
  if (knowledge_indicator(*scene_, history_, foot->point)) return ShVector{};

  const double delta = kOcclusionDelta * scene_->scene_scale();
  values.resize(dirs_.size());
  for (std::size_t k = 0; k < dirs_.size(); ++k) {
    const Vec3 cam = x - dirs_[k] * standoff_;
    const Vec3 seg = cam - foot->point;
    const double dist = seg.norm();
    const bool blocked =
        scene_->segment_blocked(foot->point, seg * (1.0 / dist), delta, dist - delta);
    values[k] = blocked ? 0.0 : 1.0;
  }
  return projector_.project(values);
}

void GainFieldOracle::attach_gains(ProxyPointSet& proxies) const {
  proxies.gains.assign(proxies.size(), ShVector{});
  std::vector<double> scratch;
  for (std::size_t i = 0; i < proxies.size(); ++i)
    proxies.gains[i] = gain_at(proxies.points[i], scratch);
}

void GainFieldOracle::attach(ProxyPointSet& proxies) const {
  attach_gains(proxies);
  proxies.history_features.assign(proxies.size(), ShVector{});
  for (std::size_t i = 0; i < proxies.size(); ++i)
    proxies.history_features[i] =
        camera_history_feature(proxies.points[i], history_.poses, history_.intrinsics);
}

}  // namespace nbv
