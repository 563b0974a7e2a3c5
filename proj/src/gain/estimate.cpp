#include "nbv/gain/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nbv/core/errors.hpp"
#include "nbv/sh/sh.hpp"

namespace nbv {

GainEstimate estimate_gain(const ProxyPointSet& proxies, const SensorIntrinsics& intrinsics,
                           const CameraPose& pose, std::optional<double> eta) {
  if (proxies.size() == 0) throw InvalidInput("gain estimation needs a non-empty proxy set");
  if (proxies.gains.size() != proxies.size())
    throw InvalidInput("proxy set has no attached gain field");
  if (eta && !(*eta > 0.0)) throw InvalidInput("distance penalty eta must be positive");

  GainEstimate est;
  std::vector<double> contributions;
  contributions.reserve(64);
  for (std::size_t i = 0; i < proxies.size(); ++i) {
    const Vec3& x = proxies.points[i];
    if (!in_frustum(intrinsics, pose, x)) continue;
    const Vec3 d = x - pose.position;
    const double dist = d.norm();
    if (dist < intrinsics.min_range || dist > intrinsics.max_range) continue;
    ++est.contributing;
    double e = sh_eval(proxies.gains[i], d * (1.0 / dist));
    if (e <= 0.0) continue;
    if (eta) e /= (*eta + dist * dist);
    contributions.push_back(e);
  }
  std::sort(contributions.begin(), contributions.end());
  double sum = 0.0;
  for (const double c : contributions) sum += c;
  est.value = sum / static_cast<double>(proxies.size());
  return est;
}

double total_coverage_metric(const CloudStore& cloud, std::span<const Vec3> reference,
                             double eps) {
  if (reference.empty()) throw InvalidInput("coverage metric needs reference points");
  if (!(eps > 0.0)) throw InvalidInput("coverage radius eps must be positive");
  std::size_t covered = 0;
  for (const Vec3& p : reference)
    if (cloud.has_point_within(p, eps)) ++covered;
  return static_cast<double>(covered) / static_cast<double>(reference.size());
}

double kl_gain_divergence(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size())
    throw InvalidInput("KL divergence needs equal-length score vectors");
  if (pred.size() < 2) throw InvalidInput("KL divergence needs at least two scores");

  const auto log_softmax = [](std::span<const double> v, std::vector<double>& out) {
    const double hi = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (const double x : v) sum += std::exp(x - hi);
    const double lse = hi + std::log(sum);
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
  };

  std::vector<double> lp, lq;
  log_softmax(gt, lp);
  log_softmax(pred, lq);
  double kl = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) kl += std::exp(lp[i]) * (lp[i] - lq[i]);
  return std::max(0.0, kl);
}

}  // namespace nbv
