#include "nbv/theorem/theorem.hpp"

#include <cmath>
#include <string>

#include "nbv/core/errors.hpp"
#include "nbv/core/rng.hpp"

namespace nbv {

double volume_integral_g(const MeshQuery& scene, const PoseHistory& history,
                         std::span<const CameraPose> candidate, double mu, std::size_t n,
                         uint64_t seed) {
  if (n < 10000) throw InvalidInput("volume_integral_g: need at least 10^4 interior samples");
  if (!(mu > 0.0)) throw InvalidInput("volume_integral_g: mu must be positive");
  if (candidate.empty()) throw InvalidInput("volume_integral_g: empty candidate pose set");
  if (scene.empty()) throw InvalidInput("volume_integral_g: empty scene");

  const Aabb box = scene.mesh().bbox;
  Rng rng = named_stream(seed, "theorem_volume");
  const std::size_t max_draws = 100 * n;
  std::size_t draws = 0;
  std::size_t accepted = 0;
  std::size_t hits = 0;
  while (accepted < n && draws < max_draws) {
    ++draws;
    const Vec3 x = rng.uniform_in_box(box);
    if (!scene.point_inside(x)) continue;
    ++accepted;
    if (neighborhood_gain(scene, history, candidate, history.intrinsics, mu, x)) ++hits;
  }
  if (accepted < n) {
    throw SamplingError("volume_integral_g: rejection starved, interior acceptance rate " +
                        std::to_string(static_cast<double>(accepted) /
                                       static_cast<double>(draws)) +
                        " over " + std::to_string(draws) + " draws");
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double theorem_gap(const AnalyticShape& shape, double mu, double volume_integral_estimate,
                   double coverage_gain_estimate) {
  if (!(mu > 0.0)) throw InvalidInput("theorem_gap: mu must be positive");
  if (!(shape.exact_area > 0.0) || !(shape.exact_volume > 0.0)) {
    throw InvalidInput("theorem_gap: shape lacks exact area/volume");
  }
  const double predicted =
      mu * (shape.exact_area / shape.exact_volume) * coverage_gain_estimate;
  return std::abs(volume_integral_estimate - predicted);
}

namespace {

void check_trial_mu(const AnalyticShape& shape, double mu) {
  if (!(mu > 0.0)) throw InvalidInput("theorem trial: mu must be positive");
  if (!(shape.reach > 0.0)) throw InvalidInput("theorem trial: shape has no positive reach");
  if (mu > 0.5 * shape.reach) {
    throw InvalidInput("theorem trial: mu " + std::to_string(mu) + " exceeds half the reach " +
                       std::to_string(shape.reach) + " of shape " + shape.name);
  }
}

double estimate_coverage_gain(const AnalyticShape& shape, const MeshQuery& scene,
                              const PoseHistory& history, std::span<const CameraPose> candidate,
                              std::size_t surface_samples, uint64_t seed) {
  if (surface_samples < 100000) {
    throw InvalidInput("theorem trial: need at least 10^5 surface samples");
  }
  const SurfaceSamples samples = sample_surface(shape.mesh, surface_samples, seed);
  const std::vector<uint8_t> mask = knowledge_mask(scene, history, samples);
  return coverage_gain_gt(scene, mask, history.intrinsics, candidate, samples);
}

// Deterministic per-mu child seeds so every volume integral in a trial runs
// on an independent stream.
uint64_t child_seed(uint64_t seed, uint64_t index) {
  uint64_t mix = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64(mix);
}

}  // namespace

TheoremTrialResult evaluate_theorem_gap(const AnalyticShape& shape, const MeshQuery& scene,
                                        const PoseHistory& history,
                                        std::span<const CameraPose> candidate, double mu,
                                        std::size_t volume_samples, std::size_t surface_samples,
                                        uint64_t seed) {
  check_trial_mu(shape, mu);
  const double gain =
      estimate_coverage_gain(shape, scene, history, candidate, surface_samples, seed);
  const double vol = volume_integral_g(scene, history, candidate, mu, volume_samples, seed);
  return {mu, vol, theorem_gap(shape, mu, vol, gain)};
}

void run_theorem_trial(TheoremTrial& trial) {
  if (trial.mu_values.empty()) throw InvalidInput("theorem trial: empty mu schedule");
  for (std::size_t i = 0; i < trial.mu_values.size(); ++i) {
    check_trial_mu(trial.shape, trial.mu_values[i]);
    if (i > 0 && !(trial.mu_values[i] < trial.mu_values[i - 1])) {
      throw InvalidInput("theorem trial: mu values must be strictly decreasing");
    }
  }
  if (trial.candidate.empty()) throw InvalidInput("theorem trial: empty candidate pose set");

  const MeshQuery scene(trial.shape.mesh);
  const double gain = estimate_coverage_gain(trial.shape, scene, trial.history, trial.candidate,
                                             trial.surface_samples, trial.seed);
  trial.results.clear();
  trial.results.reserve(trial.mu_values.size());
  for (std::size_t i = 0; i < trial.mu_values.size(); ++i) {
    const double mu = trial.mu_values[i];
    const double vol = volume_integral_g(scene, trial.history, trial.candidate, mu,
                                         trial.volume_samples, child_seed(trial.seed, i));
    trial.results.push_back({mu, vol, theorem_gap(trial.shape, mu, vol, gain)});
  }
}

OrderFit order_fit(std::span<const double> mu, std::span<const double> gaps,
                   std::span<const double> sigmas) {
  if (mu.size() != gaps.size()) throw InvalidInput("order_fit: mu/gap size mismatch");
  if (!sigmas.empty() && sigmas.size() != gaps.size()) {
    throw InvalidInput("order_fit: sigma size mismatch");
  }
  if (mu.size() < 4) throw InvalidInput("order_fit: need at least 4 mu values");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu[i] > 0.0)) throw InvalidInput("order_fit: mu values must be positive");
    if (i > 0 && !(mu[i] < mu[i - 1])) {
      throw InvalidInput("order_fit: mu values must be strictly decreasing");
    }
  }
  if (mu.front() / mu.back() < 8.0 * (1.0 - 1e-12)) {
    throw InvalidInput("order_fit: mu schedule must span close to a decade (max/min >= 8)");
  }

  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!(gaps[i] > 0.0)) return {false, 0.0};
    if (!sigmas.empty() && gaps[i] < 3.0 * sigmas[i]) return {false, 0.0};
  }

  const std::size_t n = mu.size();
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += std::log(mu[i]);
    sy += std::log(gaps[i]);
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(mu[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(gaps[i]) - my);
  }
  return {true, sxy / sxx};
}

}  // namespace nbv
