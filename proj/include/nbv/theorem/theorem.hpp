#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbv/gain/visibility.hpp"
#include "nbv/geometry/queries.hpp"
#include "nbv/geometry/shapes.hpp"

namespace nbv {

// One row of a theorem trial: the volumetric estimate and its deviation from
// the surface-side prediction at one shell half-width.
struct TheoremTrialResult {
  double mu{0.0};
  double volume_integral{0.0};
  double gap{0.0};
  bool operator==(const TheoremTrialResult&) const = default;
};

// A complete convergence-order experiment on one analytic shape: the volume
// integral of the neighborhood gain is compared against mu * (area/volume) *
// coverage gain over a decreasing mu schedule; the deviation should shrink
// like mu^2.
struct TheoremTrial {
  AnalyticShape shape;
  PoseHistory history;                // candidate shares these intrinsics
  std::vector<CameraPose> candidate;  // one pose or a rig acting as one sensor
  std::vector<double> mu_values;      // strictly decreasing, all > 0
  std::size_t volume_samples{0};      // accepted interior samples per mu
  std::size_t surface_samples{0};     // for the ground-truth coverage gain
  uint64_t seed{0};
  std::vector<TheoremTrialResult> results;  // filled by run_theorem_trial
};

// Monte Carlo estimate of (1/V) * integral of the neighborhood-gain indicator
// over the solid: uniform rejection sampling in the mesh bounding box keeps n
// interior points and averages neighborhood_gain over them. The candidate rig
// shares the history's intrinsics.
// Throws InvalidInput (n < 10^4, mu <= 0, empty candidate or scene) and
// SamplingError (fewer than n interior points within 100*n draws).
double volume_integral_g(const MeshQuery& scene, const PoseHistory& history,
                         std::span<const CameraPose> candidate, double mu, std::size_t n,
                         uint64_t seed);

// |volume_integral - mu * (area/volume) * coverage_gain| — the deviation the
// theorem bounds by a constant times mu^2.
double theorem_gap(const AnalyticShape& shape, double mu, double volume_integral_estimate,
                   double coverage_gain_estimate);

// End-to-end gap at one mu: estimates the volume integral (volume_samples
// interior points) and the ground-truth coverage gain (surface_samples
// area-weighted surface points), then applies theorem_gap. Enforces
// mu <= 0.5 * shape.reach and surface_samples >= 10^5.
TheoremTrialResult evaluate_theorem_gap(const AnalyticShape& shape, const MeshQuery& scene,
                                        const PoseHistory& history,
                                        std::span<const CameraPose> candidate, double mu,
                                        std::size_t volume_samples, std::size_t surface_samples,
                                        uint64_t seed);

// Fills trial.results: one coverage-gain estimate per trial (shared by the
// whole mu schedule, as the prediction does not depend on mu) plus one volume
// integral per mu, each on an independent derived seed stream. Enforces the
// trial invariants with InvalidInput: mu strictly decreasing, positive, and
// at most half the shape's reach; non-empty candidate; volume_samples >= 10^4
// and surface_samples >= 10^5.
void run_theorem_trial(TheoremTrial& trial);

// Least-squares slope of log(gap) against log(mu). `conclusive` is false when
// any gap sits at the Monte Carlo noise floor (gap <= 0, or below three of
// its provided sigmas); the slope is meaningful only when conclusive.
struct OrderFit {
  bool conclusive{false};
  double slope{0.0};
};

// Requires >= 4 strictly decreasing positive mu values spanning close to a
// decade (max/min >= 8, admitting the canonical {0.2, 0.1, 0.05, 0.025}
// schedule). sigmas, when non-empty, must match gaps in length; pass the
// standard error of each gap estimate to enable the noise-floor refusal.
OrderFit order_fit(std::span<const double> mu, std::span<const double> gaps,
                   std::span<const double> sigmas = {});

}  // namespace nbv
