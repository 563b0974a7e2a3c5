#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbv/gain/estimate.hpp"
#include "nbv/gain/gain_field.hpp"
#include "nbv/geometry/mesh.hpp"
#include "nbv/occupancy/occupancy.hpp"
#include "nbv/sensor/camera.hpp"

namespace nbv {

enum class GridKind { sphere, scene5d };

// Candidate pose discretization with its neighbor structure. The sphere grid
// is all-to-all (object protocol); the 5D scene grid connects poses one step
// apart along exactly one of x, y, z, elevation, azimuth.
struct PoseGrid {
  GridKind kind{GridKind::sphere};
  std::vector<CameraPose> poses;
  std::vector<std::vector<int>> adjacency;  // symmetric, no self edges
  std::vector<uint8_t> valid;               // 0 = collides with known volume
  std::size_t size() const { return poses.size(); }
  std::size_t valid_count() const;
};

// Poses on a sphere looking at its center: n_elev elevation bands placed at
// band centers (so poles are avoided), n_azim azimuths per band, all-to-all
// adjacency, all poses valid.
PoseGrid sphere_grid(const Vec3& center, double radius, int n_elev, int n_azim);

// Lattice shape of the 5D scene grid. Positions sit at the centers of an
// nx * ny * nz subdivision of the bounding box; elevations span
// [elev_min, elev_max] inclusive; azimuths wrap around the full circle.
struct Scene5dSpec {
  int nx{1};
  int ny{1};
  int nz{1};
  int n_elev{1};
  int n_azim{1};
  double elev_min{-0.9};
  double elev_max{0.9};
};

// 5D pose lattice over the box. A pose is flagged invalid when the occupancy
// field at its position exceeds 0.5 (collision with known-occupied volume).
PoseGrid scene5d_grid(const Aabb& bbox, const Scene5dSpec& spec, const OccupancyField& occupancy);

// Position in `candidates` with the highest score; ties break to the lowest
// index. Throws InvalidInput when empty or when sizes mismatch.
std::size_t select_nbv(std::span<const CameraPose> candidates, std::span<const double> scores);

// Normalized area under a coverage curve: trapezoidal mean over the steps
// (a single point is its own AUC). Throws InvalidInput when empty.
double auc(std::span<const double> curve);

enum class Policy {
  gain_oracle,   // proxies from oracle occupancy, oracle gain fields
  gain_carving,  // proxies from the carved occupancy, oracle gain fields
  entropy,       // Shannon entropy of the carved occupancy in the frustum
  random_walk,   // uniform choice among the valid candidates
};

const char* policy_name(Policy policy);
Policy policy_from_name(const std::string& name);  // throws InvalidInput

struct PlannerConfig {
  SensorIntrinsics intrinsics;
  Policy policy{Policy::gain_oracle};
  int steps{10};
  std::size_t proxy_count{4096};
  int gain_dirs{512};        // ray directions behind each oracle gain field
  double mu{0.0};            // shell half-width; <= 0 -> 2 * eps_cloud
  double eps{0.01};          // coverage metric tolerance
  double eps_cloud{0.005};   // cloud dedup radius (also the cell size)
  double eta{1.0};           // distance penalty, applied in scene mode only
  int carve_resolution{64};
  std::size_t p0_count{0};   // 0 -> 16,384 (sphere) / 100,000 (scene5d)
  double standoff{0.0};      // gain-field camera standoff; 0 -> default
};

// One reconstruction episode: the poses visited, the cloud growth, and the
// surface coverage against the trial's ground-truth sample set.
struct Trajectory {
  std::vector<int> pose_indices;
  std::vector<std::size_t> cloud_points;
  std::vector<double> coverage;
  uint64_t seed{0};
  std::string policy;
};

struct CoverageCurve {
  std::vector<double> values;
  double auc{0.0};
};

struct RunResult {
  Trajectory trajectory;
  CoverageCurve curve;
};

// Greedy NBV loop: draw a valid start pose whose first depth map has at
// least one return (up to 100 draws, else SamplingError), then per step
// render, accumulate the cloud, carve the occupancy grid, measure coverage,
// and move to the policy's choice among the candidates (sphere: every valid
// pose; scene5d: the valid grid neighbors of the current pose). A pose with
// no valid neighbor ends the episode early. Deterministic for a fixed
// (mesh, grid, config, seed).
RunResult run_reconstruction(const TriangleMesh& mesh, const PoseGrid& grid,
                             const PlannerConfig& config, uint64_t seed);

}  // namespace nbv
