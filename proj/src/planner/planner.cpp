#include "nbv/planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "nbv/bench/stats.hpp"
#include "nbv/core/errors.hpp"
#include "nbv/core/rng.hpp"
#include "nbv/gain/visibility.hpp"
#include "nbv/sensor/cloud.hpp"
#include "nbv/sensor/depth.hpp"

namespace nbv {

std::size_t PoseGrid::valid_count() const {
  std::size_t n = 0;
  for (const uint8_t v : valid) n += v ? 1 : 0;
  return n;
}

PoseGrid sphere_grid(const Vec3& center, double radius, int n_elev, int n_azim) {
  if (!(radius > 0.0)) throw InvalidInput("sphere_grid: radius must be positive");
  if (n_elev < 1 || n_azim < 1) throw InvalidInput("sphere_grid: counts must be >= 1");

  PoseGrid grid;
  grid.kind = GridKind::sphere;
  const double two_pi = 6.283185307179586;
  for (int i = 0; i < n_elev; ++i) {
    // Band centers: poles are avoided, a single band sits on the equator.
    const double elev = -1.5707963267948966 + 3.141592653589793 * (i + 0.5) / n_elev;
    for (int j = 0; j < n_azim; ++j) {
      const double azim = two_pi * j / n_azim;
      const Vec3 dir{std::cos(elev) * std::cos(azim), std::cos(elev) * std::sin(azim),
                     std::sin(elev)};
      grid.poses.push_back(CameraPose::look_at(center + dir * radius, center));
    }
  }

  const int n = static_cast<int>(grid.poses.size());
  grid.adjacency.resize(grid.poses.size());
  for (int a = 0; a < n; ++a) {
    grid.adjacency[a].reserve(n - 1);
    for (int b = 0; b < n; ++b) {
      if (b != a) grid.adjacency[a].push_back(b);
    }
  }
  grid.valid.assign(grid.poses.size(), 1);
  return grid;
}

PoseGrid scene5d_grid(const Aabb& bbox, const Scene5dSpec& spec,
                      const OccupancyField& occupancy) {
  if (!bbox.valid() || !(bbox.extent().x > 0.0) || !(bbox.extent().y > 0.0) ||
      !(bbox.extent().z > 0.0)) {
    throw InvalidInput("scene5d_grid: bounding box must be non-degenerate");
  }
  if (spec.nx < 1 || spec.ny < 1 || spec.nz < 1 || spec.n_elev < 1 || spec.n_azim < 1) {
    throw InvalidInput("scene5d_grid: lattice counts must be >= 1");
  }
  if (!(spec.elev_min <= spec.elev_max) || std::abs(spec.elev_min) > 1.5707963267948966 ||
      std::abs(spec.elev_max) > 1.5707963267948966) {
    throw InvalidInput("scene5d_grid: elevation range must be ordered within [-pi/2, pi/2]");
  }

  PoseGrid grid;
  grid.kind = GridKind::scene5d;
  const Vec3 cell{bbox.extent().x / spec.nx, bbox.extent().y / spec.ny,
                  bbox.extent().z / spec.nz};
  const double two_pi = 6.283185307179586;

  const auto elevation_of = [&](int ie) {
    if (spec.n_elev == 1) return 0.5 * (spec.elev_min + spec.elev_max);
    return spec.elev_min + (spec.elev_max - spec.elev_min) * ie / (spec.n_elev - 1);
  };

  for (int ix = 0; ix < spec.nx; ++ix) {
    for (int iy = 0; iy < spec.ny; ++iy) {
      for (int iz = 0; iz < spec.nz; ++iz) {
        const Vec3 pos{bbox.lo.x + cell.x * (ix + 0.5), bbox.lo.y + cell.y * (iy + 0.5),
                       bbox.lo.z + cell.z * (iz + 0.5)};
        const bool pos_valid = occupancy.occupancy(pos) <= 0.5;
        for (int ie = 0; ie < spec.n_elev; ++ie) {
          for (int ia = 0; ia < spec.n_azim; ++ia) {
            grid.poses.push_back(
                CameraPose::from_elev_azim(pos, elevation_of(ie), two_pi * ia / spec.n_azim));
            grid.valid.push_back(pos_valid ? 1 : 0);
          }
        }
      }
    }
  }

  const auto flat = [&](int ix, int iy, int iz, int ie, int ia) {
    return (((ix * spec.ny + iy) * spec.nz + iz) * spec.n_elev + ie) * spec.n_azim + ia;
  };

  grid.adjacency.resize(grid.poses.size());
  for (int ix = 0; ix < spec.nx; ++ix) {
    for (int iy = 0; iy < spec.ny; ++iy) {
      for (int iz = 0; iz < spec.nz; ++iz) {
        for (int ie = 0; ie < spec.n_elev; ++ie) {
          for (int ia = 0; ia < spec.n_azim; ++ia) {
            auto& nbrs = grid.adjacency[flat(ix, iy, iz, ie, ia)];
            const auto add = [&](int jx, int jy, int jz, int je, int ja) {
              const int index = flat(jx, jy, jz, je, ja);
              if (index != flat(ix, iy, iz, ie, ia) &&
                  std::find(nbrs.begin(), nbrs.end(), index) == nbrs.end()) {
                nbrs.push_back(index);
              }
            };
            if (ix > 0) add(ix - 1, iy, iz, ie, ia);
            if (ix + 1 < spec.nx) add(ix + 1, iy, iz, ie, ia);
            if (iy > 0) add(ix, iy - 1, iz, ie, ia);
            if (iy + 1 < spec.ny) add(ix, iy + 1, iz, ie, ia);
            if (iz > 0) add(ix, iy, iz - 1, ie, ia);
            if (iz + 1 < spec.nz) add(ix, iy, iz + 1, ie, ia);
            if (ie > 0) add(ix, iy, iz, ie - 1, ia);
            if (ie + 1 < spec.n_elev) add(ix, iy, iz, ie + 1, ia);
            if (spec.n_azim > 1) {
              add(ix, iy, iz, ie, (ia + 1) % spec.n_azim);
              add(ix, iy, iz, ie, (ia + spec.n_azim - 1) % spec.n_azim);
            }
          }
        }
      }
    }
  }
  return grid;
}

std::size_t select_nbv(std::span<const CameraPose> candidates, std::span<const double> scores) {
  if (candidates.empty()) throw InvalidInput("select_nbv: no candidates");
  if (candidates.size() != scores.size()) {
    throw InvalidInput("select_nbv: candidate/score size mismatch");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;  // strict: ties keep the lowest index
  }
  return best;
}

double auc(std::span<const double> curve) {
  if (curve.empty()) throw InvalidInput("auc: empty curve");
  if (curve.size() == 1) return curve[0];
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    area += 0.5 * (curve[i] + curve[i + 1]);
  }
  return area / static_cast<double>(curve.size() - 1);
}

const char* policy_name(Policy policy) {
  switch (policy) {
    case Policy::gain_oracle: return "gain-oracle";
    case Policy::gain_carving: return "gain-carving";
    case Policy::entropy: return "entropy";
    case Policy::random_walk: return "random";
  }
  throw InvalidInput("policy_name: unknown policy");
}

Policy policy_from_name(const std::string& name) {
  if (name == "gain-oracle") return Policy::gain_oracle;
  if (name == "gain-carving") return Policy::gain_carving;
  if (name == "entropy") return Policy::entropy;
  if (name == "random") return Policy::random_walk;
  throw InvalidInput("unknown policy '" + name +
                     "' (expected gain-oracle, gain-carving, entropy, or random)");
}

namespace {

bool any_return(const DepthMap& map) {
  for (const double d : map.depth) {
    if (d > 0.0) return true;
  }
  return false;
}

double entropy_score(const ProxyPointSet& proxies, const SensorIntrinsics& intrinsics,
                     const CameraPose& pose, std::optional<double> eta) {
  double total = 0.0;
  for (std::size_t i = 0; i < proxies.points.size(); ++i) {
    const Vec3& x = proxies.points[i];
    if (!in_frustum(intrinsics, pose, x)) continue;
    const double dist = (x - pose.position).norm();
    if (dist < intrinsics.min_range || dist > intrinsics.max_range) continue;
    double term = binary_entropy(proxies.probs[i]);
    if (eta) term /= (*eta + dist * dist);
    total += term;
  }
  return total;
}

}  // namespace

RunResult run_reconstruction(const TriangleMesh& mesh, const PoseGrid& grid,
                             const PlannerConfig& config, uint64_t seed) {
  config.intrinsics.validate();
  if (config.steps < 1) throw InvalidInput("run_reconstruction: steps must be >= 1");
  if (grid.poses.empty()) throw InvalidInput("run_reconstruction: empty pose grid");
  if (grid.valid.size() != grid.poses.size() || grid.adjacency.size() != grid.poses.size()) {
    throw InvalidInput("run_reconstruction: malformed pose grid");
  }
  if (config.proxy_count == 0) throw InvalidInput("run_reconstruction: proxy_count must be >= 1");
  if (!(config.eps > 0.0) || !(config.eps_cloud > 0.0) || !(config.eta > 0.0)) {
    throw InvalidInput("run_reconstruction: eps, eps_cloud and eta must be positive");
  }

  const MeshQuery scene(mesh);
  if (scene.empty()) throw InvalidInput("run_reconstruction: empty mesh");

  // Ground-truth reference samples; equal seeds share them across policies so
  // paired comparisons measure the policy, not the reference draw.
  const std::size_t p0_count =
      config.p0_count != 0 ? config.p0_count
                           : (grid.kind == GridKind::sphere ? std::size_t{16384}
                                                            : std::size_t{100000});
  const SurfaceSamples p0 =
      sample_surface(mesh, p0_count, derive_seed(seed, "ground_truth_cloud"));

  Aabb box = mesh.bbox;
  const double pad = 1e-3 * std::max(1.0, box.diagonal());
  box.lo = box.lo - Vec3{pad, pad, pad};
  box.hi = box.hi + Vec3{pad, pad, pad};

  CloudStore cloud(box, config.eps_cloud);
  CarvingGrid::Params carve_params;
  carve_params.resolution = config.carve_resolution;
  carve_params.eps_cloud = config.eps_cloud;
  CarvingGrid carving(box, carve_params, &cloud);
  const OracleOccupancy oracle_occ(scene);

  const double mu = config.mu > 0.0 ? config.mu : 2.0 * config.eps_cloud;
  const bool scene_mode = grid.kind == GridKind::scene5d;
  const std::optional<double> eta =
      scene_mode ? std::optional<double>(config.eta) : std::nullopt;

  // Start pose: valid, and its first depth map must see something.
  Rng start_rng = named_stream(seed, "start_pose");
  int current = -1;
  DepthMap first;
  for (int attempt = 0; attempt < 100 && current < 0; ++attempt) {
    const int idx = static_cast<int>(start_rng.uniform_index(grid.poses.size()));
    if (!grid.valid[idx]) continue;
    DepthMap map = render_depth(scene, grid.poses[idx], config.intrinsics);
    if (!any_return(map)) continue;
    current = idx;
    first = std::move(map);
  }
  if (current < 0) {
    throw SamplingError("run_reconstruction: no valid start pose with a non-empty view in "
                        "100 draws");
  }

  RunResult out;
  out.trajectory.seed = seed;
  out.trajectory.policy = policy_name(config.policy);
  Rng walk_rng = named_stream(seed, "policy_random");
  PoseHistory history{config.intrinsics, {}};

  DepthMap map = std::move(first);
  for (int t = 0; t < config.steps; ++t) {
    if (t > 0) map = render_depth(scene, grid.poses[current], config.intrinsics);
    cloud.accumulate(backproject(map), config.eps_cloud);
    carving.carving_update(map);
    history.poses.push_back(grid.poses[current]);
    out.trajectory.pose_indices.push_back(current);
    out.trajectory.cloud_points.push_back(cloud.size());
    out.trajectory.coverage.push_back(total_coverage_metric(cloud, p0.points, config.eps));

    if (t + 1 == config.steps) break;

    std::vector<int> cand_idx;
    for (const int j : grid.adjacency[current]) {
      if (grid.valid[j]) cand_idx.push_back(j);
    }
    if (cand_idx.empty()) break;  // boxed in: end the episode early

    int next;
    if (config.policy == Policy::random_walk) {
      next = cand_idx[walk_rng.uniform_index(cand_idx.size())];
    } else {
      const OccupancyField& proxy_field =
          config.policy == Policy::gain_oracle ? static_cast<const OccupancyField&>(oracle_occ)
                                               : static_cast<const OccupancyField&>(carving);
      ProxyPointSet proxies = sample_proxy_points(proxy_field, box, config.proxy_count,
                                                  derive_seed(seed, "proxy_step", t));

      std::vector<CameraPose> cand_poses;
      cand_poses.reserve(cand_idx.size());
      for (const int j : cand_idx) cand_poses.push_back(grid.poses[j]);

      std::vector<double> scores;
      scores.reserve(cand_idx.size());
      if (config.policy == Policy::entropy) {
        for (const CameraPose& pose : cand_poses) {
          scores.push_back(entropy_score(proxies, config.intrinsics, pose, eta));
        }
      } else {
        GainFieldOracle::Params gain_params;
        gain_params.mu = mu;
        gain_params.n_dirs = config.gain_dirs;
        gain_params.standoff = config.standoff;
        const GainFieldOracle field(scene, history, gain_params);
        field.attach_gains(proxies);
        for (const CameraPose& pose : cand_poses) {
          scores.push_back(estimate_gain(proxies, config.intrinsics, pose, eta).value);
        }
      }
      next = cand_idx[select_nbv(cand_poses, scores)];
    }
    current = next;
  }

  out.curve.values = out.trajectory.coverage;
  out.curve.auc = auc(out.curve.values);
  return out;
}

}  // namespace nbv
