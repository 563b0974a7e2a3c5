#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>
#include "nbv/bench/stats.hpp"
#include "nbv/core/errors.hpp"
#include "nbv/geometry/shapes.hpp"
#include "nbv/planner/planner.hpp"

using namespace nbv;

namespace {

SensorIntrinsics object_sensor() {
  SensorIntrinsics intr;
  intr.width = 48;
  intr.height = 48;
  intr.hfov = 1.2;
  intr.vfov = 1.2;
  intr.min_range = 0.05;
  intr.max_range = 10.0;
  return intr;
}

struct ConstantField final : OccupancyField {
  double value;
  explicit ConstantField(double v) : value(v) {}
  double occupancy(const Vec3&) const override { return value; }
};

bool adjacency_symmetric(const PoseGrid& grid) {
  for (std::size_t a = 0; a < grid.adjacency.size(); ++a) {
    for (const int b : grid.adjacency[a]) {
      const auto& back = grid.adjacency[b];
      if (std::find(back.begin(), back.end(), static_cast<int>(a)) == back.end()) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("sphere grid: lattice counts, look-at axes, all-to-all adjacency") {
  const Vec3 center{0.5, -0.25, 1.0};
  const PoseGrid ring = sphere_grid(center, 2.0, 1, 4);
  REQUIRE(ring.size() == 4);
  for (const CameraPose& p : ring.poses) {
    CHECK((p.position - center).norm() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.position.z == doctest::Approx(center.z).epsilon(1e-12));  // equatorial band
    const Vec3 to_center = (center - p.position).normalized();
    CHECK(dot(to_center, p.forward()) == doctest::Approx(1.0).epsilon(1e-6));
  }

  const PoseGrid grid = sphere_grid(center, 1.5, 5, 10);
  CHECK(grid.size() == 50);
  CHECK(grid.valid_count() == 50);
  CHECK(grid.kind == GridKind::sphere);
  for (const auto& nbrs : grid.adjacency) CHECK(nbrs.size() == 49);
  CHECK(adjacency_symmetric(grid));

  CHECK_THROWS_AS((void)sphere_grid(center, 0.0, 1, 4), InvalidInput);
  CHECK_THROWS_AS((void)sphere_grid(center, 1.0, 0, 4), InvalidInput);
}

TEST_CASE("scene5d grid: product lattice, 10-neighbor interior, azimuth wrap") {
  const Aabb box{{0.0, 0.0, 0.0}, {10.0, 10.0, 5.0}};
  const ConstantField free_space(0.0);
  Scene5dSpec spec;
  spec.nx = 10;
  spec.ny = 10;
  spec.nz = 5;
  spec.n_elev = 4;
  spec.n_azim = 8;
  spec.elev_min = -0.9;
  spec.elev_max = 0.9;

  const PoseGrid grid = scene5d_grid(box, spec, free_space);
  CHECK(grid.size() == 16000);
  CHECK(grid.valid_count() == 16000);
  CHECK(grid.kind == GridKind::scene5d);

  // Interior lattice pose: +/-1 along each of five axes, azimuth wrapping.
  const auto flat = [&](int ix, int iy, int iz, int ie, int ia) {
    return (((ix * spec.ny + iy) * spec.nz + iz) * spec.n_elev + ie) * spec.n_azim + ia;
  };
  CHECK(grid.adjacency[flat(5, 5, 2, 1, 3)].size() == 10);
  // Azimuth wraps: the first azimuth neighbors the last.
  const auto& wrap_nbrs = grid.adjacency[flat(5, 5, 2, 1, 0)];
  CHECK(std::find(wrap_nbrs.begin(), wrap_nbrs.end(), flat(5, 5, 2, 1, 7)) != wrap_nbrs.end());
  // Corner pose: one positional step on each axis, one elevation step, and
  // both wrapped azimuth steps survive.
  CHECK(grid.adjacency[flat(0, 0, 0, 0, 0)].size() == 6);
  CHECK(adjacency_symmetric(grid));

  for (const CameraPose& p : grid.poses) CHECK(box.contains(p.position));

  // Two azimuths produce one deduplicated wrap neighbor, not two copies.
  Scene5dSpec two = spec;
  two.nx = two.ny = two.nz = 1;
  two.n_elev = 1;
  two.n_azim = 2;
  const PoseGrid tiny = scene5d_grid(box, two, free_space);
  REQUIRE(tiny.size() == 2);
  CHECK(tiny.adjacency[0].size() == 1);
  CHECK(tiny.adjacency[0][0] == 1);

  CHECK_THROWS_AS((void)scene5d_grid(Aabb{{0, 0, 0}, {1, 1, 0}}, spec, free_space), InvalidInput);
  Scene5dSpec bad = spec;
  bad.n_azim = 0;
  CHECK_THROWS_AS((void)scene5d_grid(box, bad, free_space), InvalidInput);
}

TEST_CASE("scene5d grid flags poses inside occupied volume invalid") {
  const AnalyticShape s = make_sphere(1.0, 3);
  const MeshQuery q(s.mesh);
  const OracleOccupancy occ(q);
  const Aabb box{{-2.0, -2.0, -2.0}, {2.0, 2.0, 2.0}};
  Scene5dSpec spec;
  spec.nx = spec.ny = spec.nz = 4;
  spec.n_elev = 1;
  spec.n_azim = 4;

  const PoseGrid grid = scene5d_grid(box, spec, occ);
  REQUIRE(grid.size() == 256);
  // Cell centers at +/-0.5 and +/-1.5 per axis: the eight (+/-0.5)^3 corners
  // lie inside the unit sphere (radius 0.866 < 1), the rest outside.
  CHECK(grid.valid_count() == 256 - 8 * 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool inside = grid.poses[i].position.norm() < 1.0;
    CHECK(grid.valid[i] == (inside ? 0 : 1));
  }
}

TEST_CASE("select_nbv takes the argmax with lowest-index ties") {
  const std::vector<CameraPose> three(3);
  CHECK(select_nbv(three, std::vector<double>{0.1, 0.9, 0.3}) == 1);
  CHECK(select_nbv(three, std::vector<double>{0.4, 0.4, 0.4}) == 0);
  CHECK(select_nbv(three, std::vector<double>{0.7, 6.3, 2.1}) == 1);  // scale-invariant

  CHECK_THROWS_AS((void)select_nbv({}, {}), InvalidInput);
  CHECK_THROWS_AS((void)select_nbv(three, std::vector<double>{0.1, 0.2}), InvalidInput);
}

TEST_CASE("auc is the normalized trapezoid of the curve") {
  const std::vector<double> flat(10, 0.5);
  CHECK(auc(flat) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(auc(std::vector<double>{0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));

  std::vector<double> ramp;
  for (int i = 0; i <= 10; ++i) ramp.push_back(i / 10.0);
  CHECK(auc(ramp) == doctest::Approx(0.5).epsilon(1e-9));

  CHECK(auc(std::vector<double>{0.73}) == doctest::Approx(0.73).epsilon(1e-12));
  CHECK_THROWS_AS((void)auc({}), InvalidInput);
}

TEST_CASE("policy names round-trip") {
  for (const Policy p : {Policy::gain_oracle, Policy::gain_carving, Policy::entropy,
                         Policy::random_walk}) {
    CHECK(policy_from_name(policy_name(p)) == p);
  }
  CHECK_THROWS_AS((void)policy_from_name("greedy"), InvalidInput);
}

TEST_CASE("single-step run reports the first view's coverage") {
  const AnalyticShape s = make_sphere(1.0, 3);
  const PoseGrid grid = sphere_grid({0.0, 0.0, 0.0}, 2.5, 3, 6);
  PlannerConfig config;
  config.intrinsics = object_sensor();
  config.policy = Policy::random_walk;
  config.steps = 1;
  config.p0_count = 4096;
  config.eps = 0.05;  // catch radius comfortably above the pixel footprint

  const RunResult run = run_reconstruction(s.mesh, grid, config, 42);
  REQUIRE(run.trajectory.coverage.size() == 1);
  REQUIRE(run.trajectory.pose_indices.size() == 1);
  CHECK(run.curve.values.size() == 1);
  CHECK(run.curve.auc == run.trajectory.coverage[0]);
  CHECK(run.trajectory.coverage[0] > 0.1);  // one view covers a real cap
  CHECK(run.trajectory.coverage[0] < 0.6);
  CHECK(run.trajectory.cloud_points[0] > 0);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const AnalyticShape s = make_sphere(1.0, 3);
  const PoseGrid grid = sphere_grid({0.0, 0.0, 0.0}, 2.5, 3, 6);
  PlannerConfig config;
  config.intrinsics = object_sensor();
  config.policy = Policy::random_walk;
  config.steps = 6;
  config.p0_count = 4096;

  const RunResult a = run_reconstruction(s.mesh, grid, config, 7);
  const RunResult b = run_reconstruction(s.mesh, grid, config, 7);
  CHECK(a.trajectory.pose_indices == b.trajectory.pose_indices);
  CHECK(a.trajectory.coverage == b.trajectory.coverage);
  CHECK(a.trajectory.cloud_points == b.trajectory.cloud_points);
  CHECK(a.curve.auc == b.curve.auc);
  CHECK(a.trajectory.policy == "random");

  // A different seed starts elsewhere (and almost surely walks elsewhere).
  const RunResult c = run_reconstruction(s.mesh, grid, config, 8);
  CHECK(a.trajectory.pose_indices != c.trajectory.pose_indices);
}

TEST_CASE("coverage curves are monotone for every policy") {
  const AnalyticShape s = make_sphere(1.0, 3);
  const PoseGrid grid = sphere_grid({0.0, 0.0, 0.0}, 2.5, 3, 6);
  for (const Policy policy : {Policy::gain_oracle, Policy::gain_carving, Policy::entropy,
                              Policy::random_walk}) {
    PlannerConfig config;
    config.intrinsics = object_sensor();
    config.policy = policy;
    config.steps = 5;
    config.p0_count = 4096;
    config.proxy_count = 512;
    config.gain_dirs = 64;

    const RunResult run = run_reconstruction(s.mesh, grid, config, 3);
    REQUIRE(run.trajectory.coverage.size() == 5);
    for (std::size_t i = 1; i < run.trajectory.coverage.size(); ++i) {
      CHECK(run.trajectory.coverage[i] >= run.trajectory.coverage[i - 1]);
    }
    CHECK(run.curve.auc > 0.0);
    CHECK(run.curve.auc <= 1.0);
  }
}

TEST_CASE("scene5d trajectories respect adjacency and validity") {
  const TriangleMesh desk = make_desk_scene();
  const Aabb room{{-2.0, -2.0, 0.0}, {2.0, 2.0, 2.2}};
  const MeshQuery q(desk);
  const OracleOccupancy occ(q);
  Scene5dSpec spec;
  spec.nx = spec.ny = 4;
  spec.nz = 3;
  spec.n_elev = 3;
  spec.n_azim = 6;
  spec.elev_min = -1.0;
  spec.elev_max = 0.5;
  const PoseGrid grid = scene5d_grid(room, spec, occ);

  SensorIntrinsics intr = object_sensor();
  intr.max_range = 8.0;
  PlannerConfig config;
  config.intrinsics = intr;
  config.policy = Policy::random_walk;
  config.steps = 12;
  config.p0_count = 8192;
  config.eps = 0.05;
  config.eps_cloud = 0.02;

  const RunResult run = run_reconstruction(desk, grid, config, 11);
  REQUIRE(run.trajectory.pose_indices.size() == 12);
  for (std::size_t i = 0; i < run.trajectory.pose_indices.size(); ++i) {
    const int pose = run.trajectory.pose_indices[i];
    CHECK(grid.valid[pose] == 1);
    if (i > 0) {
      const auto& nbrs = grid.adjacency[run.trajectory.pose_indices[i - 1]];
      CHECK(std::find(nbrs.begin(), nbrs.end(), pose) != nbrs.end());
    }
  }
}

TEST_CASE("gain-oracle beats random on paired seeds") {
  const AnalyticShape s = make_sphere(1.0, 3);
  const PoseGrid grid = sphere_grid({0.0, 0.0, 0.0}, 2.5, 4, 8);

  std::vector<double> oracle_auc, random_auc;
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    PlannerConfig config;
    config.intrinsics = object_sensor();
    config.steps = 6;
    config.p0_count = 4096;
    config.proxy_count = 512;
    config.gain_dirs = 64;

    config.policy = Policy::gain_oracle;
    oracle_auc.push_back(run_reconstruction(s.mesh, grid, config, seed).curve.auc);
    config.policy = Policy::random_walk;
    random_auc.push_back(run_reconstruction(s.mesh, grid, config, seed).curve.auc);
  }
  CHECK(mean(oracle_auc) > mean(random_auc));
}

TEST_CASE("run_reconstruction validates inputs and reports start starvation") {
  const AnalyticShape s = make_sphere(1.0, 2);
  const PoseGrid grid = sphere_grid({0.0, 0.0, 0.0}, 2.5, 2, 4);
  PlannerConfig config;
  config.intrinsics = object_sensor();
  config.steps = 3;
  config.p0_count = 1024;

  PlannerConfig bad = config;
  bad.steps = 0;
  CHECK_THROWS_AS((void)run_reconstruction(s.mesh, grid, bad, 1), InvalidInput);

  bad = config;
  bad.proxy_count = 0;
  CHECK_THROWS_AS((void)run_reconstruction(s.mesh, grid, bad, 1), InvalidInput);

  PoseGrid hollow = grid;
  hollow.valid.assign(hollow.size(), 0);
  CHECK_THROWS_AS((void)run_reconstruction(s.mesh, hollow, config, 1), SamplingError);

  // Valid poses whose views are all empty also starve the start draw.
  PlannerConfig blind = config;
  blind.intrinsics.max_range = 0.5;  // object sits 1.5 away from every pose
  CHECK_THROWS_AS((void)run_reconstruction(s.mesh, grid, blind, 1), SamplingError);
}

TEST_CASE("a boxed-in pose ends the episode early") {
  const AnalyticShape s = make_sphere(1.0, 2);
  // Three-position corridor: only the middle pose is valid, so after the
  // first view there is no legal move.
  const ConstantField free_space(0.0);
  Scene5dSpec spec;
  spec.nx = 3;
  spec.n_elev = 1;
  spec.n_azim = 1;
  const Aabb lane{{-4.5, -0.5, -0.5}, {4.5, 0.5, 0.5}};
  PoseGrid grid = scene5d_grid(lane, spec, free_space);
  REQUIRE(grid.size() == 3);
  grid.valid = {0, 1, 0};

  PlannerConfig config;
  config.intrinsics = object_sensor();
  config.policy = Policy::random_walk;
  config.steps = 5;
  config.p0_count = 1024;

  const RunResult run = run_reconstruction(s.mesh, grid, config, 2);
  CHECK(run.trajectory.pose_indices == std::vector<int>{1});
  CHECK(run.trajectory.coverage.size() == 1);
}
