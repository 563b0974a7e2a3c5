#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "nbv/bench/stats.hpp"
#include "nbv/core/errors.hpp"
#include "nbv/core/rng.hpp"
#include "nbv/geometry/shapes.hpp"
#include "nbv/occupancy/occupancy.hpp"

using namespace nbv;

namespace {

struct ConstantField : OccupancyField {
  explicit ConstantField(double v) : value(v) {}
  double occupancy(const Vec3&) const override { return value; }
  double value;
};

SensorIntrinsics test_sensor() {
  SensorIntrinsics intr;
  intr.width = 65;
  intr.height = 65;
  intr.hfov = 1.2;
  intr.vfov = 1.2;
  intr.min_range = 0.05;
  intr.max_range = 10.0;
  return intr;
}

}  // namespace

TEST_CASE("oracle occupancy matches the analytic sphere indicator") {
  const AnalyticShape s = make_sphere(1.0);
  const MeshQuery q(s.mesh);
  const OracleOccupancy field(q);
  Rng rng(101);
  const Aabb box{{-1.2, -1.2, -1.2}, {1.2, 1.2, 1.2}};
  int checked = 0;
  for (int i = 0; i < 100000; ++i) {
    const Vec3 x = rng.uniform_in_box(box);
    const double r = x.norm();
    if (std::abs(r - 1.0) < 5e-3) continue;  // tessellation boundary band
    ++checked;
    CHECK(field.occupancy(x) == (r < 1.0 ? 1.0 : 0.0));
  }
  CHECK(checked > 90000);

  TriangleMesh empty;
  empty.finalize();
  const MeshQuery eq(empty);
  CHECK(OracleOccupancy(eq).occupancy({0.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("carving: free corridor, unknown interior, surface near the cloud") {
  const AnalyticShape s = make_sphere(1.0);
  const MeshQuery q(s.mesh);
  const CameraPose pose = CameraPose::look_at({0.0, 0.0, -3.0}, {0.0, 0.0, 0.0});
  const DepthMap map = render_depth(q, pose, test_sensor());

  const Aabb box{{-2.0, -2.0, -2.0}, {2.0, 2.0, 2.0}};
  CloudStore cloud(box, 0.0625);
  cloud.accumulate(backproject(map), 0.01);

  CarvingGrid::Params params;
  params.eps_cloud = 0.01;
  CarvingGrid grid(box, params, &cloud);

  // Before any update everything reads the unknown prior.
  CHECK(grid.occupancy({0.0, 0.0, -1.8}) == 0.5);

  grid.carving_update(map);

  CHECK(grid.occupancy({0.0, 0.0, -1.8}) == 0.02);  // traversed before the hit
  CHECK(grid.occupancy({0.0, 0.0, 0.0}) == 0.5);    // interior: never traversed
  CHECK(grid.occupancy({0.0, 0.0, 1.5}) == 0.5);    // shadow behind the sphere
  CHECK(grid.occupancy({0.0, 0.0, -1.0}) == 0.95);  // within eps of a stored point
  CHECK(grid.occupancy({0.0, 0.0, -2.5}) == 0.02);  // outside the grid: free
}

TEST_CASE("carving never raises an observed-free voxel") {
  const AnalyticShape s = make_sphere(1.0);
  const MeshQuery q(s.mesh);
  const SensorIntrinsics intr = test_sensor();
  const Aabb box{{-2.0, -2.0, -2.0}, {2.0, 2.0, 2.0}};

  CarvingGrid grid(box, CarvingGrid::Params{});
  const DepthMap front = render_depth(q, CameraPose::look_at({0.0, 0.0, -3.0}, {0.0, 0.0, 0.0}), intr);
  grid.carving_update(front);

  const int res = grid.resolution();
  std::vector<double> before(static_cast<std::size_t>(res) * res * res);
  for (int ix = 0; ix < res; ++ix)
    for (int iy = 0; iy < res; ++iy)
      for (int iz = 0; iz < res; ++iz)
        before[(static_cast<std::size_t>(ix) * res + iy) * res + iz] = grid.voxel_value(ix, iy, iz);

  const DepthMap side = render_depth(q, CameraPose::look_at({3.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), intr);
  grid.carving_update(side);

  int changed = 0;
  for (int ix = 0; ix < res; ++ix)
    for (int iy = 0; iy < res; ++iy)
      for (int iz = 0; iz < res; ++iz) {
        const double b = before[(static_cast<std::size_t>(ix) * res + iy) * res + iz];
        const double a = grid.voxel_value(ix, iy, iz);
        if (b == 0.02) CHECK(a == 0.02);  // free is terminal
        if (a != b) ++changed;
      }
  CHECK(changed > 1000);  // the second view actually carved new space

  // Replaying an already-seen view changes nothing.
  std::vector<double> snapshot(before.size());
  for (int ix = 0; ix < res; ++ix)
    for (int iy = 0; iy < res; ++iy)
      for (int iz = 0; iz < res; ++iz)
        snapshot[(static_cast<std::size_t>(ix) * res + iy) * res + iz] =
            grid.voxel_value(ix, iy, iz);
  grid.carving_update(side);
  for (int ix = 0; ix < res; ++ix)
    for (int iy = 0; iy < res; ++iy)
      for (int iz = 0; iz < res; ++iz)
        CHECK(grid.voxel_value(ix, iy, iz) ==
              snapshot[(static_cast<std::size_t>(ix) * res + iy) * res + iz]);
}

TEST_CASE("carving raw export round-trips dims and voxel values") {
  const Aabb box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  CarvingGrid::Params params;
  params.resolution = 8;
  CarvingGrid grid(box, params);
  const std::string path = "io_test_grid.raw";
  grid.export_raw(path);

  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  uint8_t dims[12];
  in.read(reinterpret_cast<char*>(dims), 12);
  for (int i = 0; i < 3; ++i) {
    const uint32_t d = dims[4 * i] | (dims[4 * i + 1] << 8) | (dims[4 * i + 2] << 16) |
                       (static_cast<uint32_t>(dims[4 * i + 3]) << 24);
    CHECK(d == 8u);
  }
  std::vector<float> values(8 * 8 * 8);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(float)));
  REQUIRE(in.gcount() == static_cast<std::streamsize>(values.size() * sizeof(float)));
  for (const float v : values) CHECK(v == 0.5f);  // untouched grid is all unknown
  std::remove(path.c_str());
}

TEST_CASE("proxy sampling: acceptance fraction and octant uniformity on the sphere") {
  const AnalyticShape s = make_sphere(1.0);
  const MeshQuery q(s.mesh);
  const OracleOccupancy field(q);
  const Aabb box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};

  const std::size_t n = 100000;
  const ProxyPointSet set = sample_proxy_points(field, box, n, 2024);
  CHECK(set.size() == n);
  CHECK(set.seed == 2024);
  for (const double p : set.probs) CHECK(p == 1.0);

  // Ball volume over box volume: pi/6 = 0.5236.
  const double acceptance = static_cast<double>(n) / static_cast<double>(set.draws);
  CHECK(acceptance == doctest::Approx(0.5235987755982988).epsilon(0.02));

  // Octant uniformity: chi-square over the 8 sign octants.
  double counts[8] = {0};
  for (const Vec3& p : set.points)
    counts[(p.x > 0 ? 4 : 0) + (p.y > 0 ? 2 : 0) + (p.z > 0 ? 1 : 0)] += 1.0;
  const double expect = static_cast<double>(n) / 8.0;
  double chi2 = 0.0;
  for (const double c : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi_square_sf(chi2, 7) > 0.01);

  // Determinism: same seed, same points.
  const ProxyPointSet again = sample_proxy_points(field, box, 1000, 2024);
  for (std::size_t i = 0; i < again.size(); ++i)
    CHECK((again.points[i] - set.points[i]).norm() == 0.0);
}

TEST_CASE("proxy sampling starves cleanly on an empty field") {
  const ConstantField zero(0.0);
  const Aabb box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  try {
    (void)sample_proxy_points(zero, box, 50, 7);
    FAIL("expected SamplingError");
  } catch (const SamplingError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("acceptance rate") != std::string::npos);
  }
  CHECK_THROWS_AS((void)sample_proxy_points(zero, box, 0, 7), InvalidInput);

  // A half-transparent field keeps roughly half the draws.
  const ConstantField half(0.5);
  const ProxyPointSet set = sample_proxy_points(half, box, 20000, 7);
  for (const double p : set.probs) CHECK(p == 0.5);
  CHECK(static_cast<double>(set.size()) / static_cast<double>(set.draws) ==
        doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("carving grid rejects malformed construction") {
  const Aabb box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  CarvingGrid::Params bad;
  bad.resolution = 0;
  CHECK_THROWS_AS(CarvingGrid(box, bad), InvalidInput);
  bad = CarvingGrid::Params{};
  bad.free_value = -0.1;
  CHECK_THROWS_AS(CarvingGrid(box, bad), InvalidInput);
  const Aabb flat{{0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
  CHECK_THROWS_AS(CarvingGrid(flat, CarvingGrid::Params{}), InvalidInput);
}
