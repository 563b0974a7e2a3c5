#include "nbv/bench/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nbv/bench/stats.hpp"
#include "nbv/core/errors.hpp"
#include "nbv/core/rng.hpp"
#include "nbv/gain/estimate.hpp"
#include "nbv/gain/gain_field.hpp"
#include "nbv/gain/visibility.hpp"
#include "nbv/geometry/mesh_io.hpp"
#include "nbv/geometry/shapes.hpp"
#include "nbv/sensor/depth.hpp"

namespace nbv {

namespace {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  fn(os);
  os.flush();
  if (!os) throw IoError("failed writing '" + path + "'");
}

// Seeds run as independent jobs on the pool; `fn` must not throw (the
// per-seed bodies record their own failures).
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

TriangleMesh resolve_mesh(const ExperimentConfig& c) {
  if (!c.mesh_path.empty()) return load_mesh(c.mesh_path);
  if (c.shape.name == "desk") return make_desk_scene();
  return make_analytic(c.shape.name, c.shape.p1, c.shape.p2, c.shape.level).mesh;
}

// The cloud/carving bounding box the planner uses; the replay dumps must
// match it so the replayed cloud deduplicates identically.
Aabb planner_box(const TriangleMesh& mesh) {
  Aabb box = mesh.bbox;
  const double pad = 1e-3 * std::max(1.0, box.diagonal());
  box.lo = box.lo - Vec3{pad, pad, pad};
  box.hi = box.hi + Vec3{pad, pad, pad};
  return box;
}

PoseGrid build_grid(const ExperimentConfig& c, const TriangleMesh& mesh, const MeshQuery& scene) {
  if (c.protocol == Protocol::object_sphere) {
    double radius = c.sphere_radius;
    if (radius <= 0.0) {
      const Vec3 half = mesh.bbox.extent() * 0.5;
      radius = 2.5 * std::max({half.x, half.y, half.z});
    }
    return sphere_grid(mesh.bbox.center(), radius, c.scene.n_elev, c.scene.n_azim);
  }
  Aabb room = c.room;
  if (!room.valid()) {
    room = mesh.bbox;
    const double pad = 0.5 * std::max(1e-6, mesh.bbox.diagonal());
    room.lo = room.lo - Vec3{pad, pad, pad};
    room.hi = room.hi + Vec3{pad, pad, pad};
  }
  const OracleOccupancy occupancy(scene);
  return scene5d_grid(room, c.scene, occupancy);
}

PlannerConfig planner_config_of(const ExperimentConfig& c) {
  PlannerConfig pc;
  pc.intrinsics = c.sensor;
  pc.policy = c.policy;
  pc.steps = c.steps;
  pc.proxy_count = c.proxies;
  pc.gain_dirs = c.gain_dirs;
  pc.mu = c.mu;
  pc.eps = c.eps;
  pc.eps_cloud = c.eps_cloud;
  pc.eta = c.eta;
  pc.carve_resolution = c.carve_resolution;
  pc.p0_count = c.p0_count;
  pc.standoff = c.standoff;
  return pc;
}

std::vector<CameraPose> theorem_candidate(const TheoremParams& t) {
  const Vec3 origin{0.0, 0.0, 0.0};
  if (!t.rig) return {CameraPose::look_at({0.0, 0.0, t.distance}, origin)};
  std::vector<CameraPose> rig;
  for (int axis = 0; axis < 3; ++axis) {
    for (const double sign : {-1.0, 1.0}) {
      Vec3 pos{0.0, 0.0, 0.0};
      pos[axis] = sign * t.distance;
      rig.push_back(CameraPose::look_at(pos, origin));
    }
  }
  return rig;
}

void run_theorem_protocol(RunReport& report) {
  const ExperimentConfig& c = report.config;
  const AnalyticShape shape =
      make_analytic(c.shape.name, c.shape.p1, c.shape.p2, c.shape.level);
  const std::vector<CameraPose> candidate = theorem_candidate(c.theorem);

  parallel_for_index(report.seeds.size(), [&](std::size_t i) {
    SeedRun& out = report.seeds[i];
    try {
      TheoremTrial trial;
      trial.shape = shape;  // per-seed copy: each trial owns its query structures
      trial.history = PoseHistory{c.sensor, {}};
      trial.candidate = candidate;
      trial.mu_values = c.theorem.mu_values;
      trial.volume_samples = c.theorem.volume_samples;
      trial.surface_samples = c.theorem.surface_samples;
      trial.seed = out.seed;
      run_theorem_trial(trial);
      out.theorem_rows = std::move(trial.results);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  const auto& mu = c.theorem.mu_values;
  std::vector<double> mean_gaps(mu.size()), sigmas(mu.size());
  std::size_t n_ok = 0;
  for (const auto& s : report.seeds) n_ok += s.ok() ? 1 : 0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    std::vector<double> gaps, integrals;
    for (const auto& s : report.seeds) {
      if (!s.ok()) continue;
      gaps.push_back(s.theorem_rows[j].gap);
      integrals.push_back(s.theorem_rows[j].volume_integral);
    }
    const double mg = gaps.empty() ? 0.0 : mean(gaps);
    const double mi = integrals.empty() ? 0.0 : mean(integrals);
    const double se =
        gaps.size() >= 2 ? sample_stddev(gaps) / std::sqrt(static_cast<double>(gaps.size()))
                         : 0.0;
    mean_gaps[j] = mg;
    sigmas[j] = se;
    report.theorem.rows.push_back({mu[j], mi, mg, se});
  }
  if (n_ok > 0) {
    try {
      const OrderFit fit = n_ok >= 2 ? order_fit(mu, mean_gaps, sigmas)
                                     : order_fit(mu, mean_gaps);
      report.theorem.slope = fit.slope;
      report.theorem.conclusive = fit.conclusive;
      report.theorem.pass = fit.conclusive && fit.slope >= kSlopeBandLo &&
                            fit.slope <= kSlopeBandHi;
    } catch (const InvalidInput&) {
      // Schedule too short or too narrow for an order fit: inconclusive.
      report.theorem.slope = 0.0;
      report.theorem.conclusive = false;
      report.theorem.pass = false;
    }
  }
}

void write_dumps(const RunReport& report, const TriangleMesh& mesh, const MeshQuery& scene,
                 const PoseGrid& grid, const std::string& dir) {
  const ExperimentConfig& c = report.config;
  const DumpFlags& d = c.dump;
  if (!(d.depth || d.cloud || d.carving || d.gain_table || d.proxies)) return;

  const double mu_eff = c.mu > 0.0 ? c.mu : 2.0 * c.eps_cloud;
  const bool scene_mode = c.protocol == Protocol::scene5d;
  const std::optional<double> eta =
      scene_mode ? std::optional<double>(c.eta) : std::nullopt;
  GainFieldOracle::Params field_params;
  field_params.mu = mu_eff;
  field_params.n_dirs = c.gain_dirs;
  field_params.standoff = c.standoff;
  const Aabb box = planner_box(mesh);

  if (d.gain_table) {
    // Fresh-scene table: estimator score vs ground-truth gain per valid pose.
    const uint64_t seed0 = report.seeds.front().seed;
    const OracleOccupancy occupancy(scene);
    ProxyPointSet proxies =
        sample_proxy_points(occupancy, box, c.proxies, derive_seed(seed0, "gain_table_proxies"));
    const PoseHistory empty_history{c.sensor, {}};
    const GainFieldOracle field(scene, empty_history, field_params);
    field.attach_gains(proxies);
    const SurfaceSamples samples =
        sample_surface(mesh, 16384, derive_seed(seed0, "gain_table_surface"));
    const auto mask = knowledge_mask(scene, empty_history, samples);
    write_file(dir + "/gain_table.csv", [&](std::ostream& os) {
      os << "pose,i_h,gt_gain\n";
      for (std::size_t p = 0; p < grid.size(); ++p) {
        if (!grid.valid[p]) continue;
        const double i_h = estimate_gain(proxies, c.sensor, grid.poses[p], eta).value;
        const double gt =
            coverage_gain_gt(scene, mask, c.sensor, std::span(&grid.poses[p], 1), samples);
        os << p << ',' << fmt17(i_h) << ',' << fmt17(gt) << '\n';
      }
    });
  }

  if (!(d.depth || d.cloud || d.carving || d.proxies)) return;
  const SeedRun* first = nullptr;
  for (const auto& s : report.seeds) {
    if (s.ok() && !s.pose_indices.empty()) {
      first = &s;
      break;
    }
  }
  if (!first) return;  // replay dumps need a successful trajectory

  CloudStore cloud(box, c.eps_cloud);
  CarvingGrid::Params carve_params;
  carve_params.resolution = c.carve_resolution;
  carve_params.eps_cloud = c.eps_cloud;
  CarvingGrid carving(box, carve_params, &cloud);
  PoseHistory history{c.sensor, {}};
  for (std::size_t t = 0; t < first->pose_indices.size(); ++t) {
    const CameraPose& pose = grid.poses[static_cast<std::size_t>(first->pose_indices[t])];
    const DepthMap map = render_depth(scene, pose, c.sensor);
    if (t == 0 && d.depth) write_depth_pgm(map, dir + "/depth_step0.pgm");
    cloud.accumulate(backproject(map), c.eps_cloud);
    carving.carving_update(map);
    history.poses.push_back(pose);
  }
  if (d.cloud) export_cloud_ply(cloud, dir + "/cloud.ply");
  if (d.carving) carving.export_raw(dir + "/carving.raw");
  if (d.proxies) {
    ProxyPointSet proxies =
        sample_proxy_points(carving, box, c.proxies, derive_seed(first->seed, "dump_proxies"));
    const GainFieldOracle field(scene, history, field_params);
    field.attach(proxies);
    njson arr = njson::array();
    for (std::size_t i = 0; i < proxies.size(); ++i) {
      njson entry;
      entry["point"] = {proxies.points[i].x, proxies.points[i].y, proxies.points[i].z};
      entry["prob"] = proxies.probs[i];
      entry["gain"] = std::vector<double>(proxies.gains[i].c.begin(), proxies.gains[i].c.end());
      entry["history"] = std::vector<double>(proxies.history_features[i].c.begin(),
                                             proxies.history_features[i].c.end());
      arr.push_back(std::move(entry));
    }
    write_file(dir + "/proxies.json", [&](std::ostream& os) { os << arr.dump(2) << '\n'; });
  }
}

void run_reconstruction_protocol(RunReport& report, const std::string& dir) {
  const ExperimentConfig& c = report.config;
  const TriangleMesh mesh = resolve_mesh(c);
  const MeshQuery scene(mesh);
  if (scene.empty()) throw ConfigError("mesh/shape: resolved scene is empty");
  const PoseGrid grid = build_grid(c, mesh, scene);
  const PlannerConfig pc = planner_config_of(c);

  parallel_for_index(report.seeds.size(), [&](std::size_t i) {
    SeedRun& out = report.seeds[i];
    try {
      RunResult result = run_reconstruction(mesh, grid, pc, out.seed);
      out.pose_indices = std::move(result.trajectory.pose_indices);
      out.cloud_points = std::move(result.trajectory.cloud_points);
      out.curve = std::move(result.curve.values);
      out.auc = result.curve.auc;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  for (const auto& s : report.seeds) {
    if (!s.ok()) continue;
    write_file(dir + "/curve_seed" + std::to_string(s.seed) + ".csv",
               [&](std::ostream& os) { write_curve_csv(s, os); });
  }
  write_dumps(report, mesh, scene, grid, dir);
}

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("NBV_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return std::max<std::size_t>(1, n);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::string timestamped_run_dir(const std::string& base, Protocol protocol) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  const std::string dir = base + "/" + stamp + "-" + protocol_name(protocol);
  std::error_code ec;
  fs::create_directories(base, ec);
  for (int k = 1;; ++k) {
    const std::string candidate = k == 1 ? dir : dir + "-" + std::to_string(k);
    std::error_code ec2;
    if (fs::create_directory(candidate, ec2)) return candidate;
    if (ec2) throw IoError("cannot create run directory '" + candidate + "': " + ec2.message());
  }
}

RunReport run_experiment(const ExperimentConfig& config, const std::string& run_dir) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();

  RunReport report;
  report.version = kToolkitVersion;
  report.config = config;
  report.seeds.resize(config.seeds.size());
  for (std::size_t i = 0; i < config.seeds.size(); ++i) report.seeds[i].seed = config.seeds[i];

  std::error_code ec;
  fs::create_directories(run_dir, ec);
  if (ec) throw IoError("cannot create run directory '" + run_dir + "': " + ec.message());

  if (config.protocol == Protocol::verify_theorem) {
    run_theorem_protocol(report);
    write_file(run_dir + "/theorem.csv",
               [&](std::ostream& os) { write_theorem_csv(report.theorem, os); });
    write_file(run_dir + "/verdict.json", [&](std::ostream& os) {
      const njson verdict = {{"slope", report.theorem.slope},
                             {"pass", report.theorem.pass},
                             {"conclusive", report.theorem.conclusive}};
      os << verdict.dump(2) << '\n';
    });
    if (config.svg) {
      write_file(run_dir + "/plot.svg",
                 [&](std::ostream& os) { write_theorem_svg(report, os); });
    }
  } else {
    run_reconstruction_protocol(report, run_dir);
    if (config.svg) {
      write_file(run_dir + "/plot.svg",
                 [&](std::ostream& os) { write_coverage_svg(report, os); });
    }
  }

  std::vector<double> aucs;
  for (const auto& s : report.seeds) {
    if (!s.ok()) continue;
    ++report.seeds_ok;
    if (config.protocol != Protocol::verify_theorem) aucs.push_back(s.auc);
  }
  if (!aucs.empty()) {
    report.mean_auc = mean(aucs);
    report.std_auc = sample_stddev(aucs);
  }

  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(run_dir + "/report.json", [&](std::ostream& os) { os << emit_report(report); });
  return report;
}

RunReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  return run_experiment(config, timestamped_run_dir(config.out, config.protocol));
}

int exit_code_for(const RunReport& report) { return report.seeds_ok == 0 ? 1 : 0; }

}  // namespace nbv
