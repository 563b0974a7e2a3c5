#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nbv/core/vec3.hpp"
#include "nbv/planner/planner.hpp"
#include "nbv/sensor/camera.hpp"

namespace nbv {

// What an experiment does: reconstruct an object from a view sphere,
// explore a scene on the 5D pose lattice, or measure the convergence order
// of the shell-integral identity on an analytic shape.
enum class Protocol { object_sphere, scene5d, verify_theorem };

const char* protocol_name(Protocol protocol);
Protocol protocol_from_name(const std::string& name);  // throws ConfigError

// Analytic scene request, resolved by name ("sphere", "torus",
// "rounded_cube", "blob", "desk"). p1/p2 <= 0 pick the shape's canonical
// parameters; level is the tessellation refinement.
struct ShapeSpec {
  std::string name;
  double p1 = 0.0;
  double p2 = 0.0;
  int level = 5;
  bool empty() const { return name.empty(); }
};

// Grid parameters are shared between the two reconstruction protocols:
// `scene` holds the lattice counts (its n_elev/n_azim also size the view
// sphere's bands), and `sphere_radius` the view-sphere radius (<= 0 derives
// 2.5x the largest half-extent of the scene bounding box).

// verify-theorem layout: a camera (or a panoramic six-camera rig) at
// `distance` from the origin aimed at it, an empty history, and a strictly
// decreasing shell half-width schedule. Every seed in the config runs the
// full schedule once; seeds act as independent replicates.
struct TheoremParams {
  std::vector<double> mu_values{0.2, 0.1, 0.05, 0.025};
  std::size_t volume_samples = 100000;
  std::size_t surface_samples = 100000;
  double distance = 2.0;
  bool rig = false;
};

// Optional debug artifacts, all written into the run directory.
struct DumpFlags {
  bool depth = false;       // first visited pose's depth map, 16-bit PGM
  bool cloud = false;       // final reconstructed cloud, ASCII PLY
  bool carving = false;     // final carving grid, raw float32 volume
  bool gain_table = false;  // per-pose estimator vs ground-truth gain CSV
  bool proxies = false;     // final proxy set, JSON with 64-float SH arrays
};

// One experiment, fully determined: mesh or shape, protocol, sensor, grid,
// policy and its knobs, and the seed list. The flat-key serialization
// (to_flat_map / apply_config_entry) round-trips exactly, so a report's
// config echo is directly re-runnable.
struct ExperimentConfig {
  Protocol protocol = Protocol::object_sphere;
  std::string mesh_path;  // exactly one of mesh_path / shape
  ShapeSpec shape;
  SensorIntrinsics sensor;
  double sphere_radius = 0.0;
  Scene5dSpec scene{1, 1, 1, 5, 10};
  Aabb room;  // scene5d camera volume; unset -> mesh bbox padded by half a diagonal
  TheoremParams theorem;
  Policy policy = Policy::random_walk;
  int steps = 10;
  std::vector<uint64_t> seeds{1};
  double eps = 0.01;        // coverage metric tolerance
  double eps_cloud = 0.005; // cloud dedup radius
  double mu = 0.0;          // shell half-width; <= 0 -> 2 * eps_cloud
  double eta = 1.0;         // distance penalty (scene mode only)
  std::size_t proxies = 4096;
  int gain_dirs = 512;
  int carve_resolution = 64;
  std::size_t p0_count = 0; // 0 -> protocol default
  double standoff = 0.0;    // gain-field virtual camera distance; 0 -> default
  std::string out = "runs"; // base directory for timestamped run dirs
  bool svg = false;         // write a coverage (or gap) plot
  DumpFlags dump;
};

// One `key = value` assignment using the flat dotted key names of the
// config file (e.g. "sensor.hfov", "theorem.mu_values"). An empty value
// clears string fields ("mesh=", "shape="). Throws ConfigError naming the
// key on an unknown key or an unparsable value.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

// Flat-key config file: one `key = value` per line, '#' starts a comment,
// blank lines are ignored, later keys override earlier ones. Throws IoError
// when the file cannot be read, ConfigError (naming the 1-based line and
// key) on malformed entries.
ExperimentConfig load_config(const std::string& path);

// CLI-style overrides, each item "key=value", applied in order.
void apply_overrides(ExperimentConfig& config, std::span<const std::string> entries);

// Field validation beyond per-entry parsing: ranges, cross-field rules
// (exactly one scene source; analytic shape required by verify-theorem),
// seed list non-empty. Throws ConfigError naming the offending field path.
void validate_config(const ExperimentConfig& config);

// The config as its flat-key map (doubles in round-trip precision).
// Applying every entry of the map onto a default-constructed config
// reproduces the input exactly.
std::map<std::string, std::string> to_flat_map(const ExperimentConfig& config);

}  // namespace nbv
