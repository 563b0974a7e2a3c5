#include "nbv/bench/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "nbv/core/errors.hpp"

namespace nbv {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const char* kind, const std::string& value) {
  throw ConfigError(key + ": expected " + kind + ", got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double d = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(d)) {
    bad_value(key, "a number", value);
  }
  return d;
}

long long parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size()) bad_value(key, "an integer", value);
  return v;
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  if (!value.empty() && value[0] == '-') bad_value(key, "a non-negative integer", value);
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size()) {
    bad_value(key, "a non-negative integer", value);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, "true or false", value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  for (const char c : value) {
    if (c == ',') {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  items.push_back(trim(cur));
  if (items.size() == 1 && items[0].empty()) items.clear();  // empty list
  return items;
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
  const auto items = split_list(value);
  if (items.size() != 3) bad_value(key, "three comma-separated numbers", value);
  return {parse_double(key, items[0]), parse_double(key, items[1]), parse_double(key, items[2])};
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vec3(const Vec3& v) {
  return fmt_double(v.x) + "," + fmt_double(v.y) + "," + fmt_double(v.z);
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& items, Fmt&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(',');
    out += fmt(items[i]);
  }
  return out;
}

// Aabb uses an inverted-interval sentinel for "unset"; a side counts as set
// once any component moved off the sentinel.
bool lo_set(const Aabb& box) { return !(box.lo.x >= 1e300 && box.lo.y >= 1e300 && box.lo.z >= 1e300); }
bool hi_set(const Aabb& box) { return !(box.hi.x <= -1e300 && box.hi.y <= -1e300 && box.hi.z <= -1e300); }

}  // namespace

const char* protocol_name(Protocol protocol) {
  switch (protocol) {
    case Protocol::object_sphere: return "object-sphere";
    case Protocol::scene5d: return "scene5d";
    case Protocol::verify_theorem: return "verify-theorem";
  }
  throw InvalidInput("protocol_name: unknown protocol");
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "object-sphere") return Protocol::object_sphere;
  if (name == "scene5d") return Protocol::scene5d;
  if (name == "verify-theorem") return Protocol::verify_theorem;
  throw ConfigError("protocol: unknown protocol '" + name +
                    "' (expected object-sphere, scene5d, or verify-theorem)");
}

void apply_config_entry(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "protocol") {
    c.protocol = protocol_from_name(value);
  } else if (key == "mesh") {
    c.mesh_path = value;
  } else if (key == "shape") {
    c.shape.name = value;
  } else if (key == "shape.p1") {
    c.shape.p1 = parse_double(key, value);
  } else if (key == "shape.p2") {
    c.shape.p2 = parse_double(key, value);
  } else if (key == "shape.level") {
    c.shape.level = static_cast<int>(parse_int(key, value));
  } else if (key == "sensor.width") {
    c.sensor.width = static_cast<int>(parse_int(key, value));
  } else if (key == "sensor.height") {
    c.sensor.height = static_cast<int>(parse_int(key, value));
  } else if (key == "sensor.hfov") {
    c.sensor.hfov = parse_double(key, value);
  } else if (key == "sensor.vfov") {
    c.sensor.vfov = parse_double(key, value);
  } else if (key == "sensor.min_range") {
    c.sensor.min_range = parse_double(key, value);
  } else if (key == "sensor.max_range") {
    c.sensor.max_range = parse_double(key, value);
  } else if (key == "grid.radius") {
    c.sphere_radius = parse_double(key, value);
  } else if (key == "grid.n_elev") {
    c.scene.n_elev = static_cast<int>(parse_int(key, value));
  } else if (key == "grid.n_azim") {
    c.scene.n_azim = static_cast<int>(parse_int(key, value));
  } else if (key == "grid.nx") {
    c.scene.nx = static_cast<int>(parse_int(key, value));
  } else if (key == "grid.ny") {
    c.scene.ny = static_cast<int>(parse_int(key, value));
  } else if (key == "grid.nz") {
    c.scene.nz = static_cast<int>(parse_int(key, value));
  } else if (key == "grid.elev_min") {
    c.scene.elev_min = parse_double(key, value);
  } else if (key == "grid.elev_max") {
    c.scene.elev_max = parse_double(key, value);
  } else if (key == "room.min") {
    c.room.lo = parse_vec3(key, value);
  } else if (key == "room.max") {
    c.room.hi = parse_vec3(key, value);
  } else if (key == "policy") {
    try {
      c.policy = policy_from_name(value);
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("policy: ") + e.what());
    }
  } else if (key == "steps") {
    c.steps = static_cast<int>(parse_int(key, value));
  } else if (key == "seeds") {
    c.seeds.clear();
    for (const auto& item : split_list(value)) c.seeds.push_back(parse_u64(key, item));
  } else if (key == "eps") {
    c.eps = parse_double(key, value);
  } else if (key == "eps_cloud") {
    c.eps_cloud = parse_double(key, value);
  } else if (key == "mu") {
    c.mu = parse_double(key, value);
  } else if (key == "eta") {
    c.eta = parse_double(key, value);
  } else if (key == "proxies") {
    c.proxies = parse_u64(key, value);
  } else if (key == "gain_dirs") {
    c.gain_dirs = static_cast<int>(parse_int(key, value));
  } else if (key == "carve_resolution") {
    c.carve_resolution = static_cast<int>(parse_int(key, value));
  } else if (key == "p0_count") {
    c.p0_count = parse_u64(key, value);
  } else if (key == "standoff") {
    c.standoff = parse_double(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "svg") {
    c.svg = parse_bool(key, value);
  } else if (key == "dump.depth") {
    c.dump.depth = parse_bool(key, value);
  } else if (key == "dump.cloud") {
    c.dump.cloud = parse_bool(key, value);
  } else if (key == "dump.carving") {
    c.dump.carving = parse_bool(key, value);
  } else if (key == "dump.gain_table") {
    c.dump.gain_table = parse_bool(key, value);
  } else if (key == "dump.proxies") {
    c.dump.proxies = parse_bool(key, value);
  } else if (key == "theorem.mu_values") {
    c.theorem.mu_values.clear();
    for (const auto& item : split_list(value)) {
      c.theorem.mu_values.push_back(parse_double(key, item));
    }
  } else if (key == "theorem.volume_samples") {
    c.theorem.volume_samples = parse_u64(key, value);
  } else if (key == "theorem.surface_samples") {
    c.theorem.surface_samples = parse_u64(key, value);
  } else if (key == "theorem.distance") {
    c.theorem.distance = parse_double(key, value);
  } else if (key == "theorem.rig") {
    c.theorem.rig = parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot read '" + path + "'");
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    try {
      apply_config_entry(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

void apply_overrides(ExperimentConfig& config, std::span<const std::string> entries) {
  for (const auto& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + entry + "': expected key=value");
    }
    apply_config_entry(config, trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
  }
}

void validate_config(const ExperimentConfig& c) {
  const bool has_mesh = !c.mesh_path.empty();
  const bool has_shape = !c.shape.empty();
  if (has_mesh == has_shape) {
    throw ConfigError(std::string("mesh/shape: set exactly one scene source; ") +
                      (has_mesh ? "both are set" : "none is set"));
  }
  static const std::set<std::string> kShapes = {"sphere", "torus", "rounded_cube", "blob", "desk"};
  if (has_shape && !kShapes.count(c.shape.name)) {
    throw ConfigError("shape: unknown shape '" + c.shape.name +
                      "' (expected sphere, torus, rounded_cube, blob, or desk)");
  }
  if (has_shape && (c.shape.level < 0 || c.shape.level > 7)) {
    throw ConfigError("shape.level: must be in [0, 7]");
  }
  try {
    c.sensor.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("sensor: ") + e.what());
  }
  if (c.steps < 1) throw ConfigError("steps: must be >= 1");
  if (c.seeds.empty()) throw ConfigError("seeds: must be non-empty");
  {
    std::set<uint64_t> seen;
    for (const uint64_t s : c.seeds) {
      if (!seen.insert(s).second) {
        throw ConfigError("seeds: duplicate seed " + std::to_string(s));
      }
    }
  }
  if (!(c.eps > 0.0)) throw ConfigError("eps: must be > 0");
  if (!(c.eps_cloud > 0.0)) throw ConfigError("eps_cloud: must be > 0");
  if (c.mu < 0.0) throw ConfigError("mu: must be >= 0 (0 derives 2 * eps_cloud)");
  if (!(c.eta > 0.0)) throw ConfigError("eta: must be > 0");
  if (c.proxies < 1) throw ConfigError("proxies: must be >= 1");
  if (c.gain_dirs < 64) throw ConfigError("gain_dirs: must be >= 64 (SH basis size)");
  if (c.carve_resolution < 2) throw ConfigError("carve_resolution: must be >= 2");
  if (c.standoff < 0.0) throw ConfigError("standoff: must be >= 0 (0 derives the default)");
  if (c.out.empty()) throw ConfigError("out: must be non-empty");

  if (c.protocol == Protocol::object_sphere && c.sphere_radius < 0.0) {
    throw ConfigError("grid.radius: must be > 0 (or 0 for automatic)");
  }
  if (c.protocol != Protocol::verify_theorem) {
    if (c.scene.n_elev < 1) throw ConfigError("grid.n_elev: must be >= 1");
    if (c.scene.n_azim < 1) throw ConfigError("grid.n_azim: must be >= 1");
  }
  if (c.protocol == Protocol::scene5d) {
    if (c.scene.nx < 1) throw ConfigError("grid.nx: must be >= 1");
    if (c.scene.ny < 1) throw ConfigError("grid.ny: must be >= 1");
    if (c.scene.nz < 1) throw ConfigError("grid.nz: must be >= 1");
    constexpr double kHalfPi = 1.5707963267948966;
    if (!(c.scene.elev_min <= c.scene.elev_max) || c.scene.elev_min < -kHalfPi ||
        c.scene.elev_max > kHalfPi) {
      throw ConfigError("grid.elev_min/grid.elev_max: need elev_min <= elev_max within "
                        "[-pi/2, pi/2]");
    }
    const bool lo = lo_set(c.room), hi = hi_set(c.room);
    if (lo != hi) {
      throw ConfigError(lo ? "room.max: room.min is set without room.max"
                           : "room.min: room.max is set without room.min");
    }
    if (lo && hi &&
        !(c.room.lo.x < c.room.hi.x && c.room.lo.y < c.room.hi.y && c.room.lo.z < c.room.hi.z)) {
      throw ConfigError("room: min must be strictly below max on every axis");
    }
  }
  if (c.protocol == Protocol::verify_theorem) {
    if (!has_shape || (c.shape.name != "sphere" && c.shape.name != "torus" &&
                       c.shape.name != "rounded_cube")) {
      throw ConfigError("shape: verify-theorem needs a closed-form analytic shape "
                        "(sphere, torus, or rounded_cube)");
    }
    const auto& mu = c.theorem.mu_values;
    if (mu.empty()) throw ConfigError("theorem.mu_values: must be non-empty");
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (!(mu[i] > 0.0) || (i > 0 && !(mu[i] < mu[i - 1]))) {
        throw ConfigError("theorem.mu_values: must be positive and strictly decreasing");
      }
    }
    if (c.theorem.volume_samples < 10000) {
      throw ConfigError("theorem.volume_samples: must be >= 10000");
    }
    if (c.theorem.surface_samples < 100000) {
      throw ConfigError("theorem.surface_samples: must be >= 100000");
    }
    if (!(c.theorem.distance > 0.0)) throw ConfigError("theorem.distance: must be > 0");
  }
}

std::map<std::string, std::string> to_flat_map(const ExperimentConfig& c) {
  std::map<std::string, std::string> m;
  m["protocol"] = protocol_name(c.protocol);
  if (!c.mesh_path.empty()) m["mesh"] = c.mesh_path;
  if (!c.shape.empty()) {
    m["shape"] = c.shape.name;
    m["shape.p1"] = fmt_double(c.shape.p1);
    m["shape.p2"] = fmt_double(c.shape.p2);
    m["shape.level"] = std::to_string(c.shape.level);
  }
  m["sensor.width"] = std::to_string(c.sensor.width);
  m["sensor.height"] = std::to_string(c.sensor.height);
  m["sensor.hfov"] = fmt_double(c.sensor.hfov);
  m["sensor.vfov"] = fmt_double(c.sensor.vfov);
  m["sensor.min_range"] = fmt_double(c.sensor.min_range);
  m["sensor.max_range"] = fmt_double(c.sensor.max_range);
  m["grid.radius"] = fmt_double(c.sphere_radius);
  m["grid.n_elev"] = std::to_string(c.scene.n_elev);
  m["grid.n_azim"] = std::to_string(c.scene.n_azim);
  m["grid.nx"] = std::to_string(c.scene.nx);
  m["grid.ny"] = std::to_string(c.scene.ny);
  m["grid.nz"] = std::to_string(c.scene.nz);
  m["grid.elev_min"] = fmt_double(c.scene.elev_min);
  m["grid.elev_max"] = fmt_double(c.scene.elev_max);
  if (lo_set(c.room) && hi_set(c.room)) {
    m["room.min"] = fmt_vec3(c.room.lo);
    m["room.max"] = fmt_vec3(c.room.hi);
  }
  m["policy"] = policy_name(c.policy);
  m["steps"] = std::to_string(c.steps);
  m["seeds"] = join(c.seeds, [](uint64_t s) { return std::to_string(s); });
  m["eps"] = fmt_double(c.eps);
  m["eps_cloud"] = fmt_double(c.eps_cloud);
  m["mu"] = fmt_double(c.mu);
  m["eta"] = fmt_double(c.eta);
  m["proxies"] = std::to_string(c.proxies);
  m["gain_dirs"] = std::to_string(c.gain_dirs);
  m["carve_resolution"] = std::to_string(c.carve_resolution);
  m["p0_count"] = std::to_string(c.p0_count);
  m["standoff"] = fmt_double(c.standoff);
  m["out"] = c.out;
  m["svg"] = c.svg ? "true" : "false";
  if (c.dump.depth) m["dump.depth"] = "true";
  if (c.dump.cloud) m["dump.cloud"] = "true";
  if (c.dump.carving) m["dump.carving"] = "true";
  if (c.dump.gain_table) m["dump.gain_table"] = "true";
  if (c.dump.proxies) m["dump.proxies"] = "true";
  m["theorem.mu_values"] = join(c.theorem.mu_values, fmt_double);
  m["theorem.volume_samples"] = std::to_string(c.theorem.volume_samples);
  m["theorem.surface_samples"] = std::to_string(c.theorem.surface_samples);
  m["theorem.distance"] = fmt_double(c.theorem.distance);
  m["theorem.rig"] = c.theorem.rig ? "true" : "false";
  return m;
}

}  // namespace nbv
