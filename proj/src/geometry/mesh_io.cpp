#include "nbv/geometry/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "nbv/core/errors.hpp"

namespace nbv {
namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

int resolve_obj_index(long raw, std::size_t n_vertices, const std::string& path, int line) {
  if (raw == 0) parse_fail(path, line, "face index 0 (OBJ indices are 1-based)");
  long idx = raw > 0 ? raw - 1 : static_cast<long>(n_vertices) + raw;
  if (idx < 0 || idx >= static_cast<long>(n_vertices)) {
    parse_fail(path, line, "face index " + std::to_string(raw) + " out of range");
  }
  return static_cast<int>(idx);
}

TriangleMesh load_obj(const std::string& path, std::ifstream& in) {
  TriangleMesh mesh;
  std::string line_text;
  int line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ls(line_text);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) parse_fail(path, line, "malformed vertex");
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string corner;
      while (ls >> corner) {
        // "i", "i/j", "i//k", "i/j/k" — only the vertex index matters here.
        const std::size_t slash = corner.find('/');
        const std::string head = slash == std::string::npos ? corner : corner.substr(0, slash);
        long raw = 0;
        try {
          std::size_t used = 0;
          raw = std::stol(head, &used);
          if (used != head.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
          parse_fail(path, line, "malformed face index '" + corner + "'");
        }
        poly.push_back(resolve_obj_index(raw, mesh.vertices.size(), path, line));
      }
      if (poly.size() < 3) parse_fail(path, line, "face with fewer than 3 vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
    // Other tags (vn, vt, usemtl, o, g, s, mtllib, ...) are ignored.
  }
  return mesh;
}

struct PlyProperty {
  std::string type;   // scalar type, or list entry type
  std::string name;
  bool is_list{false};
  std::string count_type;
};

std::size_t scalar_size(const std::string& t, const std::string& path, int line) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
      t == "float32") {
    return 4;
  }
  if (t == "double" || t == "float64") return 8;
  parse_fail(path, line, "unknown PLY type '" + t + "'");
}

double read_binary_scalar(std::ifstream& in, const std::string& type, const std::string& path) {
  unsigned char buf[8];
  const std::size_t sz = scalar_size(type, path, 0);
  if (!in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(sz))) {
    throw ParseError(path + ": truncated binary payload");
  }
  if (type == "float" || type == "float32") {
    float f;
    std::memcpy(&f, buf, 4);
    return f;
  }
  if (type == "double" || type == "float64") {
    double d;
    std::memcpy(&d, buf, 8);
    return d;
  }
  // Integer types, little endian.
  uint64_t u = 0;
  for (std::size_t i = 0; i < sz; ++i) u |= static_cast<uint64_t>(buf[i]) << (8 * i);
  const bool is_signed = type[0] == 'c' || type[0] == 's' || type[0] == 'i';
  if (is_signed) {
    const uint64_t sign_bit = 1ULL << (8 * sz - 1);
    if (u & sign_bit) return static_cast<double>(static_cast<int64_t>(u | ~((sign_bit << 1) - 1)));
  }
  return static_cast<double>(u);
}

TriangleMesh load_ply(const std::string& path, std::ifstream& in) {
  std::string line_text;
  int line = 0;

  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) parse_fail(path, line, "unexpected end of header");
    ++line;
    if (!out.empty() && out.back() == '\r') out.pop_back();
  };

  next_line(line_text);
  if (line_text != "ply") parse_fail(path, line, "missing 'ply' magic");

  bool binary = false;
  struct Element {
    std::string name;
    std::size_t count{0};
    std::vector<PlyProperty> props;
  };
  std::vector<Element> elements;

  for (;;) {
    next_line(line_text);
    std::istringstream ls(line_text);
    std::string tag;
    ls >> tag;
    if (tag == "comment" || tag == "obj_info" || tag.empty()) continue;
    if (tag == "format") {
      std::string fmt, ver;
      ls >> fmt >> ver;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        parse_fail(path, line, "unsupported PLY format '" + fmt + "'");
      }
    } else if (tag == "element") {
      Element e;
      if (!(ls >> e.name >> e.count)) parse_fail(path, line, "malformed element");
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) parse_fail(path, line, "property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        if (!(ls >> p.count_type >> p.type >> p.name)) parse_fail(path, line, "malformed list property");
      } else {
        p.type = t;
        if (!(ls >> p.name)) parse_fail(path, line, "malformed property");
      }
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      break;
    } else {
      parse_fail(path, line, "unknown header line '" + tag + "'");
    }
  }

  TriangleMesh mesh;
  auto ascii_tokens = [&](std::size_t need, std::vector<double>& out) {
    next_line(line_text);
    std::istringstream ls(line_text);
    out.clear();
    double v;
    while (ls >> v) out.push_back(v);
    if (out.size() < need) parse_fail(path, line, "too few values on data line");
  };

  for (const auto& elem : elements) {
    if (elem.name == "vertex") {
      int ix = -1, iy = -1, iz = -1;
      for (std::size_t p = 0; p < elem.props.size(); ++p) {
        if (elem.props[p].is_list) parse_fail(path, line, "list property on vertex element");
        if (elem.props[p].name == "x") ix = static_cast<int>(p);
        if (elem.props[p].name == "y") iy = static_cast<int>(p);
        if (elem.props[p].name == "z") iz = static_cast<int>(p);
      }
      if (ix < 0 || iy < 0 || iz < 0) parse_fail(path, line, "vertex element lacks x/y/z");
      std::vector<double> row;
      for (std::size_t i = 0; i < elem.count; ++i) {
        if (binary) {
          row.clear();
          for (const auto& p : elem.props) row.push_back(read_binary_scalar(in, p.type, path));
        } else {
          ascii_tokens(elem.props.size(), row);
        }
        mesh.vertices.push_back({row[ix], row[iy], row[iz]});
      }
    } else if (elem.name == "face") {
      const PlyProperty* list = nullptr;
      for (const auto& p : elem.props) {
        if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index")) list = &p;
      }
      if (list == nullptr || elem.props.size() != 1) {
        parse_fail(path, line, "face element must be a single vertex_indices list");
      }
      for (std::size_t i = 0; i < elem.count; ++i) {
        std::vector<long> poly;
        if (binary) {
          const auto n = static_cast<std::size_t>(read_binary_scalar(in, list->count_type, path));
          for (std::size_t k = 0; k < n; ++k) {
            poly.push_back(static_cast<long>(read_binary_scalar(in, list->type, path)));
          }
        } else {
          std::vector<double> row;
          ascii_tokens(1, row);
          const auto n = static_cast<std::size_t>(row[0]);
          if (row.size() < n + 1) parse_fail(path, line, "face list shorter than its count");
          for (std::size_t k = 0; k < n; ++k) poly.push_back(static_cast<long>(row[k + 1]));
        }
        if (poly.size() < 3) parse_fail(path, line, "face with fewer than 3 vertices");
        for (long idx : poly) {
          if (idx < 0 || idx >= static_cast<long>(mesh.vertices.size())) {
            parse_fail(path, line, "face index " + std::to_string(idx) + " out of range");
          }
        }
        for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
          mesh.faces.push_back({static_cast<int>(poly[0]), static_cast<int>(poly[k]),
                                static_cast<int>(poly[k + 1])});
        }
      }
    } else {
      // Unknown element: skip its payload.
      for (std::size_t i = 0; i < elem.count; ++i) {
        if (binary) {
          for (const auto& p : elem.props) {
            if (p.is_list) {
              const auto n =
                  static_cast<std::size_t>(read_binary_scalar(in, p.count_type, path));
              for (std::size_t k = 0; k < n; ++k) read_binary_scalar(in, p.type, path);
            } else {
              read_binary_scalar(in, p.type, path);
            }
          }
        } else {
          next_line(line_text);
        }
      }
    }
  }
  return mesh;
}

TriangleMesh load_any(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file: " + path);

  std::string lower = path;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  TriangleMesh mesh;
  if (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".obj") == 0) {
    mesh = load_obj(path, in);
  } else if (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".ply") == 0) {
    mesh = load_ply(path, in);
  } else {
    throw InvalidInput("unsupported mesh extension (want .obj or .ply): " + path);
  }
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw ParseError(path + ": no geometry found");
  }
  mesh.finalize();
  return mesh;
}

}  // namespace

TriangleMesh load_mesh_raw(const std::string& path) { return load_any(path); }

TriangleMesh load_mesh(const std::string& path) {
  TriangleMesh mesh = load_any(path);
  normalize_unit_cube(mesh);
  return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file: " + path);
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x << " " << v.y << " " << v.z << "\n";
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void save_ply(const TriangleMesh& mesh, const std::string& path, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write mesh file: " + path);
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.faces.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  if (binary) {
    for (const Vec3& v : mesh.vertices) {
      out.write(reinterpret_cast<const char*>(&v.x), 8);
      out.write(reinterpret_cast<const char*>(&v.y), 8);
      out.write(reinterpret_cast<const char*>(&v.z), 8);
    }
    for (const auto& f : mesh.faces) {
      const unsigned char n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      const int32_t idx[3] = {f[0], f[1], f[2]};
      out.write(reinterpret_cast<const char*>(idx), 12);
    }
  } else {
    out.precision(17);
    for (const Vec3& v : mesh.vertices) out << v.x << " " << v.y << " " << v.z << "\n";
    for (const auto& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace nbv
