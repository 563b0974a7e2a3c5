#pragma once

#include <string>

#include "nbv/geometry/mesh.hpp"

namespace nbv {

// Load an OBJ or PLY (ascii or binary_little_endian) triangle mesh, then
// translate/scale it into the unit cube centered at the origin. Polygonal
// faces are fan-triangulated. Throws IoError (missing/unreadable file) or
// ParseError (malformed content; message carries the 1-based line number for
// text formats).
TriangleMesh load_mesh(const std::string& path);

// Same, without the unit-cube normalization (fixtures, round-trip tests).
TriangleMesh load_mesh_raw(const std::string& path);

void save_obj(const TriangleMesh& mesh, const std::string& path);
void save_ply(const TriangleMesh& mesh, const std::string& path, bool binary = false);

}  // namespace nbv
