// Regenerates the checked-in test meshes under data/ (or a directory given
// as argv[1]). The blob is the deterministic file-mesh stand-in used by the
// examples and the acceptance gate.

#include <cstdio>
#include <filesystem>
#include <string>

#include "nbv/geometry/mesh_io.hpp"
#include "nbv/geometry/shapes.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/blob.obj";
  nbv::save_obj(nbv::make_blob(4), path);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}
