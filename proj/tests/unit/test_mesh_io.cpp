#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "nbv/core/errors.hpp"
#include "nbv/geometry/mesh_io.hpp"
#include "nbv/geometry/shapes.hpp"

using namespace nbv;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("io_test_") + name;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("obj round trip preserves geometry") {
  const TriangleMesh blob = make_blob(2);
  const std::string path = temp_path("blob.obj");
  save_obj(blob, path);
  const TriangleMesh back = load_mesh_raw(path);
  REQUIRE(back.vertices.size() == blob.vertices.size());
  REQUIRE(back.faces.size() == blob.faces.size());
  for (std::size_t i = 0; i < blob.vertices.size(); ++i) {
    CHECK((back.vertices[i] - blob.vertices[i]).norm() == doctest::Approx(0.0));
  }
  CHECK(back.watertight);
  std::remove(path.c_str());
}

TEST_CASE("ply ascii and binary round trips; icosphere level 3 loads with 1280 faces") {
  const AnalyticShape s = make_sphere(1.0, 3);
  for (const bool binary : {false, true}) {
    const std::string path = temp_path(binary ? "ico.bin.ply" : "ico.ascii.ply");
    save_ply(s.mesh, path, binary);
    const TriangleMesh back = load_mesh_raw(path);
    CHECK(back.faces.size() == 1280);
    CHECK(back.watertight);
    for (std::size_t i = 0; i < back.vertices.size(); i += 101) {
      CHECK((back.vertices[i] - s.mesh.vertices[i]).norm() == doctest::Approx(0.0));
    }
    std::remove(path.c_str());
  }
}

TEST_CASE("load_mesh normalizes into the unit cube centered at the origin") {
  TriangleMesh box = make_box({10.0, -4.0, 7.0}, {3.0, 1.0, 0.5});
  const std::string path = temp_path("box.obj");
  save_obj(box, path);
  const TriangleMesh m = load_mesh(path);
  const Vec3 ext = m.bbox.extent();
  CHECK(std::max({ext.x, ext.y, ext.z}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.bbox.center().norm() == doctest::Approx(0.0));
  // Aspect ratio preserved by uniform scaling.
  CHECK(ext.y == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(ext.z == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("obj parser reports the offending line") {
  const std::string path = temp_path("bad_index.obj");
  write_text(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n");
  try {
    (void)load_mesh_raw(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":4:") != std::string::npos);  // 1-based line of the bad face
    CHECK(msg.find("index 0") != std::string::npos);
  }
  std::remove(path.c_str());

  const std::string path2 = temp_path("bad_vertex.obj");
  write_text(path2, "v 0 0\n");
  try {
    (void)load_mesh_raw(path2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
  std::remove(path2.c_str());
}

TEST_CASE("obj quads are fan-triangulated and negative indices resolve") {
  const std::string path = temp_path("quad.obj");
  write_text(path,
             "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
             "f 1 2 3 4\n"
             "f -4 -3 -2\n");
  const TriangleMesh m = load_mesh_raw(path);
  CHECK(m.vertices.size() == 4);
  CHECK(m.faces.size() == 3);  // quad -> 2, negative-index tri -> 1
  CHECK(m.faces[2][0] == 0);
  CHECK(m.faces[2][1] == 1);
  CHECK(m.faces[2][2] == 2);
  std::remove(path.c_str());
}

TEST_CASE("obj face corner syntax variants parse") {
  const std::string path = temp_path("corners.obj");
  write_text(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2/2 3//3\n");
  const TriangleMesh m = load_mesh_raw(path);
  CHECK(m.faces.size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("ply vertex elements may carry extra scalar properties") {
  const std::string path = temp_path("extra.ply");
  write_text(path,
             "ply\nformat ascii 1.0\n"
             "element vertex 3\n"
             "property float x\nproperty float y\nproperty float z\nproperty float quality\n"
             "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
             "0 0 0 0.5\n1 0 0 0.5\n0 1 0 0.5\n"
             "3 0 1 2\n");
  const TriangleMesh m = load_mesh_raw(path);
  CHECK(m.vertices.size() == 3);
  CHECK(m.faces.size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("missing files raise IoError; unknown extensions raise InvalidInput") {
  CHECK_THROWS_AS((void)load_mesh("does_not_exist.obj"), IoError);
  const std::string path = temp_path("mesh.stl");
  write_text(path, "solid nope\n");
  CHECK_THROWS_AS((void)load_mesh(path), InvalidInput);
  std::remove(path.c_str());
}

TEST_CASE("ply format line is validated") {
  const std::string path = temp_path("big_endian.ply");
  write_text(path,
             "ply\nformat binary_big_endian 1.0\nelement vertex 0\nelement face 0\n"
             "property list uchar int vertex_indices\nend_header\n");
  CHECK_THROWS_AS((void)load_mesh_raw(path), ParseError);
  std::remove(path.c_str());
}
