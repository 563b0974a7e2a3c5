#pragma once

#include "nbv/core/vec3.hpp"

namespace nbv {

// Pinhole depth-sensor parameters. FOVs are full angles in radians.
struct SensorIntrinsics {
  int width = 64;
  int height = 64;
  double hfov = 1.2;
  double vfov = 1.2;
  double min_range = 0.05;
  double max_range = 4.0;

  // Throws InvalidInput unless FOVs are in (0, pi), 0 < min < max range, and
  // both pixel counts are >= 1.
  void validate() const;
};

// Rigid camera placement. `rot` maps camera coordinates to world coordinates;
// its columns are the camera axes expressed in world frame, using the usual
// sensor convention: x right, y down, z forward (view direction).
struct CameraPose {
  Vec3 position{0.0, 0.0, 0.0};
  Mat3 rot = Mat3::identity();

  // Camera at `position` looking toward `target`, levelled against world +z
  // (an alternate up kicks in when the view direction is near-vertical).
  static CameraPose look_at(const Vec3& position, const Vec3& target);

  // Camera looking along `forward`, with an optional roll (radians) about the
  // view direction applied after levelling.
  static CameraPose from_direction(const Vec3& position, const Vec3& forward, double roll = 0.0);

  // Viewing direction from elevation/azimuth in a z-up world: elevation 0 is
  // horizontal, +pi/2 straight up; azimuth 0 along +x, counterclockwise.
  static CameraPose from_elev_azim(const Vec3& position, double elevation, double azimuth,
                                   double roll = 0.0);

  Vec3 forward() const { return rot.col(2); }
  Vec3 to_world_dir(const Vec3& cam_dir) const { return rot * cam_dir; }
  Vec3 to_camera(const Vec3& world_point) const {
    return rot.transposed() * (world_point - position);
  }

  // Throws ContractViolation unless rot is orthonormal with det +1 (1e-6).
  void validate() const;
};

// Camera-frame direction through the center of pixel (px, py); unit length.
Vec3 pixel_ray(const SensorIntrinsics& intr, int px, int py);

// Angular frustum membership (no range test): the point projects inside the
// image rectangle and sits strictly in front of the camera.
bool in_frustum(const SensorIntrinsics& intr, const CameraPose& pose, const Vec3& x);

}  // namespace nbv
