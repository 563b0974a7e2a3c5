#include "nbv/sensor/camera.hpp"

#include <cmath>
#include <sstream>

#include "nbv/core/errors.hpp"

namespace nbv {

void SensorIntrinsics::validate() const {
  std::ostringstream msg;
  if (width < 1 || height < 1) {
    msg << "sensor image must be at least 1x1, got " << width << "x" << height;
    throw InvalidInput(msg.str());
  }
  if (!(hfov > 0.0) || hfov >= M_PI || !(vfov > 0.0) || vfov >= M_PI) {
    msg << "sensor FOV must lie in (0, pi), got hfov=" << hfov << " vfov=" << vfov;
    throw InvalidInput(msg.str());
  }
  if (!(min_range > 0.0) || !(min_range < max_range)) {
    msg << "sensor needs 0 < min_range < max_range, got [" << min_range << ", " << max_range
        << "]";
    throw InvalidInput(msg.str());
  }
}

CameraPose CameraPose::from_direction(const Vec3& position, const Vec3& forward, double roll) {
  if (forward.norm() < 1e-12) throw InvalidInput("camera forward direction is zero");
  const Vec3 z = forward.normalized();
  Vec3 up{0.0, 0.0, 1.0};
  if (std::abs(dot(z, up)) > 0.999) up = {0.0, 1.0, 0.0};
  const Vec3 x = cross(z, up).normalized();  // facing east with z up, "right" is south
  const Vec3 y = cross(z, x);
  CameraPose pose;
  pose.position = position;
  pose.rot = Mat3::from_cols(x, y, z);
  if (roll != 0.0) pose.rot = rotation_about_axis(z, roll) * pose.rot;
  return pose;
}

CameraPose CameraPose::look_at(const Vec3& position, const Vec3& target) {
  const Vec3 d = target - position;
  if (d.norm() < 1e-12) throw InvalidInput("camera cannot look at its own position");
  return from_direction(position, d);
}

CameraPose CameraPose::from_elev_azim(const Vec3& position, double elevation, double azimuth,
                                      double roll) {
  const double ce = std::cos(elevation);
  const Vec3 forward{ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation)};
  return from_direction(position, forward, roll);
}

void CameraPose::validate() const {
  const Mat3 g = rot.transposed() * rot;
  double worst = 0.0;
  for (int r = 0; r < 3; ++r) {
    const Vec3& row = r == 0 ? g.r0 : (r == 1 ? g.r1 : g.r2);
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(row[c] - (r == c ? 1.0 : 0.0)));
  }
  const double det = dot(cross(rot.col(0), rot.col(1)), rot.col(2));
  if (worst > 1e-6 || std::abs(det - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "camera rotation is not a proper rotation (orthonormality error " << worst
        << ", det " << det << ")";
    throw ContractViolation(msg.str());
  }
}

Vec3 pixel_ray(const SensorIntrinsics& intr, int px, int py) {
  const double tx = std::tan(0.5 * intr.hfov);
  const double ty = std::tan(0.5 * intr.vfov);
  const double u = (2.0 * (px + 0.5) / intr.width - 1.0) * tx;
  const double v = (2.0 * (py + 0.5) / intr.height - 1.0) * ty;
  return Vec3{u, v, 1.0}.normalized();
}

bool in_frustum(const SensorIntrinsics& intr, const CameraPose& pose, const Vec3& x) {
  const Vec3 p = pose.to_camera(x);
  if (!(p.z > 0.0)) return false;
  return std::abs(p.x) <= std::tan(0.5 * intr.hfov) * p.z &&
         std::abs(p.y) <= std::tan(0.5 * intr.vfov) * p.z;
}

}  // namespace nbv
