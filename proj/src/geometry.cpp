#include "iglov/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace iglov {

double wrap_angle(double angle) {
  double a = std::fmod(angle, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

Mat3 yaw_rotation(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat3 r;
  // clang-format off
  r <<  c, s, 0.0,
       -s, c, 0.0,
      0.0, 0.0, 1.0;
  // clang-format on
  return r;
}

Mat3 camera_rotation(double yaw, double pitch) {
  const double c = std::cos(pitch);
  const double s = std::sin(pitch);
  Mat3 rx;  // rotation about the right axis, positive pitch tips forward down
  // clang-format off
  rx << 1.0, 0.0, 0.0,
        0.0,   c,   s,
        0.0,  -s,   c;
  // clang-format on
  return yaw_rotation(yaw) * rx;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<  0.0, -v.z(),  v.y(),
      v.z(),    0.0, -v.x(),
     -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

Pose Pose::from_yaw(const Vec3& position, double yaw) {
  Pose p;
  p.position = position;
  p.orientation = Eigen::Quaterniond(yaw_rotation(yaw));
  return p;
}

Pose Pose::from_yaw_pitch(const Vec3& position, double yaw, double pitch) {
  Pose p;
  p.position = position;
  p.orientation = Eigen::Quaterniond(camera_rotation(yaw, pitch));
  return p;
}

double Pose::yaw() const {
  const Vec3 fwd = orientation * Vec3::UnitY();
  return std::atan2(fwd.x(), fwd.y());
}

Vec3 bearing(const Pose& observer, const Vec3& point_w) {
  const Vec3 d = point_w - observer.position;
  const double r = d.norm();
  if (r <= 1e-9) {
    throw ZeroRangeError("bearing: point coincides with observer");
  }
  const Vec3 local = observer.orientation.conjugate() * d;
  return local / local.norm();
}

double Interval::clamp(double v) const { return std::min(std::max(v, lo), hi); }

GimbalCommand gimbal_ik(const Vec3& camera_position, double base_yaw,
                        const Vec3& landing_point) {
  const Vec3 d = landing_point - camera_position;
  const double r = d.norm();
  if (r <= 1e-9) {
    throw ZeroRangeError("gimbal_ik: landing point coincides with camera");
  }
  GimbalCommand cmd;
  const double horiz = std::hypot(d.x(), d.y());
  if (horiz < 1e-9) {
    cmd.yaw = 0.0;
    cmd.pitch = d.z() < 0.0 ? 0.5 * kPi : -0.5 * kPi;
    cmd.yaw_degenerate = true;
    return cmd;
  }
  cmd.yaw = wrap_angle(std::atan2(d.x(), d.y()) - base_yaw);
  cmd.pitch = std::atan2(-d.z(), horiz);
  return cmd;
}

namespace {

// Single-axis tracking step toward a clamped target.
double track_axis(double value, double target, const Interval& limits,
                  double max_step, bool allow_wrap) {
  if (allow_wrap && limits.full_circle()) {
    const double diff = wrap_angle(target - value);
    const double step = std::clamp(diff, -max_step, max_step);
    return wrap_angle(value + step);
  }
  const double clamped = limits.clamp(wrap_angle(target));
  const double diff = clamped - value;
  const double step = std::clamp(diff, -max_step, max_step);
  return limits.clamp(value + step);
}

}  // namespace

GimbalState gimbal_track_step(const GimbalState& state,
                              const GimbalCommand& command,
                              const GimbalLimits& limits) {
  const double max_step = limits.max_rate * limits.tick;
  GimbalState next = state;
  if (!command.yaw_degenerate) {
    next.yaw = track_axis(state.yaw, command.yaw, limits.yaw, max_step, true);
  }
  next.pitch =
      track_axis(state.pitch, command.pitch, limits.pitch, max_step, false);
  return next;
}

}  // namespace iglov
