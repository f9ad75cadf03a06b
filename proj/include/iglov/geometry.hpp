#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "iglov/errors.hpp"

namespace iglov {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

// World frame: x east, y north, z up. A yaw of zero faces +y; positive yaw
// rotates the forward axis toward +x (compass convention). Columns of the
// returned matrix are the frame's right / forward / up axes in world
// coordinates.
Mat3 yaw_rotation(double yaw);

// Camera orientation from base-relative yaw and pitch. Pitch is positive
// looking down. Camera axes: x right, y forward (optical), z up.
Mat3 camera_rotation(double yaw, double pitch);

Mat3 skew(const Vec3& v);

struct Pose {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  static Pose from_yaw(const Vec3& position, double yaw);
  static Pose from_yaw_pitch(const Vec3& position, double yaw, double pitch);

  // Yaw of the forward axis, compass convention.
  double yaw() const;
  Mat3 rotation() const { return orientation.toRotationMatrix(); }
};

// Unit bearing of a world point in the observer frame.
// Throws ZeroRangeError when the point coincides with the observer position.
Vec3 bearing(const Pose& observer, const Vec3& point_w);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const;
  // True when the interval spans a full turn, i.e. the axis is continuous.
  bool full_circle() const { return hi - lo >= 2.0 * kPi - 1e-12; }
};

struct GimbalState {
  double yaw = 0.0;    // relative to the base forward axis
  double pitch = 0.0;  // positive looking down
};

struct GimbalCommand {
  double yaw = 0.0;
  double pitch = 0.0;
  // Target is (nearly) straight above or below the camera; yaw is held.
  bool yaw_degenerate = false;
};

struct GimbalLimits {
  Interval yaw{-kPi, kPi};
  Interval pitch{-0.35, 1.4};
  double max_rate = 3.5;  // rad/s, both axes
  double tick = 0.01;     // controller period, s
};

// Yaw/pitch command that points the camera boresight at a world landing
// point. Yaw is relative to the base forward axis. Throws ZeroRangeError
// when the point coincides with the camera position. A target within 1e-9 m
// of the vertical axis sets yaw_degenerate and commands pitch +-pi/2.
GimbalCommand gimbal_ik(const Vec3& camera_position, double base_yaw,
                        const Vec3& landing_point);

// One controller tick: each axis moves toward its commanded angle along the
// shortest admissible arc, rate limited to max_rate * tick and clamped to
// the joint limits. Yaw wraps only when its limit interval spans a full
// circle. Never overshoots; per-axis distance to the clamped target never
// increases.
GimbalState gimbal_track_step(const GimbalState& state,
                              const GimbalCommand& command,
                              const GimbalLimits& limits);

}  // namespace iglov
