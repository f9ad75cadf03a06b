#include <doctest.h>

#include <cmath>
#include <random>

#include "iglov/geometry.hpp"

using namespace iglov;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2.0 * kPi + 0.25) == doctest::Approx(0.25));
  CHECK(wrap_angle(-2.0 * kPi - 0.25) == doctest::Approx(-0.25));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double a = dist(rng);
    const double w = wrap_angle(a);
    CHECK(w > -kPi - 1e-15);
    CHECK(w <= kPi + 1e-15);
    CHECK(std::abs(std::remainder(w - a, 2.0 * kPi)) < 1e-9);
  }
}

TEST_CASE("yaw_rotation follows the compass convention") {
  const Vec3 fwd0 = yaw_rotation(0.0) * Vec3::UnitY();
  CHECK(fwd0.isApprox(Vec3::UnitY(), 1e-12));
  const Vec3 fwd90 = yaw_rotation(0.5 * kPi) * Vec3::UnitY();
  CHECK(fwd90.isApprox(Vec3::UnitX(), 1e-12));
  const Vec3 fwd180 = yaw_rotation(kPi) * Vec3::UnitY();
  CHECK(fwd180.isApprox(-Vec3::UnitY(), 1e-12));
  // Proper rotation.
  const Mat3 r = yaw_rotation(1.234);
  CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-12);
  CHECK(r.determinant() == doctest::Approx(1.0));
}

TEST_CASE("camera_rotation pitches the boresight down") {
  const double pitch = 0.3;
  const Vec3 boresight = camera_rotation(0.0, pitch) * Vec3::UnitY();
  CHECK(boresight.y() == doctest::Approx(std::cos(pitch)));
  CHECK(boresight.z() == doctest::Approx(-std::sin(pitch)));
  CHECK(boresight.x() == doctest::Approx(0.0));
}

TEST_CASE("bearing of a point straight ahead on x") {
  Pose observer;  // identity at origin
  const Vec3 u = bearing(observer, Vec3(2.0, 0.0, 0.0));
  CHECK(u.isApprox(Vec3::UnitX(), 1e-12));
  CHECK_THROWS_AS(bearing(observer, Vec3::Zero()), ZeroRangeError);
}

TEST_CASE("bearing is a unit vector for random poses") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    Pose observer;
    observer.position = Vec3(dist(rng), dist(rng), dist(rng));
    const Eigen::Quaterniond q = Eigen::Quaterniond(
        dist(rng), dist(rng), dist(rng), dist(rng)).normalized();
    observer.orientation = q;
    const Vec3 point(dist(rng), dist(rng), dist(rng));
    if ((point - observer.position).norm() <= 1e-6) {
      continue;
    }
    const Vec3 u = bearing(observer, point);
    CHECK(std::abs(u.norm() - 1.0) < 1e-12);
    // Rotating the bearing back to world recovers the direction.
    const Vec3 dir = (point - observer.position).normalized();
    CHECK((observer.orientation * u - dir).norm() < 1e-9);
  }
}

TEST_CASE("gimbal_ik aims level-forward targets at zero yaw") {
  const Vec3 camera(0.0, 0.0, 0.5);
  const GimbalCommand cmd = gimbal_ik(camera, 0.0, Vec3(0.0, 2.0, 0.0));
  CHECK(cmd.yaw == doctest::Approx(0.0));
  CHECK(cmd.pitch == doctest::Approx(0.24497866312686414).epsilon(1e-12));
  CHECK_FALSE(cmd.yaw_degenerate);
}

TEST_CASE("gimbal_ik handles base yaw and degenerate verticals") {
  const Vec3 camera(0.0, 0.0, 0.5);
  const GimbalCommand east =
      gimbal_ik(camera, 0.5 * kPi, Vec3(2.0, 0.0, 0.0));
  CHECK(east.yaw == doctest::Approx(0.0).epsilon(1e-12));

  const GimbalCommand behind = gimbal_ik(camera, 0.0, Vec3(0.0, -3.0, 0.5));
  CHECK(std::abs(behind.yaw) == doctest::Approx(kPi));
  CHECK(behind.pitch == doctest::Approx(0.0));

  const GimbalCommand below = gimbal_ik(camera, 0.0, Vec3(0.0, 0.0, -1.0));
  CHECK(below.yaw_degenerate);
  CHECK(below.pitch == doctest::Approx(0.5 * kPi));
  const GimbalCommand above = gimbal_ik(camera, 0.0, Vec3(0.0, 0.0, 2.0));
  CHECK(above.yaw_degenerate);
  CHECK(above.pitch == doctest::Approx(-0.5 * kPi));

  CHECK_THROWS_AS(gimbal_ik(camera, 0.0, camera), ZeroRangeError);
}

TEST_CASE("gimbal_ik command points the camera at the landing point") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(-8.0, 8.0);
  std::uniform_real_distribution<double> yaw_dist(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const Vec3 camera(dist(rng), dist(rng), 0.5);
    const Vec3 landing(dist(rng), dist(rng), dist(rng) * 0.1);
    if ((landing - camera).norm() < 1e-3 ||
        std::hypot(landing.x() - camera.x(), landing.y() - camera.y()) <
            1e-6) {
      continue;
    }
    const double base_yaw = yaw_dist(rng);
    const GimbalCommand cmd = gimbal_ik(camera, base_yaw, landing);
    const Vec3 boresight =
        camera_rotation(base_yaw + cmd.yaw, cmd.pitch) * Vec3::UnitY();
    const Vec3 dir = (landing - camera).normalized();
    CHECK((boresight - dir).norm() < 1e-9);
  }
}

TEST_CASE("gimbal_track_step saturates at the rate limit") {
  GimbalLimits limits;
  GimbalState state;
  GimbalCommand cmd;
  cmd.yaw = 1.0;
  cmd.pitch = -0.2;
  const GimbalState next = gimbal_track_step(state, cmd, limits);
  CHECK(next.yaw == doctest::Approx(0.035).epsilon(1e-12));
  CHECK(next.pitch == doctest::Approx(-0.035).epsilon(1e-12));
}

TEST_CASE("gimbal_track_step reaches an admissible target exactly") {
  GimbalLimits limits;
  GimbalState state;
  GimbalCommand cmd;
  cmd.yaw = 0.8123;
  cmd.pitch = 0.4321;
  for (int i = 0; i < 100; ++i) {
    state = gimbal_track_step(state, cmd, limits);
  }
  CHECK(state.yaw == doctest::Approx(cmd.yaw).epsilon(1e-12));
  CHECK(state.pitch == doctest::Approx(cmd.pitch).epsilon(1e-12));
}

TEST_CASE("gimbal_track_step clamps at joint limits") {
  GimbalLimits limits;
  limits.yaw = {-0.25 * kPi, 0.25 * kPi};
  GimbalState state;
  state.yaw = 0.25 * kPi;
  GimbalCommand cmd;
  cmd.yaw = 0.5 * kPi;
  const GimbalState next = gimbal_track_step(state, cmd, limits);
  CHECK(next.yaw == doctest::Approx(0.25 * kPi));
}

TEST_CASE("full-circle yaw takes the shorter arc through the seam") {
  GimbalLimits limits;  // default yaw limits span the full circle
  GimbalState state;
  state.yaw = 3.1;
  GimbalCommand cmd;
  cmd.yaw = -3.1;
  const GimbalState next = gimbal_track_step(state, cmd, limits);
  // The short arc runs through the seam, so yaw grows toward pi instead of
  // swinging the long way around.
  CHECK(next.yaw == doctest::Approx(3.1 + 0.035));
  const GimbalState after = gimbal_track_step(next, cmd, limits);
  CHECK(after.yaw == doctest::Approx(wrap_angle(3.1 + 0.07)));
  CHECK(after.yaw < 0.0);
}

TEST_CASE("tracking distance to the target never increases") {
  GimbalLimits limits;
  limits.yaw = {-2.0, 2.0};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    GimbalState state;
    state.yaw = limits.yaw.clamp(dist(rng));
    state.pitch = limits.pitch.clamp(dist(rng));
    GimbalCommand cmd;
    cmd.yaw = dist(rng);
    cmd.pitch = dist(rng);
    const double yaw_target = limits.yaw.clamp(wrap_angle(cmd.yaw));
    const double pitch_target = limits.pitch.clamp(wrap_angle(cmd.pitch));
    double yaw_err = std::abs(yaw_target - state.yaw);
    double pitch_err = std::abs(pitch_target - state.pitch);
    for (int i = 0; i < 40; ++i) {
      state = gimbal_track_step(state, cmd, limits);
      const double new_yaw_err = std::abs(yaw_target - state.yaw);
      const double new_pitch_err = std::abs(pitch_target - state.pitch);
      CHECK(new_yaw_err <= yaw_err + 1e-12);
      CHECK(new_pitch_err <= pitch_err + 1e-12);
      yaw_err = new_yaw_err;
      pitch_err = new_pitch_err;
    }
  }
}

TEST_CASE("degenerate command holds the current yaw") {
  GimbalLimits limits;
  GimbalState state;
  state.yaw = 0.7;
  GimbalCommand cmd;
  cmd.yaw = 0.0;
  cmd.pitch = 0.5 * kPi;
  cmd.yaw_degenerate = true;
  const GimbalState next = gimbal_track_step(state, cmd, limits);
  CHECK(next.yaw == doctest::Approx(0.7));
  CHECK(next.pitch == doctest::Approx(0.035));
}
