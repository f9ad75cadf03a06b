#include "iglov/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace iglov {

Trajectory::Trajectory(std::vector<Vec3> waypoints, double speed)
    : waypoints_(std::move(waypoints)), speed_(speed) {
  if (waypoints_.size() < 2) {
    throw ScenarioError("trajectory: need at least two waypoints");
  }
  if (!(speed_ > 0.0) || !std::isfinite(speed_)) {
    throw ScenarioError("trajectory: speed must be positive");
  }
  cumulative_.resize(waypoints_.size(), 0.0);
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    const double seg = (waypoints_[i] - waypoints_[i - 1]).norm();
    if (seg < 1e-9) {
      throw ScenarioError("trajectory: consecutive waypoints coincide");
    }
    cumulative_[i] = cumulative_[i - 1] + seg;
  }
}

Vec3 Trajectory::position(double s) const {
  const double clamped = std::clamp(s, 0.0, length());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(),
                                   clamped);
  const std::size_t hi = std::min(
      static_cast<std::size_t>(std::distance(cumulative_.begin(), it)),
      waypoints_.size() - 1);
  const std::size_t lo = hi - 1;
  const double seg = cumulative_[hi] - cumulative_[lo];
  const double t = (clamped - cumulative_[lo]) / seg;
  return waypoints_[lo] + t * (waypoints_[hi] - waypoints_[lo]);
}

double Trajectory::heading(double s) const {
  const double clamped = std::clamp(s, 0.0, length());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(),
                                   clamped);
  const std::size_t hi = std::min(
      static_cast<std::size_t>(std::distance(cumulative_.begin(), it)),
      waypoints_.size() - 1);
  const Vec3 d = waypoints_[hi] - waypoints_[hi - 1];
  return std::atan2(d.x(), d.y());
}

Pose Trajectory::pose(double s) const {
  return Pose::from_yaw(position(s), heading(s));
}

double Trajectory::project(const Vec3& p) const {
  double best_s = 0.0;
  double best_d2 = (p - waypoints_.front()).squaredNorm();
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    const Vec3& a = waypoints_[i - 1];
    const Vec3& b = waypoints_[i];
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    const Vec3 q = a + t * ab;
    const double d2 = (p - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = cumulative_[i - 1] + t * std::sqrt(len2);
    }
  }
  return best_s;
}

}  // namespace iglov
