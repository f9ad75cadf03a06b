#pragma once

#include <vector>

#include "iglov/geometry.hpp"

namespace iglov {

// Piecewise-linear reference path traversed at constant speed. Heading at a
// point is the heading of its segment; the final heading extends past the
// last waypoint.
class Trajectory {
 public:
  Trajectory(std::vector<Vec3> waypoints, double speed);

  double speed() const { return speed_; }
  double length() const { return cumulative_.back(); }
  const std::vector<Vec3>& waypoints() const { return waypoints_; }

  // Position at arc length s, clamped to [0, length].
  Vec3 position(double s) const;
  double heading(double s) const;
  Pose pose(double s) const;

  // Arc length of the point on the path closest to p.
  double project(const Vec3& p) const;

 private:
  std::vector<Vec3> waypoints_;
  std::vector<double> cumulative_;  // arc length at each waypoint
  double speed_;
};

}  // namespace iglov
