#pragma once

#include <vector>

#include "iglov/info_map.hpp"

namespace iglov {

// Polar view-landing-point sampler around the robot. Circles are concentric
// at the robot position, planar at the robot height; angles are relative to
// the base forward axis.
struct SamplerParams {
  double min_radius = 2.0;      // innermost circle radius, m
  double radius_step = 0.4;     // circle spacing, m
  int radial_steps = 10;        // circles beyond the innermost one
  double angle_step = 20.0 * kPi / 180.0;
  int angular_samples = 18;     // even; grid spans [-n/2, n/2] * angle_step
  double neighbor_radius = 1.2; // feature aggregation radius, m

  void validate() const;
  int circle_count() const { return radial_steps + 1; }
  int samples_per_circle() const { return angular_samples + 1; }
  double radius(int circle) const { return min_radius + circle * radius_step; }
  double max_theta() const { return (angular_samples / 2) * angle_step; }
};

struct SamplePoint {
  int circle = 0;   // 0-based circle index, innermost first
  int slot = 0;     // angular index k, theta = k * angle_step
  double theta = 0.0;
  double radius = 0.0;
  Vec3 position = Vec3::Zero();
  double gain = 0.0;
};

struct SampleGrid {
  Vec3 robot_position = Vec3::Zero();
  double base_yaw = 0.0;
  SamplerParams params;
  // Row-major: circle-major, theta ascending within each circle.
  std::vector<SamplePoint> points;

  const SamplePoint& at(int circle, int slot_index) const;
};

// Polar sample positions; gains are left at zero.
SampleGrid generate_samples(const Vec3& robot_position, double base_yaw,
                            const SamplerParams& params);

// Angle-penalized information gain of one sample:
//   g = neighbor_sum_info(sample) * (1 - |theta| / pi).
double sample_gain(const InfoMap& map, const Vec3& camera_position,
                   const SamplePoint& sample, const SamplerParams& params,
                   const NoiseModel& noise);

void evaluate_gains(const InfoMap& map, const Vec3& camera_position,
                    SampleGrid& grid, const NoiseModel& noise);

// Best sample per circle, ties broken by smaller |theta| and then by the
// negative angle. Throws EmptyGridError on an empty grid.
std::vector<SamplePoint> best_samples(const SampleGrid& grid);

}  // namespace iglov
