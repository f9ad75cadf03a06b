#include "iglov/sampling.hpp"

#include <cmath>

namespace iglov {

void SamplerParams::validate() const {
  if (!(min_radius > 0.0) || !std::isfinite(min_radius)) {
    throw ScenarioError("sampler: min_radius must be positive");
  }
  if (!(radius_step > 0.0) || !std::isfinite(radius_step)) {
    throw ScenarioError("sampler: radius_step must be positive");
  }
  if (radial_steps < 0) {
    throw ScenarioError("sampler: radial_steps must be non-negative");
  }
  if (!(angle_step > 0.0) || angle_step > kPi) {
    throw ScenarioError("sampler: angle_step must be in (0, pi]");
  }
  if (angular_samples <= 0 || angular_samples % 2 != 0) {
    throw ScenarioError("sampler: angular_samples must be positive and even");
  }
  if (!(neighbor_radius > 0.0) || !std::isfinite(neighbor_radius)) {
    throw ScenarioError("sampler: neighbor_radius must be positive");
  }
}

const SamplePoint& SampleGrid::at(int circle, int slot_index) const {
  return points.at(static_cast<std::size_t>(circle) *
                       params.samples_per_circle() +
                   slot_index);
}

SampleGrid generate_samples(const Vec3& robot_position, double base_yaw,
                            const SamplerParams& params) {
  params.validate();
  SampleGrid grid;
  grid.robot_position = robot_position;
  grid.base_yaw = base_yaw;
  grid.params = params;
  grid.points.reserve(static_cast<std::size_t>(params.circle_count()) *
                      params.samples_per_circle());
  const int half = params.angular_samples / 2;
  for (int i = 0; i < params.circle_count(); ++i) {
    const double r = params.radius(i);
    for (int k = -half; k <= half; ++k) {
      SamplePoint s;
      s.circle = i;
      s.slot = k;
      s.theta = k * params.angle_step;
      s.radius = r;
      const double a = s.theta + base_yaw;
      s.position = robot_position + Vec3(r * std::sin(a), r * std::cos(a), 0.0);
      grid.points.push_back(s);
    }
  }
  return grid;
}

double sample_gain(const InfoMap& map, const Vec3& camera_position,
                   const SamplePoint& sample, const SamplerParams& params,
                   const NoiseModel& noise) {
  const double info = map.neighbor_sum_info(camera_position, sample.position,
                                            params.neighbor_radius, noise);
  return info * (1.0 - std::abs(sample.theta) / kPi);
}

void evaluate_gains(const InfoMap& map, const Vec3& camera_position,
                    SampleGrid& grid, const NoiseModel& noise) {
  for (SamplePoint& s : grid.points) {
    s.gain = sample_gain(map, camera_position, s, grid.params, noise);
  }
}

std::vector<SamplePoint> best_samples(const SampleGrid& grid) {
  if (grid.points.empty()) {
    throw EmptyGridError("best_samples: grid has no points");
  }
  const auto better = [](const SamplePoint& a, const SamplePoint& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (std::abs(a.theta) != std::abs(b.theta)) {
      return std::abs(a.theta) < std::abs(b.theta);
    }
    return a.theta < b.theta;
  };
  std::vector<SamplePoint> best;
  best.reserve(grid.params.circle_count());
  for (int i = 0; i < grid.params.circle_count(); ++i) {
    const SamplePoint* top = &grid.at(i, 0);
    for (int j = 1; j < grid.params.samples_per_circle(); ++j) {
      const SamplePoint& cand = grid.at(i, j);
      if (better(cand, *top)) {
        top = &cand;
      }
    }
    best.push_back(*top);
  }
  return best;
}

}  // namespace iglov
