#pragma once

#include <optional>
#include <vector>

#include "iglov/info_model.hpp"
#include "iglov/trajectory.hpp"

namespace iglov {

struct HorizonParams {
  int length = 6;            // predicted steps in the window
  double lambda_info = 1.0;  // information objective weight
  double lambda_smooth = 0.12;
  int max_iters = 50;
  double step_size = 0.1;    // initial gradient step, m per unit gradient
  double tolerance = 1e-4;   // max point displacement convergence threshold
  int fit_degree = 6;

  void validate() const;
};

// Future robot base poses at the planning cadence. With a trajectory the
// poses advance along it from the projection of the current position,
// extending past the end along the final heading; without one the current
// velocity is integrated and yaw is held.
std::vector<Pose> predict_poses(const Pose& current, const Vec3& velocity,
                                const Trajectory* trajectory, double dt,
                                int count);

// View-landing-point window under optimization, one point per predicted
// step, each tied to that step's local gain model.
struct PlanWindow {
  Vec3 anchor = Vec3::Zero();  // previously executed point p_k
  std::vector<Vec3> points;
  std::vector<LocalInfoModel> models;
  bool initialized = false;
};

// Each point starts at its own model's best fitted view.
PlanWindow init_window(const Vec3& anchor,
                       std::vector<LocalInfoModel> models);

// Sum of squared second differences over [anchor, points...]. Needs at
// least two points.
double smoothness_cost(const Vec3& anchor, std::span<const Vec3> points);

// Gradient of smoothness_cost with respect to points[t].
Vec3 smoothness_gradient(const Vec3& anchor, std::span<const Vec3> points,
                         int t);

// Gradient of the per-point information reward 0.5 * F(p)^2 restricted to
// the snapped circle: F * dF/dtheta / r along the circle tangent.
Vec3 info_gradient(const LocalInfoModel& model, const Vec3& p);

struct OptimizeResult {
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // value before and after each accept
};

// Synchronous projected gradient descent of
//   O = -lambda_info * sum_t 0.5 F_t(p_t)^2 + lambda_smooth * J_smooth
// with backtracking on the shared step and a re-snap to the nearest circle
// after every update. The objective never increases across accepted steps.
OptimizeResult rho_optimize(PlanWindow& window, const HorizonParams& params);

struct PlanDiagnostics {
  bool fallback = false;  // no usable information, forward anchor returned
  int iterations = 0;
  bool converged = false;
  double objective_initial = 0.0;
  double objective_final = 0.0;
  int chosen_circle = 0;
  double chosen_theta = 0.0;
  double chosen_value = 0.0;       // modeled gain at the committed point
  double max_residual = 0.0;       // worst per-curve fit residual (inf norm)
};

struct PlanResult {
  Vec3 landing_point = Vec3::Zero();
  GimbalCommand command;
  PlanWindow window;
  PlanDiagnostics diagnostics;
};

struct PlannerSetup {
  SamplerParams sampler;
  HorizonParams horizon;
  NoiseModel noise;
  double camera_height = 0.5;  // camera z offset above the base position
};

// One receding-horizon planning cycle: predict poses, sample and fit the
// local models, optimize the window, and command the gimbal toward the
// first point. When every sampled gain in the window is zero the planner
// falls back to the forward anchor of the innermost circle so the camera
// holds the motion direction.
PlanResult plan_step(const InfoMap& map, const Pose& current,
                     const Vec3& velocity, const Trajectory* trajectory,
                     double dt, const PlannerSetup& setup,
                     const std::optional<Vec3>& previous_point);

}  // namespace iglov
