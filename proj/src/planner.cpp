#include "iglov/planner.hpp"

#include <algorithm>
#include <cmath>

namespace iglov {

void HorizonParams::validate() const {
  if (length < 1) {
    throw ScenarioError("horizon: length must be at least 1");
  }
  if (lambda_info < 0.0 || lambda_smooth < 0.0) {
    throw ScenarioError("horizon: weights must be non-negative");
  }
  if (max_iters < 1 || !(step_size > 0.0) || !(tolerance > 0.0)) {
    throw ScenarioError("horizon: bad optimizer parameters");
  }
  if (fit_degree < 1) {
    throw ScenarioError("horizon: fit degree must be at least 1");
  }
}

std::vector<Pose> predict_poses(const Pose& current, const Vec3& velocity,
                                const Trajectory* trajectory, double dt,
                                int count) {
  if (count < 1) {
    throw ScenarioError("predict_poses: count must be at least 1");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ScenarioError("predict_poses: dt must be positive");
  }
  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(count));
  if (trajectory == nullptr) {
    for (int j = 1; j <= count; ++j) {
      poses.push_back(Pose::from_yaw(current.position + j * dt * velocity,
                                     current.yaw()));
    }
    return poses;
  }
  const double s0 = trajectory->project(current.position);
  const double step = trajectory->speed() * dt;
  const double len = trajectory->length();
  const double end_heading = trajectory->heading(len);
  const Vec3 end_dir(std::sin(end_heading), std::cos(end_heading), 0.0);
  for (int j = 1; j <= count; ++j) {
    const double s = s0 + j * step;
    if (s <= len) {
      poses.push_back(trajectory->pose(s));
    } else {
      // Past the end the pose keeps moving along the final heading so the
      // window stays well defined.
      poses.push_back(Pose::from_yaw(
          trajectory->position(len) + (s - len) * end_dir, end_heading));
    }
  }
  return poses;
}

PlanWindow init_window(const Vec3& anchor,
                       std::vector<LocalInfoModel> models) {
  if (models.empty()) {
    throw EmptyModelError("init_window: no models");
  }
  PlanWindow window;
  window.anchor = anchor;
  window.models = std::move(models);
  window.points.reserve(window.models.size());
  for (const LocalInfoModel& model : window.models) {
    window.points.push_back(global_best(model).point);
  }
  window.initialized = true;
  return window;
}

double smoothness_cost(const Vec3& anchor, std::span<const Vec3> points) {
  if (points.size() < 2) {
    throw WindowTooShortError("smoothness_cost: need at least two points");
  }
  double cost = 0.0;
  Vec3 prev = points[0] - anchor;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec3 cur = points[i] - points[i - 1];
    cost += (cur - prev).squaredNorm();
    prev = cur;
  }
  return cost;
}

namespace {

// Second difference D_s around sequence position s of [anchor, points...].
Vec3 second_diff(const Vec3& anchor, std::span<const Vec3> points,
                 std::size_t s) {
  const auto at = [&](std::size_t idx) -> const Vec3& {
    return idx == 0 ? anchor : points[idx - 1];
  };
  return at(s + 1) - 2.0 * at(s) + at(s - 1);
}

}  // namespace

Vec3 smoothness_gradient(const Vec3& anchor, std::span<const Vec3> points,
                         int t) {
  if (points.size() < 2) {
    throw WindowTooShortError("smoothness_gradient: need at least two points");
  }
  if (t < 0 || t >= static_cast<int>(points.size())) {
    throw IndexOutOfWindowError("smoothness_gradient: index outside window");
  }
  const std::size_t n = points.size();
  const std::size_t j = static_cast<std::size_t>(t) + 1;  // sequence index
  Vec3 grad = Vec3::Zero();
  // cost = sum_{s=1}^{n-1} |D_s|^2; point j contributes to D_{j-1}, D_j,
  // D_{j+1} with weights +1, -2, +1.
  if (j - 1 >= 1) {
    grad += 2.0 * second_diff(anchor, points, j - 1);
  }
  if (j <= n - 1) {
    grad -= 4.0 * second_diff(anchor, points, j);
  }
  if (j + 1 <= n - 1) {
    grad += 2.0 * second_diff(anchor, points, j + 1);
  }
  return grad;
}

Vec3 info_gradient(const LocalInfoModel& model, const Vec3& p) {
  if (model.empty()) {
    throw EmptyModelError("info_gradient: model has no curves");
  }
  const int i = model.snap_circle(model.radius_of(p));
  const InfoCurve& curve = model.curves[static_cast<std::size_t>(i)];
  const double theta = model.theta_of(p);
  const double value = curve_eval(curve, theta);
  const double slope = curve_derivative(curve, theta);
  const double a = theta + model.base_yaw;
  const Vec3 tangent(std::cos(a), -std::sin(a), 0.0);
  return (value * slope / curve.radius) * tangent;
}

namespace {

// Projects a free-space point back onto the nearest sampling circle of its
// model, keeping the planar constraint.
Vec3 snap_point(const LocalInfoModel& model, const Vec3& p) {
  const double dx = p.x() - model.center.x();
  const double dy = p.y() - model.center.y();
  const double rho = std::hypot(dx, dy);
  if (rho < 1e-12) {
    return model.point_at(0, 0.0);
  }
  const int i = model.snap_circle(rho);
  const double r = model.curves[static_cast<std::size_t>(i)].radius;
  return model.center + Vec3(r * dx / rho, r * dy / rho, 0.0);
}

double window_objective(const PlanWindow& window, const HorizonParams& params,
                        std::span<const Vec3> points) {
  double info = 0.0;
  for (std::size_t t = 0; t < points.size(); ++t) {
    const double f = window.models[t].eval(points[t]);
    info += 0.5 * f * f;
  }
  // A single-point window has no second difference, so no smoothness term.
  const double smooth =
      points.size() >= 2 ? smoothness_cost(window.anchor, points) : 0.0;
  return -params.lambda_info * info + params.lambda_smooth * smooth;
}

}  // namespace

OptimizeResult rho_optimize(PlanWindow& window, const HorizonParams& params) {
  params.validate();
  if (!window.initialized) {
    throw NotInitializedError("rho_optimize: window not initialized");
  }
  if (window.points.size() != window.models.size() || window.points.empty()) {
    throw NotInitializedError("rho_optimize: window size mismatch");
  }
  const std::size_t n = window.points.size();
  OptimizeResult result;
  double objective = window_objective(window, params, window.points);
  result.objective_trace.push_back(objective);

  double step = params.step_size;
  std::vector<Vec3> grads(n);
  std::vector<Vec3> trial(n);
  for (int iter = 0; iter < params.max_iters; ++iter) {
    for (std::size_t t = 0; t < n; ++t) {
      Vec3 g = -params.lambda_info * info_gradient(window.models[t],
                                                   window.points[t]);
      if (params.lambda_smooth > 0.0 && n >= 2) {
        g += params.lambda_smooth *
             smoothness_gradient(window.anchor, window.points,
                                 static_cast<int>(t));
      }
      grads[t] = g;
    }

    bool accepted = false;
    double trial_objective = objective;
    while (step > 1e-14) {
      for (std::size_t t = 0; t < n; ++t) {
        trial[t] = snap_point(window.models[t],
                              window.points[t] - step * grads[t]);
      }
      trial_objective = window_objective(window, params, trial);
      if (trial_objective < objective) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    double displacement = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      displacement = std::max(displacement,
                              (trial[t] - window.points[t]).norm());
      window.points[t] = trial[t];
    }
    objective = trial_objective;
    result.objective_trace.push_back(objective);
    result.iterations = iter + 1;
    step *= 1.5;
    if (displacement < params.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

PlanResult plan_step(const InfoMap& map, const Pose& current,
                     const Vec3& velocity, const Trajectory* trajectory,
                     double dt, const PlannerSetup& setup,
                     const std::optional<Vec3>& previous_point) {
  setup.sampler.validate();
  setup.horizon.validate();
  const Vec3 camera_now =
      current.position + Vec3(0.0, 0.0, setup.camera_height);
  const double base_yaw = current.yaw();

  const std::vector<Pose> poses = predict_poses(current, velocity, trajectory,
                                                dt, setup.horizon.length);
  bool any_gain = false;
  std::vector<LocalInfoModel> models;
  models.reserve(poses.size());
  for (const Pose& pose : poses) {
    SampleGrid grid = generate_samples(pose.position, pose.yaw(),
                                       setup.sampler);
    const Vec3 camera = pose.position + Vec3(0.0, 0.0, setup.camera_height);
    evaluate_gains(map, camera, grid, setup.noise);
    for (const SamplePoint& s : grid.points) {
      if (s.gain > 0.0) {
        any_gain = true;
        break;
      }
    }
    models.push_back(build_local_model(grid, setup.horizon.fit_degree));
  }

  PlanResult result;
  const Vec3 forward_anchor =
      current.position + setup.sampler.min_radius *
                             Vec3(std::sin(base_yaw), std::cos(base_yaw), 0.0);
  if (!any_gain) {
    result.landing_point = forward_anchor;
    result.command = gimbal_ik(camera_now, base_yaw, result.landing_point);
    result.diagnostics.fallback = true;
    return result;
  }

  const Vec3 anchor = previous_point.value_or(forward_anchor);
  result.window = init_window(anchor, std::move(models));
  const OptimizeResult opt = rho_optimize(result.window, setup.horizon);

  result.landing_point = result.window.points.front();
  result.command = gimbal_ik(camera_now, base_yaw, result.landing_point);
  result.diagnostics.iterations = opt.iterations;
  result.diagnostics.converged = opt.converged;
  result.diagnostics.objective_initial = opt.objective_trace.front();
  result.diagnostics.objective_final = opt.objective_trace.back();
  const LocalInfoModel& first = result.window.models.front();
  result.diagnostics.chosen_circle =
      first.snap_circle(first.radius_of(result.landing_point));
  result.diagnostics.chosen_theta = first.theta_of(result.landing_point);
  result.diagnostics.chosen_value = first.eval(result.landing_point);
  for (const LocalInfoModel& model : result.window.models) {
    for (const InfoCurve& curve : model.curves) {
      result.diagnostics.max_residual =
          std::max(result.diagnostics.max_residual, curve.residual_inf);
    }
  }
  return result;
}

}  // namespace iglov
