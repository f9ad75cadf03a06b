#include "iglov/info_model.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace iglov {

InfoCurve fit_curve(std::span<const double> thetas,
                    std::span<const double> gains, int degree) {
  if (degree < 1) {
    throw RankDeficientError("fit_curve: degree must be at least 1");
  }
  const int m = static_cast<int>(thetas.size());
  const int n = degree + 1;
  if (m != static_cast<int>(gains.size())) {
    throw RankDeficientError("fit_curve: theta/gain size mismatch");
  }
  if (m < n) {
    throw RankDeficientError("fit_curve: fewer samples than coefficients");
  }
  double scale = 0.0;
  for (double t : thetas) {
    scale = std::max(scale, std::abs(t));
  }
  if (scale == 0.0) {
    throw RankDeficientError("fit_curve: all sample angles are zero");
  }
  Eigen::MatrixXd design(m, n);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    const double phi = thetas[i] / scale;
    double p = 1.0;
    for (int j = 0; j < n; ++j) {
      design(i, j) = p;
      p *= phi;
    }
    rhs(i) = gains[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < n) {
    throw RankDeficientError("fit_curve: design matrix is rank deficient");
  }
  const Eigen::VectorXd scaled = qr.solve(rhs);

  InfoCurve curve;
  curve.theta_max = scale;
  curve.coefficients.resize(n);
  double s_pow = 1.0;
  for (int j = 0; j < n; ++j) {
    curve.coefficients[j] = scaled(j) / s_pow;
    s_pow *= scale;
  }
  const Eigen::VectorXd res = design * scaled - rhs;
  curve.residual_l2 = res.norm();
  curve.residual_inf = res.cwiseAbs().maxCoeff();
  return curve;
}

namespace {

double clamp_theta(const InfoCurve& curve, double theta, bool* clamped) {
  double t = theta;
  bool hit = false;
  if (t > curve.theta_max) {
    t = curve.theta_max;
    hit = true;
  } else if (t < -curve.theta_max) {
    t = -curve.theta_max;
    hit = true;
  }
  if (clamped != nullptr) {
    *clamped = hit;
  }
  return t;
}

}  // namespace

double curve_eval(const InfoCurve& curve, double theta, bool* clamped) {
  const double t = clamp_theta(curve, theta, clamped);
  double v = 0.0;
  for (auto it = curve.coefficients.rbegin(); it != curve.coefficients.rend();
       ++it) {
    v = v * t + *it;
  }
  return v;
}

double curve_derivative(const InfoCurve& curve, double theta) {
  const double t = clamp_theta(curve, theta, nullptr);
  const int n = curve.degree();
  double v = 0.0;
  for (int s = n; s >= 1; --s) {
    v = v * t + s * curve.coefficients[static_cast<std::size_t>(s)];
  }
  return v;
}

CurveMax curve_argmax(const InfoCurve& curve, double init_theta) {
  double theta = clamp_theta(curve, init_theta, nullptr);
  double value = curve_eval(curve, theta);
  double step = 0.1;
  for (int iter = 0; iter < 100; ++iter) {
    const double grad = curve_derivative(curve, theta);
    if (std::abs(grad) < 1e-8) {
      break;
    }
    const double trial = clamp_theta(curve, theta + step * grad, nullptr);
    const double trial_value = curve_eval(curve, trial);
    if (trial != theta && trial_value > value) {
      theta = trial;
      value = trial_value;
      step *= 1.5;
    } else {
      step *= 0.5;
      if (step < 1e-14) {
        break;
      }
    }
  }
  CurveMax best{theta, value};
  // The polynomial can keep rising into the interval ends; the ascent above
  // stalls there because of the clamp, so check both explicitly.
  for (const double endpoint : {-curve.theta_max, curve.theta_max}) {
    const double v = curve_eval(curve, endpoint);
    if (v > best.value) {
      best.theta = endpoint;
      best.value = v;
    }
  }
  return best;
}

int LocalInfoModel::snap_circle(double radius) const {
  if (curves.empty()) {
    throw EmptyModelError("snap_circle: model has no curves");
  }
  int best = 0;
  double best_diff = std::abs(radius - curves[0].radius);
  for (int i = 1; i < static_cast<int>(curves.size()); ++i) {
    const double diff = std::abs(radius - curves[static_cast<std::size_t>(i)].radius);
    if (diff < best_diff) {
      best_diff = diff;
      best = i;
    }
  }
  return best;
}

double LocalInfoModel::radius_of(const Vec3& p) const {
  return std::hypot(p.x() - center.x(), p.y() - center.y());
}

double LocalInfoModel::theta_of(const Vec3& p) const {
  const double dx = p.x() - center.x();
  const double dy = p.y() - center.y();
  return wrap_angle(std::atan2(dx, dy) - base_yaw);
}

Vec3 LocalInfoModel::point_at(int circle, double theta) const {
  const double r = curves.at(static_cast<std::size_t>(circle)).radius;
  const double a = theta + base_yaw;
  return center + Vec3(r * std::sin(a), r * std::cos(a), 0.0);
}

double LocalInfoModel::eval(const Vec3& p) const {
  const int i = snap_circle(radius_of(p));
  return curve_eval(curves[static_cast<std::size_t>(i)], theta_of(p));
}

double LocalInfoModel::derivative(const Vec3& p) const {
  const int i = snap_circle(radius_of(p));
  return curve_derivative(curves[static_cast<std::size_t>(i)], theta_of(p));
}

LocalInfoModel build_local_model(const SampleGrid& grid, int degree) {
  if (grid.points.empty()) {
    throw EmptyGridError("build_local_model: grid has no points");
  }
  LocalInfoModel model;
  model.center = grid.robot_position;
  model.base_yaw = grid.base_yaw;
  model.params = grid.params;
  const int per_circle = grid.params.samples_per_circle();
  std::vector<double> thetas(static_cast<std::size_t>(per_circle));
  std::vector<double> gains(static_cast<std::size_t>(per_circle));
  for (int i = 0; i < grid.params.circle_count(); ++i) {
    const SamplePoint* best = nullptr;
    for (int j = 0; j < per_circle; ++j) {
      const SamplePoint& s = grid.at(i, j);
      thetas[static_cast<std::size_t>(j)] = s.theta;
      gains[static_cast<std::size_t>(j)] = s.gain;
      if (best == nullptr || s.gain > best->gain ||
          (s.gain == best->gain &&
           std::abs(s.theta) < std::abs(best->theta))) {
        best = &s;
      }
    }
    InfoCurve curve = fit_curve(thetas, gains, degree);
    curve.circle = i;
    curve.radius = grid.params.radius(i);
    curve.init_theta = best->theta;
    model.curves.push_back(std::move(curve));
  }
  return model;
}

BestView global_best(const LocalInfoModel& model) {
  if (model.empty()) {
    throw EmptyModelError("global_best: model has no curves");
  }
  BestView best;
  bool first = true;
  // Curves arrive in ascending radius, so a strict comparison keeps the
  // smaller radius on value ties.
  for (const InfoCurve& curve : model.curves) {
    const CurveMax cm = curve_argmax(curve, curve.init_theta);
    const bool wins = first || cm.value > best.value;
    if (wins) {
      best.circle = curve.circle;
      best.theta = cm.theta;
      best.value = cm.value;
      first = false;
    }
  }
  best.point = model.point_at(best.circle, best.theta);
  return best;
}

}  // namespace iglov
