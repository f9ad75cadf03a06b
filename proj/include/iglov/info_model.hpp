#pragma once

#include <span>
#include <vector>

#include "iglov/sampling.hpp"

namespace iglov {

// Polynomial gain model of one sampling circle, in powers of the
// base-relative angle theta. Valid on [-theta_max, theta_max].
struct InfoCurve {
  std::vector<double> coefficients;  // a_0 ... a_n
  double theta_max = 0.0;
  double residual_l2 = 0.0;   // least-squares residual norm at the samples
  double residual_inf = 0.0;  // max absolute residual at the samples
  int circle = 0;
  double radius = 0.0;
  double init_theta = 0.0;    // best sampled angle, ascent starting point

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};

// Least-squares polynomial fit of gain samples over theta. The design
// matrix is built on theta / max|theta| for conditioning and coefficients
// are mapped back to plain powers of theta. Throws RankDeficientError when
// the (scaled) design matrix does not reach full column rank.
InfoCurve fit_curve(std::span<const double> thetas,
                    std::span<const double> gains, int degree = 6);

// Polynomial value at theta, clamped to the fitted interval. The optional
// flag reports whether clamping occurred.
double curve_eval(const InfoCurve& curve, double theta,
                  bool* clamped = nullptr);

// Analytic derivative d(gain)/d(theta), evaluated with the same clamping.
double curve_derivative(const InfoCurve& curve, double theta);

struct CurveMax {
  double theta = 0.0;
  double value = 0.0;
};

// Gradient ascent on the fitted curve from the given start angle with an
// adaptive step, followed by an endpoint check. The result never falls
// below the value at the start angle.
CurveMax curve_argmax(const InfoCurve& curve, double init_theta);

// Per-circle gain curves around one predicted robot pose.
struct LocalInfoModel {
  Vec3 center = Vec3::Zero();  // robot position used for sampling
  double base_yaw = 0.0;
  SamplerParams params;
  std::vector<InfoCurve> curves;  // ascending radius

  bool empty() const { return curves.empty(); }
  // Index of the circle whose radius is closest to the horizontal distance
  // of p from the center; ties pick the smaller index.
  int snap_circle(double radius) const;
  double radius_of(const Vec3& p) const;
  // Base-relative angle of p around the center, wrapped to (-pi, pi].
  double theta_of(const Vec3& p) const;
  // World point on the given circle at the given angle.
  Vec3 point_at(int circle, double theta) const;
  // Modeled gain at a world point after snapping to the nearest circle.
  double eval(const Vec3& p) const;
  double derivative(const Vec3& p) const;
};

// Fits one curve per circle of an evaluated sample grid.
LocalInfoModel build_local_model(const SampleGrid& grid, int degree = 6);

struct BestView {
  Vec3 point = Vec3::Zero();
  int circle = 0;
  double theta = 0.0;
  double value = 0.0;
};

// Highest curve maximum across circles; ties prefer the smaller radius and
// then the smaller |theta|. Throws EmptyModelError on an empty model.
BestView global_best(const LocalInfoModel& model);

}  // namespace iglov
