#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <vector>

#include "iglov/io.hpp"
#include "iglov/sim.hpp"

namespace py = pybind11;

namespace {

using Triple = std::array<double, 3>;

iglov::Vec3 to_vec(const Triple& t) { return {t[0], t[1], t[2]}; }
Triple from_vec(const iglov::Vec3& v) { return {v.x(), v.y(), v.z()}; }

std::vector<iglov::Vec3> to_points(const std::vector<Triple>& raw) {
  std::vector<iglov::Vec3> points;
  points.reserve(raw.size());
  for (const Triple& t : raw) {
    points.push_back(to_vec(t));
  }
  return points;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information-driven gimbal view planning core";

  py::register_exception<iglov::Error>(m, "PlannerError");

  m.def("wrap_angle", &iglov::wrap_angle, py::arg("angle"),
        "Wrap an angle into (-pi, pi].");

  m.def(
      "fisher_trace",
      [](const Triple& camera, const Triple& point, double sigma2) {
        return iglov::fisher_trace(to_vec(camera), to_vec(point),
                                   iglov::NoiseModel::isotropic(sigma2));
      },
      py::arg("camera"), py::arg("point"), py::arg("sigma2") = 1.0,
      "Trace of the bearing Fisher information matrix under isotropic "
      "noise.");

  m.def(
      "fisher_matrix",
      [](const Triple& camera, const Triple& point, double sigma2) {
        const iglov::Mat6 f = iglov::fisher_matrix(
            to_vec(camera), to_vec(point),
            iglov::NoiseModel::isotropic(sigma2));
        std::vector<std::vector<double>> rows(6, std::vector<double>(6));
        for (int i = 0; i < 6; ++i) {
          for (int j = 0; j < 6; ++j) {
            rows[i][j] = f(i, j);
          }
        }
        return rows;
      },
      py::arg("camera"), py::arg("point"), py::arg("sigma2") = 1.0,
      "6x6 bearing Fisher information matrix as nested lists.");

  m.def(
      "gimbal_ik",
      [](const Triple& camera, double base_yaw, const Triple& landing) {
        const iglov::GimbalCommand cmd =
            iglov::gimbal_ik(to_vec(camera), base_yaw, to_vec(landing));
        return py::make_tuple(cmd.yaw, cmd.pitch, cmd.yaw_degenerate);
      },
      py::arg("camera"), py::arg("base_yaw"), py::arg("landing_point"),
      "Gimbal (yaw, pitch, degenerate) command aiming at a world point.");

  py::class_<iglov::InfoMap>(m, "InfoMap")
      .def(py::init<double>(), py::arg("voxel_size") = 0.4)
      .def_property_readonly("voxel_size", &iglov::InfoMap::voxel_size)
      .def("__len__", &iglov::InfoMap::size)
      .def(
          "insert_points",
          [](iglov::InfoMap& map, const std::vector<Triple>& points) {
            const auto converted = to_points(points);
            map.insert_points(converted);
          },
          py::arg("points"), "Insert feature points given as (x, y, z).")
      .def(
          "count",
          [](const iglov::InfoMap& map, const Triple& point) {
            return map.count(map.key_of(to_vec(point)));
          },
          py::arg("point"), "Feature count of the voxel containing a point.")
      .def(
          "distribution_info",
          [](const iglov::InfoMap& map, const Triple& point) {
            return map.distribution_info(map.key_of(to_vec(point)));
          },
          py::arg("point"),
          "Distribution-weighted occupancy term of the containing voxel.")
      .def(
          "neighbor_sum_info",
          [](const iglov::InfoMap& map, const Triple& camera,
             const Triple& point, double radius, double sigma2) {
            return map.neighbor_sum_info(to_vec(camera), to_vec(point),
                                         radius,
                                         iglov::NoiseModel::isotropic(sigma2));
          },
          py::arg("camera"), py::arg("point"), py::arg("radius") = 1.2,
          py::arg("sigma2") = 1.0,
          "Summed weighted information within a ball around a point.")
      .def(
          "dump_layers",
          [](const iglov::InfoMap& map, const Triple& camera, double sigma2) {
            const auto rows = map.dump_layers(
                to_vec(camera), iglov::NoiseModel::isotropic(sigma2));
            py::list out;
            for (const auto& row : rows) {
              py::dict d;
              d["key"] = py::make_tuple(row.key.x, row.key.y, row.key.z);
              d["center"] = from_vec(row.center);
              d["count"] = row.count;
              d["fisher"] = row.fisher;
              d["dist"] = row.dist;
              d["weighted"] = row.weighted;
              out.append(d);
            }
            return out;
          },
          py::arg("camera"), py::arg("sigma2") = 1.0,
          "Per-voxel information layers sorted by key.");

  m.def(
      "sample_gains",
      [](const iglov::InfoMap& map, const Triple& position, double base_yaw,
         double camera_height, double sigma2) {
        iglov::SamplerParams params;
        iglov::SampleGrid grid =
            iglov::generate_samples(to_vec(position), base_yaw, params);
        const iglov::Vec3 camera =
            to_vec(position) + iglov::Vec3(0.0, 0.0, camera_height);
        iglov::evaluate_gains(map, camera, grid,
                              iglov::NoiseModel::isotropic(sigma2));
        py::list out;
        for (const auto& s : grid.points) {
          py::dict d;
          d["circle"] = s.circle;
          d["theta"] = s.theta;
          d["radius"] = s.radius;
          d["position"] = from_vec(s.position);
          d["gain"] = s.gain;
          out.append(d);
        }
        return out;
      },
      py::arg("map"), py::arg("position"), py::arg("base_yaw") = 0.0,
      py::arg("camera_height") = 0.5, py::arg("sigma2") = 1.0,
      "Evaluate the default polar sample grid against a map.");

  m.def(
      "fit_curve",
      [](const std::vector<double>& thetas, const std::vector<double>& gains,
         int degree) {
        const iglov::InfoCurve curve =
            iglov::fit_curve(thetas, gains, degree);
        py::dict d;
        d["coefficients"] = curve.coefficients;
        d["theta_max"] = curve.theta_max;
        d["residual_l2"] = curve.residual_l2;
        d["residual_inf"] = curve.residual_inf;
        return d;
      },
      py::arg("thetas"), py::arg("gains"), py::arg("degree") = 6,
      "Least-squares polynomial gain curve over theta.");

  m.def(
      "curve_argmax",
      [](const std::vector<double>& coefficients, double theta_max,
         double init_theta) {
        iglov::InfoCurve curve;
        curve.coefficients = coefficients;
        curve.theta_max = theta_max;
        const iglov::CurveMax best = iglov::curve_argmax(curve, init_theta);
        return py::make_tuple(best.theta, best.value);
      },
      py::arg("coefficients"), py::arg("theta_max"),
      py::arg("init_theta") = 0.0,
      "Gradient-ascent maximum of a fitted curve.");

  m.def(
      "plan_once",
      [](const iglov::InfoMap& map, const Triple& position, double base_yaw,
         const Triple& velocity, double dt, double camera_height,
         std::optional<Triple> previous_point) {
        iglov::PlannerSetup setup;
        setup.camera_height = camera_height;
        std::optional<iglov::Vec3> prev;
        if (previous_point) {
          prev = to_vec(*previous_point);
        }
        const iglov::PlanResult r = iglov::plan_step(
            map, iglov::Pose::from_yaw(to_vec(position), base_yaw),
            to_vec(velocity), nullptr, dt, setup, prev);
        py::dict d;
        d["landing_point"] = from_vec(r.landing_point);
        d["cmd_yaw"] = r.command.yaw;
        d["cmd_pitch"] = r.command.pitch;
        d["fallback"] = r.diagnostics.fallback;
        d["iterations"] = r.diagnostics.iterations;
        d["objective_initial"] = r.diagnostics.objective_initial;
        d["objective_final"] = r.diagnostics.objective_final;
        d["gain"] = r.diagnostics.chosen_value;
        return d;
      },
      py::arg("map"), py::arg("position"), py::arg("base_yaw") = 0.0,
      py::arg("velocity") = Triple{0.0, 0.5, 0.0}, py::arg("dt") = 0.5,
      py::arg("camera_height") = 0.5,
      py::arg("previous_point") = std::nullopt,
      "One receding-horizon planning cycle with default parameters.");

  m.def(
      "run_scenario_text",
      [](const std::string& json_text) {
        const iglov::Scenario scenario =
            iglov::scenario_from_json_text(json_text);
        const auto records = iglov::run_scenario(scenario);
        return iglov::telemetry_csv(records);
      },
      py::arg("json_text"),
      "Run a scenario given as JSON text and return the telemetry CSV.");
}
