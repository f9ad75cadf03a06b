#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "iglov/sim.hpp"

namespace iglov {

namespace {

using nlohmann::json;

void require_known_fields(const json& obj, const std::set<std::string>& known,
                          const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (known.find(key) == known.end()) {
      throw ScenarioError("scenario: unknown field '" + key + "' in " + where);
    }
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ScenarioError(std::string("scenario: field '") + key +
                        "' must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ScenarioError(std::string("scenario: field '") + key +
                        "' must be finite");
  }
  return d;
}

int get_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ScenarioError(std::string("scenario: field '") + key +
                        "' must be an integer");
  }
  return v.get<int>();
}

Vec3 parse_vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number()) {
    throw ScenarioError("scenario: " + where +
                        " must be an array of three numbers");
  }
  const Vec3 p(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  if (!p.allFinite()) {
    throw ScenarioError("scenario: " + where + " must be finite");
  }
  return p;
}

FeaturePatch parse_patch(const json& obj) {
  FeaturePatch patch;
  if (!obj.is_object() || !obj.contains("shape")) {
    throw ScenarioError("scenario: each patch needs a 'shape'");
  }
  const std::string shape = obj.at("shape").get<std::string>();
  if (shape == "rectangle") {
    require_known_fields(obj,
                         {"shape", "xmin", "ymin", "xmax", "ymax", "density",
                          "z", "z_jitter"},
                         "rectangle patch");
    patch.shape = FeaturePatch::Shape::kRectangle;
    patch.xmin = get_number(obj, "xmin", 0.0);
    patch.ymin = get_number(obj, "ymin", 0.0);
    patch.xmax = get_number(obj, "xmax", 0.0);
    patch.ymax = get_number(obj, "ymax", 0.0);
    if (!(patch.xmax > patch.xmin) || !(patch.ymax > patch.ymin)) {
      throw ScenarioError("scenario: rectangle patch has empty extent");
    }
  } else if (shape == "grid") {
    require_known_fields(obj,
                         {"shape", "xmin", "ymin", "xmax", "ymax", "spacing",
                          "z", "z_jitter"},
                         "grid patch");
    patch.shape = FeaturePatch::Shape::kGrid;
    patch.xmin = get_number(obj, "xmin", 0.0);
    patch.ymin = get_number(obj, "ymin", 0.0);
    patch.xmax = get_number(obj, "xmax", 0.0);
    patch.ymax = get_number(obj, "ymax", 0.0);
    patch.spacing = get_number(obj, "spacing", 0.0);
    if (!(patch.xmax > patch.xmin) || !(patch.ymax > patch.ymin)) {
      throw ScenarioError("scenario: grid patch has empty extent");
    }
    if (!(patch.spacing > 0.0)) {
      throw ScenarioError("scenario: grid patch needs a positive spacing");
    }
    patch.z = get_number(obj, "z", 0.0);
    patch.z_jitter = get_number(obj, "z_jitter", 0.0);
    if (patch.z_jitter < 0.0) {
      throw ScenarioError("scenario: patch z_jitter must be non-negative");
    }
    return patch;
  } else if (shape == "disk") {
    require_known_fields(
        obj, {"shape", "cx", "cy", "radius", "density", "z", "z_jitter"},
        "disk patch");
    patch.shape = FeaturePatch::Shape::kDisk;
    patch.cx = get_number(obj, "cx", 0.0);
    patch.cy = get_number(obj, "cy", 0.0);
    patch.radius = get_number(obj, "radius", 0.0);
    if (!(patch.radius > 0.0)) {
      throw ScenarioError("scenario: disk patch needs a positive radius");
    }
  } else {
    throw ScenarioError("scenario: patch shape must be rectangle, disk, or grid");
  }
  patch.density = get_number(obj, "density", 1.0);
  if (!(patch.density > 0.0)) {
    throw ScenarioError("scenario: patch density must be positive");
  }
  patch.z = get_number(obj, "z", 0.0);
  patch.z_jitter = get_number(obj, "z_jitter", 0.0);
  if (patch.z_jitter < 0.0) {
    throw ScenarioError("scenario: patch z_jitter must be non-negative");
  }
  return patch;
}

FieldHole parse_hole(const json& obj) {
  require_known_fields(obj, {"cx", "cy", "radius"}, "hole");
  FieldHole hole;
  hole.cx = get_number(obj, "cx", 0.0);
  hole.cy = get_number(obj, "cy", 0.0);
  hole.radius = get_number(obj, "radius", 0.0);
  if (!(hole.radius > 0.0)) {
    throw ScenarioError("scenario: hole needs a positive radius");
  }
  return hole;
}

void parse_sampler(const json& obj, SamplerParams& p) {
  require_known_fields(obj,
                       {"min_radius", "radius_step", "radial_steps",
                        "angle_step", "angular_samples", "neighbor_radius"},
                       "sampler");
  p.min_radius = get_number(obj, "min_radius", p.min_radius);
  p.radius_step = get_number(obj, "radius_step", p.radius_step);
  p.radial_steps = get_int(obj, "radial_steps", p.radial_steps);
  p.angle_step = get_number(obj, "angle_step", p.angle_step);
  p.angular_samples = get_int(obj, "angular_samples", p.angular_samples);
  p.neighbor_radius = get_number(obj, "neighbor_radius", p.neighbor_radius);
}

void parse_horizon(const json& obj, HorizonParams& p) {
  require_known_fields(obj,
                       {"length", "lambda_info", "lambda_smooth", "max_iters",
                        "step_size", "tolerance", "fit_degree"},
                       "horizon");
  p.length = get_int(obj, "length", p.length);
  p.lambda_info = get_number(obj, "lambda_info", p.lambda_info);
  p.lambda_smooth = get_number(obj, "lambda_smooth", p.lambda_smooth);
  p.max_iters = get_int(obj, "max_iters", p.max_iters);
  p.step_size = get_number(obj, "step_size", p.step_size);
  p.tolerance = get_number(obj, "tolerance", p.tolerance);
  p.fit_degree = get_int(obj, "fit_degree", p.fit_degree);
}

void parse_noise(const json& obj, NoiseModel& noise) {
  require_known_fields(obj, {"mode", "sigma2", "pixel_var", "depth_coeff"},
                       "noise");
  const std::string mode =
      obj.contains("mode") ? obj.at("mode").get<std::string>() : "isotropic";
  if (mode == "isotropic") {
    noise = NoiseModel::isotropic(get_number(obj, "sigma2", 1.0));
  } else if (mode == "depth_dependent") {
    noise = NoiseModel::depth_dependent(get_number(obj, "pixel_var", 0.25),
                                        get_number(obj, "depth_coeff",
                                                   1.425e-3));
  } else {
    throw ScenarioError("scenario: noise mode must be isotropic or "
                        "depth_dependent");
  }
}

void parse_sensor(const json& obj, SensorParams& s) {
  require_known_fields(obj,
                       {"fov_h", "fov_v", "max_range", "camera_height",
                        "min_track_features", "dropout"},
                       "sensor");
  s.fov_h = get_number(obj, "fov_h", s.fov_h);
  s.fov_v = get_number(obj, "fov_v", s.fov_v);
  s.max_range = get_number(obj, "max_range", s.max_range);
  s.camera_height = get_number(obj, "camera_height", s.camera_height);
  s.min_track_features = get_int(obj, "min_track_features",
                                 s.min_track_features);
  s.dropout = get_number(obj, "dropout", s.dropout);
}

void parse_gimbal(const json& obj, GimbalLimits& g) {
  require_known_fields(obj,
                       {"yaw_min", "yaw_max", "pitch_min", "pitch_max",
                        "max_rate", "tick"},
                       "gimbal");
  g.yaw.lo = get_number(obj, "yaw_min", g.yaw.lo);
  g.yaw.hi = get_number(obj, "yaw_max", g.yaw.hi);
  g.pitch.lo = get_number(obj, "pitch_min", g.pitch.lo);
  g.pitch.hi = get_number(obj, "pitch_max", g.pitch.hi);
  g.max_rate = get_number(obj, "max_rate", g.max_rate);
  g.tick = get_number(obj, "tick", g.tick);
  if (g.yaw.lo > g.yaw.hi || g.pitch.lo > g.pitch.hi) {
    throw ScenarioError("scenario: gimbal limits are inverted");
  }
  if (!(g.max_rate > 0.0) || !(g.tick > 0.0)) {
    throw ScenarioError("scenario: gimbal rate and tick must be positive");
  }
}

}  // namespace

void SensorParams::validate() const {
  if (!(fov_h > 0.0) || fov_h >= kPi || !(fov_v > 0.0) || fov_v >= kPi) {
    throw ScenarioError("sensor: field of view must be in (0, pi)");
  }
  if (!(max_range > 0.0)) {
    throw ScenarioError("sensor: max_range must be positive");
  }
  if (camera_height < 0.0) {
    throw ScenarioError("sensor: camera_height must be non-negative");
  }
  if (min_track_features < 1) {
    throw ScenarioError("sensor: min_track_features must be at least 1");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ScenarioError("sensor: dropout must be in [0, 1)");
  }
}

double FeaturePatch::area() const {
  if (shape == Shape::kDisk) {
    return kPi * radius * radius;
  }
  return (xmax - xmin) * (ymax - ymin);
}

void Scenario::validate() const {
  if (steps < 1) {
    throw ScenarioError("scenario: steps must be at least 1");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ScenarioError("scenario: dt must be positive");
  }
  if (!(speed > 0.0) || speed > 20.0 / 3.6) {
    throw ScenarioError("scenario: speed must be in (0, 20/3.6] m/s");
  }
  if (!(voxel_size > 0.0)) {
    throw ScenarioError("scenario: voxel_size must be positive");
  }
  if (waypoints.size() < 2) {
    throw ScenarioError("scenario: need at least two waypoints");
  }
  if (pitch_amplitude < 0.0 || !(pitch_wavelength > 0.0)) {
    throw ScenarioError("scenario: bad pitch disturbance parameters");
  }
  sampler.validate();
  horizon.validate();
  noise.validate();
  sensor.validate();
}

Scenario scenario_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario: JSON parse error: ") +
                        e.what());
  }
  if (!root.is_object()) {
    throw ScenarioError("scenario: top level must be an object");
  }
  require_known_fields(
      root,
      {"name", "seed", "steps", "dt", "planner", "patches", "holes",
       "features", "waypoints", "speed_kmh", "voxel_size", "sampler",
       "horizon", "noise", "sensor", "gimbal", "pitch_amplitude",
       "pitch_wavelength"},
      "scenario");

  Scenario s;
  if (root.contains("name")) {
    s.name = root.at("name").get<std::string>();
  }
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      throw ScenarioError("scenario: seed must be an integer");
    }
    s.seed = v.get<std::uint64_t>();
  }
  s.steps = get_int(root, "steps", s.steps);
  s.dt = get_number(root, "dt", s.dt);
  if (root.contains("planner")) {
    const auto kind = planner_from_name(root.at("planner").get<std::string>());
    if (!kind) {
      throw ScenarioError("scenario: unknown planner '" +
                          root.at("planner").get<std::string>() + "'");
    }
    s.planner = *kind;
  }
  if (root.contains("patches")) {
    for (const json& p : root.at("patches")) {
      s.patches.push_back(parse_patch(p));
    }
  }
  if (root.contains("holes")) {
    for (const json& h : root.at("holes")) {
      s.holes.push_back(parse_hole(h));
    }
  }
  if (root.contains("features")) {
    std::size_t i = 0;
    for (const json& f : root.at("features")) {
      s.extra_features.push_back(
          parse_vec3(f, "features[" + std::to_string(i++) + "]"));
    }
  }
  if (root.contains("waypoints")) {
    std::size_t i = 0;
    for (const json& w : root.at("waypoints")) {
      s.waypoints.push_back(
          parse_vec3(w, "waypoints[" + std::to_string(i++) + "]"));
    }
  }
  s.speed = get_number(root, "speed_kmh", s.speed * 3.6) / 3.6;
  s.voxel_size = get_number(root, "voxel_size", s.voxel_size);
  if (root.contains("sampler")) {
    parse_sampler(root.at("sampler"), s.sampler);
  }
  if (root.contains("horizon")) {
    parse_horizon(root.at("horizon"), s.horizon);
  }
  if (root.contains("noise")) {
    parse_noise(root.at("noise"), s.noise);
  }
  if (root.contains("sensor")) {
    parse_sensor(root.at("sensor"), s.sensor);
  }
  if (root.contains("gimbal")) {
    parse_gimbal(root.at("gimbal"), s.gimbal);
  }
  s.pitch_amplitude = get_number(root, "pitch_amplitude", 0.0);
  s.pitch_wavelength = get_number(root, "pitch_wavelength", 10.0);
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("scenario: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

}  // namespace iglov
