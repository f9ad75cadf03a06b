#include "iglov/sim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "iglov/io.hpp"

namespace iglov {

std::string planner_name(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kPas:
      return "pas";
    case PlannerKind::kUsv:
      return "usv";
    case PlannerKind::kMst:
      return "mst";
    case PlannerKind::kRsdt:
      return "rsdt";
    case PlannerKind::kIglov:
      return "iglov";
  }
  return "unknown";
}

std::optional<PlannerKind> planner_from_name(const std::string& name) {
  if (name == "pas") return PlannerKind::kPas;
  if (name == "usv") return PlannerKind::kUsv;
  if (name == "mst") return PlannerKind::kMst;
  if (name == "rsdt") return PlannerKind::kRsdt;
  if (name == "iglov") return PlannerKind::kIglov;
  return std::nullopt;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t v = seed ^ (salt + 0x9e3779b97f4a7c15ull);
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

std::vector<Vec3> generate_field(const Scenario& scenario) {
  std::mt19937_64 rng(scenario.seed);
  std::vector<Vec3> field;
  for (const FeaturePatch& patch : scenario.patches) {
    if (patch.shape == FeaturePatch::Shape::kGrid) {
      const double half = 0.5 * patch.spacing;
      for (double x = patch.xmin + half; x < patch.xmax;
           x += patch.spacing) {
        for (double y = patch.ymin + half; y < patch.ymax;
             y += patch.spacing) {
          double z = patch.z;
          if (patch.z_jitter > 0.0) {
            z += (2.0 * uniform01(rng) - 1.0) * patch.z_jitter;
          }
          field.emplace_back(x, y, z);
        }
      }
      continue;
    }
    const auto count = static_cast<std::size_t>(
        std::llround(patch.area() * patch.density));
    for (std::size_t i = 0; i < count; ++i) {
      double x = 0.0;
      double y = 0.0;
      if (patch.shape == FeaturePatch::Shape::kRectangle) {
        x = patch.xmin + uniform01(rng) * (patch.xmax - patch.xmin);
        y = patch.ymin + uniform01(rng) * (patch.ymax - patch.ymin);
      } else {
        const double r = patch.radius * std::sqrt(uniform01(rng));
        const double a = 2.0 * kPi * uniform01(rng);
        x = patch.cx + r * std::sin(a);
        y = patch.cy + r * std::cos(a);
      }
      double z = patch.z;
      if (patch.z_jitter > 0.0) {
        z += (2.0 * uniform01(rng) - 1.0) * patch.z_jitter;
      }
      field.emplace_back(x, y, z);
    }
  }
  if (!scenario.holes.empty()) {
    const auto inside_hole = [&](const Vec3& p) {
      for (const FieldHole& hole : scenario.holes) {
        const double dx = p.x() - hole.cx;
        const double dy = p.y() - hole.cy;
        if (dx * dx + dy * dy <= hole.radius * hole.radius) {
          return true;
        }
      }
      return false;
    };
    std::erase_if(field, inside_hole);
  }
  field.insert(field.end(), scenario.extra_features.begin(),
               scenario.extra_features.end());
  return field;
}

std::vector<Vec3> visible_features(const Pose& base, const GimbalState& gimbal,
                                   std::span<const Vec3> field,
                                   const SensorParams& sensor) {
  const Vec3 camera_pos =
      base.position + Vec3(0.0, 0.0, sensor.camera_height);
  const Mat3 cam_rot =
      base.rotation() * camera_rotation(gimbal.yaw, gimbal.pitch);
  const double half_h = 0.5 * sensor.fov_h;
  const double half_v = 0.5 * sensor.fov_v;
  const double range2 = sensor.max_range * sensor.max_range;
  std::vector<Vec3> visible;
  for (const Vec3& p : field) {
    const Vec3 d = p - camera_pos;
    if (d.squaredNorm() > range2) {
      continue;
    }
    const Vec3 q = cam_rot.transpose() * d;
    if (q.y() <= 0.0) {
      continue;
    }
    if (std::abs(std::atan2(q.x(), q.y())) > half_h) {
      continue;
    }
    if (std::abs(std::atan2(q.z(), q.y())) > half_v) {
      continue;
    }
    visible.push_back(p);
  }
  return visible;
}

CrlbResult localization_crlb(std::span<const Vec3> visible, const Pose& camera,
                             const NoiseModel& noise,
                             int min_track_features) {
  CrlbResult result;
  if (static_cast<int>(visible.size()) < min_track_features) {
    return result;
  }
  Mat6 total = Mat6::Zero();
  for (const Vec3& p : visible) {
    total += fisher_matrix_oriented(camera, p, noise);
  }
  Eigen::SelfAdjointEigenSolver<Mat6> es(total);
  if (es.eigenvalues().minCoeff() <= 1e-9) {
    return result;
  }
  result.trace = es.eigenvalues().cwiseInverse().sum();
  result.tracking_ok = true;
  return result;
}

namespace {

double default_pitch(const SamplerParams& sampler,
                     const SensorParams& sensor) {
  return std::atan2(sensor.camera_height, sampler.min_radius);
}

Vec3 forward_landing(const Pose& base, const SamplerParams& sampler) {
  const double yaw = base.yaw();
  return base.position +
         sampler.min_radius * Vec3(std::sin(yaw), std::cos(yaw), 0.0);
}

}  // namespace

BaselineResult pas_plan(const Pose& base, const SamplerParams& sampler,
                        const SensorParams& sensor) {
  BaselineResult result;
  result.landing_point = forward_landing(base, sampler);
  result.command.yaw = 0.0;
  result.command.pitch = default_pitch(sampler, sensor);
  return result;
}

BaselineResult usv_plan(const InfoMap& map, const Pose& base,
                        const SamplerParams& sampler,
                        const SensorParams& sensor, const NoiseModel& noise) {
  const Vec3 camera_pos =
      base.position + Vec3(0.0, 0.0, sensor.camera_height);
  const double base_yaw = base.yaw();
  const double pitch = default_pitch(sampler, sensor);
  const double half_h = 0.5 * sensor.fov_h;
  const double half_v = 0.5 * sensor.fov_v;
  const double range2 = sensor.max_range * sensor.max_range;

  constexpr int kCandidates = 10;
  double best_yaw = 0.0;
  double best_score = 0.0;
  bool any = false;
  for (int i = 0; i < kCandidates; ++i) {
    const double yaw = wrap_angle(-kPi + i * (2.0 * kPi / kCandidates));
    const Mat3 cam_rot = camera_rotation(base_yaw + yaw, pitch);
    double score = 0.0;
    map.for_each_voxel([&](const VoxelKey& key, std::uint32_t) {
      const Vec3 center = map.center_of(key);
      const Vec3 d = center - camera_pos;
      if (d.squaredNorm() > range2) {
        return;
      }
      const Vec3 q = cam_rot.transpose() * d;
      if (q.y() <= 0.0 || std::abs(std::atan2(q.x(), q.y())) > half_h ||
          std::abs(std::atan2(q.z(), q.y())) > half_v) {
        return;
      }
      score += map.weighted_info(camera_pos, key, noise);
    });
    const bool wins =
        !any || score > best_score ||
        (score == best_score && std::abs(yaw) < std::abs(best_yaw)) ||
        (score == best_score && std::abs(yaw) == std::abs(best_yaw) &&
         yaw < best_yaw);
    if (wins) {
      best_yaw = yaw;
      best_score = score;
      any = true;
    }
  }

  BaselineResult result;
  result.score = best_score;
  if (best_score <= 0.0) {
    result.fallback = true;
    result.landing_point = forward_landing(base, sampler);
    result.command.yaw = 0.0;
    result.command.pitch = pitch;
    return result;
  }
  result.command.yaw = best_yaw;
  result.command.pitch = pitch;
  // Boresight intersection with the base plane, for telemetry.
  const Vec3 dir = camera_rotation(base_yaw + best_yaw, pitch) * Vec3::UnitY();
  const double t = sensor.camera_height / std::max(-dir.z(), 1e-6);
  result.landing_point = camera_pos + t * dir;
  return result;
}

BaselineResult mst_plan(const InfoMap& map, const Pose& base,
                        const SamplerParams& sampler,
                        const SensorParams& sensor, const NoiseModel& noise,
                        std::uint64_t seed) {
  const Vec3 camera_pos =
      base.position + Vec3(0.0, 0.0, sensor.camera_height);
  constexpr int kSamples = 500;
  constexpr double kDiskRadius = 5.0;
  std::mt19937_64 rng(seed);
  const double nr2 = sampler.neighbor_radius * sampler.neighbor_radius;

  BaselineResult result;
  bool any = false;
  for (int i = 0; i < kSamples; ++i) {
    const double r = kDiskRadius * std::sqrt(uniform01(rng));
    const double a = 2.0 * kPi * uniform01(rng);
    const Vec3 p = base.position + Vec3(r * std::sin(a), r * std::cos(a), 0.0);
    // Deliberate whole-map scan: this baseline pays for map growth.
    double score = 0.0;
    map.for_each_voxel([&](const VoxelKey& key, std::uint32_t) {
      if ((map.center_of(key) - p).squaredNorm() <= nr2) {
        score += map.weighted_info(camera_pos, key, noise);
      }
    });
    if (!any || score > result.score) {
      result.score = score;
      result.landing_point = p;
      any = true;
    }
  }
  if (result.score <= 0.0) {
    result.fallback = true;
    result.landing_point = forward_landing(base, sampler);
    result.command.yaw = 0.0;
    result.command.pitch = default_pitch(sampler, sensor);
    return result;
  }
  result.command = gimbal_ik(camera_pos, base.yaw(), result.landing_point);
  return result;
}

BaselineResult rsdt_plan(const InfoMap& map, const Pose& base,
                         const SamplerParams& sampler,
                         const SensorParams& sensor, const NoiseModel& noise) {
  const Vec3 camera_pos =
      base.position + Vec3(0.0, 0.0, sensor.camera_height);
  SampleGrid grid = generate_samples(base.position, base.yaw(), sampler);
  evaluate_gains(map, camera_pos, grid, noise);
  const std::vector<SamplePoint> bests = best_samples(grid);

  const SamplePoint* top = nullptr;
  for (const SamplePoint& s : bests) {
    const bool wins =
        top == nullptr || s.gain > top->gain ||
        (s.gain == top->gain && std::abs(s.theta) < std::abs(top->theta));
    if (wins) {
      top = &s;
    }
  }
  BaselineResult result;
  result.score = top->gain;
  if (top->gain <= 0.0) {
    result.fallback = true;
    result.landing_point = forward_landing(base, sampler);
    result.command.yaw = 0.0;
    result.command.pitch = default_pitch(sampler, sensor);
    return result;
  }
  result.landing_point = top->position;
  result.command = gimbal_ik(camera_pos, base.yaw(), result.landing_point);
  return result;
}

std::vector<StepRecord> run_scenario(const Scenario& scenario,
                                     const RunOptions& options) {
  scenario.validate();
  const std::vector<Vec3> field = generate_field(scenario);
  const Trajectory trajectory(scenario.waypoints, scenario.speed);
  InfoMap map(scenario.voxel_size);

  PlannerSetup setup;
  setup.sampler = scenario.sampler;
  setup.horizon = scenario.horizon;
  setup.noise = scenario.noise;
  setup.camera_height = scenario.sensor.camera_height;

  GimbalState gimbal;
  gimbal.yaw = 0.0;
  gimbal.pitch = default_pitch(scenario.sampler, scenario.sensor);
  std::optional<Vec3> previous_point;

  const int sub_ticks = std::max(
      1, static_cast<int>(std::llround(scenario.dt / scenario.gimbal.tick)));

  std::vector<StepRecord> records;
  records.reserve(static_cast<std::size_t>(scenario.steps));
  for (int k = 0; k < scenario.steps; ++k) {
    const double s = std::min(k * scenario.speed * scenario.dt,
                              trajectory.length());
    const double base_pitch =
        scenario.pitch_amplitude *
        std::sin(2.0 * kPi * s / scenario.pitch_wavelength);
    const Pose base = Pose::from_yaw_pitch(trajectory.position(s),
                                           trajectory.heading(s), base_pitch);
    const Vec3 velocity =
        scenario.speed * Vec3(std::sin(trajectory.heading(s)),
                              std::cos(trajectory.heading(s)), 0.0);

    // Sense with the current gimbal attitude, then extend the map.
    std::vector<Vec3> seen =
        visible_features(base, gimbal, field, scenario.sensor);
    if (scenario.sensor.dropout > 0.0 && !seen.empty()) {
      std::mt19937_64 drop_rng(
          mix_seed(scenario.seed, 0xd509 + static_cast<std::uint64_t>(k)));
      std::erase_if(seen, [&](const Vec3&) {
        return uniform01(drop_rng) < scenario.sensor.dropout;
      });
    }
    if (!seen.empty()) {
      map.insert_points(seen);
    }

    if (options.curves_out != nullptr && k == options.curves_step) {
      const Vec3 camera_pos =
          base.position + Vec3(0.0, 0.0, scenario.sensor.camera_height);
      SampleGrid grid = generate_samples(base.position, trajectory.heading(s),
                                         scenario.sampler);
      evaluate_gains(map, camera_pos, grid, scenario.noise);
      const LocalInfoModel model =
          build_local_model(grid, scenario.horizon.fit_degree);
      *options.curves_out = curves_csv(map, camera_pos, model, scenario.noise);
    }

    StepRecord rec;
    rec.step = k;
    rec.time = k * scenario.dt;
    rec.base_position = base.position;
    rec.base_yaw = trajectory.heading(s);
    rec.planner = scenario.planner;

    const auto t0 = std::chrono::steady_clock::now();
    GimbalCommand command;
    switch (scenario.planner) {
      case PlannerKind::kPas: {
        const BaselineResult r =
            pas_plan(base, scenario.sampler, scenario.sensor);
        rec.landing_point = r.landing_point;
        rec.gain = map.neighbor_sum_info(
            base.position + Vec3(0.0, 0.0, scenario.sensor.camera_height),
            r.landing_point, scenario.sampler.neighbor_radius, scenario.noise);
        rec.fallback = r.fallback;
        command = r.command;
        break;
      }
      case PlannerKind::kUsv: {
        const BaselineResult r = usv_plan(map, base, scenario.sampler,
                                          scenario.sensor, scenario.noise);
        rec.landing_point = r.landing_point;
        rec.gain = r.score;
        rec.fallback = r.fallback;
        command = r.command;
        break;
      }
      case PlannerKind::kMst: {
        const BaselineResult r =
            mst_plan(map, base, scenario.sampler, scenario.sensor,
                     scenario.noise,
                     mix_seed(scenario.seed, static_cast<std::uint64_t>(k)));
        rec.landing_point = r.landing_point;
        rec.gain = r.score;
        rec.fallback = r.fallback;
        command = r.command;
        break;
      }
      case PlannerKind::kRsdt: {
        const BaselineResult r = rsdt_plan(map, base, scenario.sampler,
                                           scenario.sensor, scenario.noise);
        rec.landing_point = r.landing_point;
        rec.gain = r.score;
        rec.fallback = r.fallback;
        command = r.command;
        break;
      }
      case PlannerKind::kIglov: {
        const PlanResult r =
            plan_step(map, base, velocity, &trajectory, scenario.dt, setup,
                      previous_point);
        rec.landing_point = r.landing_point;
        rec.gain = r.diagnostics.chosen_value;
        rec.fallback = r.diagnostics.fallback;
        command = r.command;
        previous_point = r.landing_point;
        break;
      }
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (options.measure_time) {
      rec.plan_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
    }

    // The gimbal compensates measured base pitch directly.
    command.pitch = scenario.gimbal.pitch.clamp(command.pitch - base_pitch);
    rec.cmd_yaw = command.yaw;
    rec.cmd_pitch = command.pitch;

    for (int t = 0; t < sub_ticks; ++t) {
      gimbal = gimbal_track_step(gimbal, command, scenario.gimbal);
    }
    rec.act_yaw = gimbal.yaw;
    rec.act_pitch = gimbal.pitch;
    rec.rel_yaw = wrap_angle(gimbal.yaw);

    const std::vector<Vec3> tracked =
        visible_features(base, gimbal, field, scenario.sensor);
    rec.visible = static_cast<int>(tracked.size());
    Pose camera;
    camera.position =
        base.position + Vec3(0.0, 0.0, scenario.sensor.camera_height);
    camera.orientation = Eigen::Quaterniond(
        base.rotation() * camera_rotation(gimbal.yaw, gimbal.pitch));
    const CrlbResult crlb =
        localization_crlb(tracked, camera, scenario.noise,
                          scenario.sensor.min_track_features);
    rec.crlb = crlb.trace;
    rec.tracking_ok = crlb.tracking_ok;
    records.push_back(rec);
  }
  return records;
}

BenchRow summarize(const std::string& scenario_name,
                   std::span<const StepRecord> records) {
  BenchRow row;
  row.scenario = scenario_name;
  row.steps = static_cast<int>(records.size());
  if (records.empty()) {
    return row;
  }
  row.planner = planner_name(records.front().planner);
  double crlb_sum = 0.0;
  int crlb_count = 0;
  double prev_cmd_yaw = 0.0;
  double ms_sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const StepRecord& rec = records[i];
    if (rec.tracking_ok) {
      crlb_sum += rec.crlb;
      crlb_count += 1;
      row.crlb_max = std::max(row.crlb_max, rec.crlb);
    } else {
      row.tracking_failures += 1;
    }
    if (i > 0) {
      row.yaw_total_variation +=
          std::abs(wrap_angle(rec.cmd_yaw - prev_cmd_yaw));
    }
    prev_cmd_yaw = rec.cmd_yaw;
    row.max_abs_rel_yaw = std::max(row.max_abs_rel_yaw,
                                   std::abs(rec.rel_yaw));
    ms_sum += rec.plan_ms;
  }
  row.crlb_mean = crlb_count > 0
                      ? crlb_sum / crlb_count
                      : std::numeric_limits<double>::infinity();
  row.plan_ms_mean = ms_sum / static_cast<double>(records.size());
  return row;
}

std::vector<BenchRow> bench(std::vector<Scenario> scenarios,
                            std::span<const PlannerKind> planners,
                            std::optional<std::uint64_t> seed_override) {
  std::vector<BenchRow> rows;
  RunOptions options;
  options.measure_time = true;
  for (Scenario& scenario : scenarios) {
    if (seed_override) {
      scenario.seed = *seed_override;
    }
    for (const PlannerKind planner : planners) {
      Scenario variant = scenario;
      variant.planner = planner;
      rows.push_back(summarize(scenario.name,
                               run_scenario(variant, options)));
    }
  }
  return rows;
}

}  // namespace iglov
