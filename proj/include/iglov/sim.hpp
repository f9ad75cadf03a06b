#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iglov/planner.hpp"

namespace iglov {

enum class PlannerKind { kPas, kUsv, kMst, kRsdt, kIglov };

std::string planner_name(PlannerKind kind);
std::optional<PlannerKind> planner_from_name(const std::string& name);

struct SensorParams {
  double fov_h = 69.0 * kPi / 180.0;  // full horizontal field of view
  double fov_v = 42.0 * kPi / 180.0;
  double max_range = 10.0;
  double camera_height = 0.5;  // camera z offset above the base position
  int min_track_features = 8;
  double dropout = 0.0;  // seeded per-feature detection dropout probability

  void validate() const;
};

// Feature patch on the ground plane, with optional height jitter.
// Rectangle and disk patches scatter points uniformly (the count is
// area * density, rounded); grid patches place points on a fixed lattice
// so the field is identical across seeds.
struct FeaturePatch {
  enum class Shape { kRectangle, kDisk, kGrid };
  Shape shape = Shape::kRectangle;
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
  double cx = 0.0, cy = 0.0, radius = 0.0;
  double density = 1.0;  // features per square meter
  double spacing = 0.0;  // grid lattice pitch
  double z = 0.0;        // base height
  double z_jitter = 0.0;

  double area() const;
};

// Featureless disk cut out of the generated field.
struct FieldHole {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  int steps = 40;
  double dt = 0.5;  // planning period, s
  PlannerKind planner = PlannerKind::kIglov;
  std::vector<FeaturePatch> patches;
  std::vector<FieldHole> holes;
  std::vector<Vec3> extra_features;  // appended verbatim after generation
  std::vector<Vec3> waypoints;
  double speed = 2.0 / 3.6;  // m/s
  double voxel_size = 0.4;
  SamplerParams sampler;
  HorizonParams horizon;
  NoiseModel noise;
  SensorParams sensor;
  GimbalLimits gimbal;
  // Sinusoidal base pitch disturbance over traveled arc length.
  double pitch_amplitude = 0.0;
  double pitch_wavelength = 10.0;

  void validate() const;
};

// Strict parser: unknown fields and out-of-range values raise ScenarioError.
Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario(const std::string& path);

// Deterministic feature field for the scenario seed: patches are filled in
// declaration order with round(area * density) points each, then hole disks
// are cut, then extra features are appended.
std::vector<Vec3> generate_field(const Scenario& scenario);

// Features inside the camera frustum: within range, in front of the camera,
// and inside both half-angle bounds.
std::vector<Vec3> visible_features(const Pose& base, const GimbalState& gimbal,
                                   std::span<const Vec3> field,
                                   const SensorParams& sensor);

struct CrlbResult {
  double trace = std::numeric_limits<double>::infinity();
  bool tracking_ok = false;
};

// Pose-estimation bound from the stacked per-feature information of the
// currently tracked features. tracking_ok requires at least
// min_track_features features and an invertible stack.
CrlbResult localization_crlb(std::span<const Vec3> visible, const Pose& camera,
                             const NoiseModel& noise, int min_track_features);

struct BaselineResult {
  Vec3 landing_point = Vec3::Zero();
  GimbalCommand command;
  double score = 0.0;
  bool fallback = false;
};

// Fixed forward view at the default pitch.
BaselineResult pas_plan(const Pose& base, const SamplerParams& sampler,
                        const SensorParams& sensor);

// Best of ten evenly spaced yaw candidates scored by total weighted
// information inside the candidate frustum. Scans every occupied voxel.
BaselineResult usv_plan(const InfoMap& map, const Pose& base,
                        const SamplerParams& sampler,
                        const SensorParams& sensor, const NoiseModel& noise);

// Best of 500 seeded uniform samples in a 5 m disk, scored by summed
// weighted information near the sample. Scans every occupied voxel per
// sample.
BaselineResult mst_plan(const InfoMap& map, const Pose& base,
                        const SamplerParams& sampler,
                        const SensorParams& sensor, const NoiseModel& noise,
                        std::uint64_t seed);

// Highest raw sampled gain on the polar grid, no polynomial model and no
// horizon.
BaselineResult rsdt_plan(const InfoMap& map, const Pose& base,
                         const SamplerParams& sampler,
                         const SensorParams& sensor, const NoiseModel& noise);

struct StepRecord {
  int step = 0;
  double time = 0.0;
  Vec3 base_position = Vec3::Zero();
  double base_yaw = 0.0;
  PlannerKind planner = PlannerKind::kIglov;
  Vec3 landing_point = Vec3::Zero();
  double cmd_yaw = 0.0;
  double cmd_pitch = 0.0;
  double act_yaw = 0.0;
  double act_pitch = 0.0;
  double rel_yaw = 0.0;  // camera yaw relative to the base forward axis
  int visible = 0;
  double crlb = std::numeric_limits<double>::infinity();
  bool tracking_ok = false;
  double plan_ms = 0.0;
  double gain = 0.0;  // planner's own score of the committed view
  bool fallback = false;
};

struct RunOptions {
  bool measure_time = false;  // keep telemetry reproducible by default
  // When set, receives a gain-curve CSV captured at curves_step (after that
  // step's sensing pass), independent of the scenario's planner.
  std::string* curves_out = nullptr;
  int curves_step = 0;
};

std::vector<StepRecord> run_scenario(const Scenario& scenario,
                                     const RunOptions& options = {});

struct BenchRow {
  std::string scenario;
  std::string planner;
  int steps = 0;
  int tracking_failures = 0;
  double crlb_mean = 0.0;  // over steps with tracking_ok
  double crlb_max = 0.0;
  double yaw_total_variation = 0.0;  // sum of |commanded yaw changes|
  double max_abs_rel_yaw = 0.0;
  double plan_ms_mean = 0.0;
};

BenchRow summarize(const std::string& scenario_name,
                   std::span<const StepRecord> records);

// Runs every requested planner on every scenario. Timing is always
// measured here; the seed override replaces each scenario's seed.
std::vector<BenchRow> bench(std::vector<Scenario> scenarios,
                            std::span<const PlannerKind> planners,
                            std::optional<std::uint64_t> seed_override);

// Deterministic uniform double in [0, 1) from a raw 64-bit draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace iglov
