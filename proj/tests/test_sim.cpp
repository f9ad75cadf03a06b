#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "iglov/io.hpp"
#include "iglov/sim.hpp"

using namespace iglov;

namespace {

Scenario tiny_scenario() {
  Scenario s;
  s.name = "tiny";
  s.seed = 3;
  s.steps = 6;
  s.waypoints = {Vec3(0.0, 0.0, 0.0), Vec3(0.0, 10.0, 0.0)};
  FeaturePatch patch;
  patch.shape = FeaturePatch::Shape::kRectangle;
  patch.xmin = -6.0;
  patch.ymin = -2.0;
  patch.xmax = 6.0;
  patch.ymax = 10.0;
  patch.density = 3.0;
  s.patches.push_back(patch);
  return s;
}

}  // namespace

TEST_CASE("scenario JSON applies defaults and rejects unknown fields") {
  const std::string minimal = R"({
    "name": "demo",
    "waypoints": [[0, 0, 0], [0, 8, 0]],
    "patches": [
      {"shape": "rectangle", "xmin": -4, "ymin": -4, "xmax": 4, "ymax": 4,
       "density": 2.0}
    ]
  })";
  const Scenario s = scenario_from_json_text(minimal);
  CHECK(s.name == "demo");
  CHECK(s.seed == 1);
  CHECK(s.steps == 40);
  CHECK(s.dt == doctest::Approx(0.5));
  CHECK(s.planner == PlannerKind::kIglov);
  CHECK(s.speed == doctest::Approx(2.0 / 3.6));
  CHECK(s.voxel_size == doctest::Approx(0.4));
  CHECK(s.sampler.min_radius == doctest::Approx(2.0));
  CHECK(s.sampler.radius_step == doctest::Approx(0.4));
  CHECK(s.sampler.radial_steps == 10);
  CHECK(s.sampler.angle_step == doctest::Approx(20.0 * kPi / 180.0));
  CHECK(s.sampler.angular_samples == 18);
  CHECK(s.sampler.neighbor_radius == doctest::Approx(1.2));
  CHECK(s.horizon.length == 6);
  CHECK(s.horizon.lambda_info == doctest::Approx(1.0));
  CHECK(s.horizon.lambda_smooth == doctest::Approx(0.12));
  CHECK(s.noise.mode == NoiseModel::Mode::kIsotropic);
  CHECK(s.noise.sigma2 == doctest::Approx(1.0));
  CHECK(s.sensor.fov_h == doctest::Approx(69.0 * kPi / 180.0));
  CHECK(s.sensor.fov_v == doctest::Approx(42.0 * kPi / 180.0));
  CHECK(s.sensor.max_range == doctest::Approx(10.0));
  CHECK(s.sensor.min_track_features == 8);
  CHECK(s.gimbal.max_rate == doctest::Approx(3.5));
  CHECK(s.gimbal.tick == doctest::Approx(0.01));

  CHECK_THROWS_AS(scenario_from_json_text(R"({"bogus": 1})"), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "waypoints": [[0,0,0],[0,8,0]],
    "sampler": {"bogus": 1}
  })"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "waypoints": [[0,0,0],[0,8,0]],
    "planner": "astar"
  })"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "waypoints": [[0,0,0],[0,8,0]],
    "speed_kmh": 25.0
  })"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "waypoints": [[0,0,0],[0,8,0]],
    "dt": -0.5
  })"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "waypoints": [[0,0,0],[0,8,0]],
    "sampler": {"angular_samples": 17}
  })"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text("not json"), ScenarioError);

  const Scenario g = scenario_from_json_text(R"({
    "name": "lattice",
    "waypoints": [[0, 0, 0], [0, 8, 0]],
    "patches": [
      {"shape": "grid", "xmin": -1, "ymin": 0, "xmax": 1, "ymax": 2,
       "spacing": 0.5, "z": 0.2, "z_jitter": 0.05}
    ]
  })");
  REQUIRE(g.patches.size() == 1);
  CHECK(g.patches[0].shape == FeaturePatch::Shape::kGrid);
  CHECK(g.patches[0].spacing == doctest::Approx(0.5));
  CHECK(g.patches[0].z == doctest::Approx(0.2));
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "waypoints": [[0,0,0],[0,8,0]],
    "patches": [{"shape": "grid", "xmin": -1, "ymin": 0, "xmax": 1,
                 "ymax": 2, "spacing": 0.0}]
  })"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "waypoints": [[0,0,0],[0,8,0]],
    "patches": [{"shape": "grid", "xmin": -1, "ymin": 0, "xmax": 1,
                 "ymax": 2, "spacing": 0.5, "density": 1.0}]
  })"),
                  ScenarioError);
}

TEST_CASE("generate_field is seeded and respects patches and holes") {
  Scenario s = tiny_scenario();
  const std::vector<Vec3> a = generate_field(s);
  const std::vector<Vec3> b = generate_field(s);
  REQUIRE(a.size() == b.size());
  // Exactly round(area * density) points.
  CHECK(a.size() == static_cast<std::size_t>(
                        std::llround(12.0 * 12.0 * 3.0)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i] - b[i]).norm() == 0.0);
    CHECK(a[i].x() >= -6.0);
    CHECK(a[i].x() <= 6.0);
    CHECK(a[i].y() >= -2.0);
    CHECK(a[i].y() <= 10.0);
  }
  Scenario other = s;
  other.seed = 4;
  const std::vector<Vec3> c = generate_field(other);
  REQUIRE(c.size() == a.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size() && !differs; ++i) {
    differs = (a[i] - c[i]).norm() > 0.0;
  }
  CHECK(differs);

  FieldHole hole;
  hole.cx = 2.0;
  hole.cy = 2.0;
  hole.radius = 2.5;
  s.holes.push_back(hole);
  s.extra_features.emplace_back(100.0, 100.0, 0.0);
  const std::vector<Vec3> holed = generate_field(s);
  CHECK(holed.size() < a.size());
  for (const Vec3& p : holed) {
    if (p.x() > 90.0) {
      continue;  // the extra feature
    }
    const double d = std::hypot(p.x() - 2.0, p.y() - 2.0);
    CHECK(d > 2.5);
  }
  CHECK((holed.back() - Vec3(100.0, 100.0, 0.0)).norm() == 0.0);

  // Disk patches land inside their radius.
  Scenario disk_scn = tiny_scenario();
  disk_scn.patches.clear();
  FeaturePatch disk;
  disk.shape = FeaturePatch::Shape::kDisk;
  disk.cx = 1.0;
  disk.cy = -2.0;
  disk.radius = 3.0;
  disk.density = 4.0;
  disk_scn.patches.push_back(disk);
  for (const Vec3& p : generate_field(disk_scn)) {
    CHECK(std::hypot(p.x() - 1.0, p.y() + 2.0) <= 3.0 + 1e-9);
  }

  // Grid patches lay a fixed lattice; xy positions ignore the seed.
  Scenario grid_scn = tiny_scenario();
  grid_scn.patches.clear();
  FeaturePatch cell;
  cell.shape = FeaturePatch::Shape::kGrid;
  cell.xmin = -1.0;
  cell.ymin = 0.0;
  cell.xmax = 1.0;
  cell.ymax = 1.5;
  cell.spacing = 0.5;
  cell.z_jitter = 0.1;
  grid_scn.patches.push_back(cell);
  const std::vector<Vec3> g1 = generate_field(grid_scn);
  REQUIRE(g1.size() == 12);  // 4 columns x 3 rows
  CHECK(g1.front().x() == -0.75);
  CHECK(g1.front().y() == 0.25);
  grid_scn.seed = 99;
  const std::vector<Vec3> g2 = generate_field(grid_scn);
  REQUIRE(g2.size() == g1.size());
  for (std::size_t i = 0; i < g1.size(); ++i) {
    CHECK(g1[i].x() == g2[i].x());
    CHECK(g1[i].y() == g2[i].y());
    CHECK(std::abs(g1[i].z()) <= 0.1 + 1e-12);
  }
}

TEST_CASE("visible_features applies range and field-of-view gates") {
  SensorParams sensor;
  const Pose base = Pose::from_yaw(Vec3::Zero(), 0.0);
  GimbalState gimbal;  // level, forward
  std::vector<Vec3> field{
      Vec3(0.0, 2.0, 0.5),    // straight ahead at camera height
      Vec3(0.0, -2.0, 0.5),   // behind
      Vec3(0.0, 11.0, 0.5),   // out of range
      Vec3(3.0, 3.0, 0.5),    // 45 deg off-axis, outside half-FOV of 34.5
      Vec3(1.5, 3.0, 0.5),    // ~26.6 deg off-axis, inside
      Vec3(0.0, 2.0, 2.0),    // high: atan2(1.5, 2) = 36.9 deg > 21 deg
  };
  const std::vector<Vec3> vis = visible_features(base, gimbal, field, sensor);
  REQUIRE(vis.size() == 2);
  CHECK((vis[0] - field[0]).norm() == 0.0);
  CHECK((vis[1] - field[4]).norm() == 0.0);

  // Swinging the gimbal 90 degrees right brings +x targets into view.
  GimbalState right;
  right.yaw = 0.5 * kPi;
  const std::vector<Vec3> vis_right =
      visible_features(base, right, std::vector<Vec3>{Vec3(2.0, 0.0, 0.5)},
                       sensor);
  CHECK(vis_right.size() == 1);

  // Pitch tips the view down onto ground features.
  GimbalState down;
  down.pitch = std::atan2(0.5, 2.0);
  const std::vector<Vec3> vis_down = visible_features(
      base, down, std::vector<Vec3>{Vec3(0.0, 2.0, 0.0)}, sensor);
  CHECK(vis_down.size() == 1);
}

TEST_CASE("localization bound improves with more features") {
  const NoiseModel noise = NoiseModel::isotropic(1.0);
  Pose camera;
  camera.position = Vec3(0.0, 0.0, 0.5);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> dx(-3.0, 3.0);
  std::uniform_real_distribution<double> dy(2.0, 8.0);
  std::vector<Vec3> features;
  for (int i = 0; i < 20; ++i) {
    features.emplace_back(dx(rng), dy(rng), 0.1 * dx(rng));
  }
  const std::vector<Vec3> few(features.begin(), features.begin() + 7);
  CHECK_FALSE(localization_crlb(few, camera, noise, 8).tracking_ok);

  const std::vector<Vec3> some(features.begin(), features.begin() + 10);
  const CrlbResult r10 = localization_crlb(some, camera, noise, 8);
  REQUIRE(r10.tracking_ok);
  // Dense-inverse oracle.
  Mat6 total = Mat6::Zero();
  for (const Vec3& p : some) {
    total += fisher_matrix_oriented(camera, p, noise);
  }
  CHECK(r10.trace ==
        doctest::Approx(total.inverse().trace()).epsilon(1e-9));

  const CrlbResult r20 = localization_crlb(features, camera, noise, 8);
  REQUIRE(r20.tracking_ok);
  CHECK(r20.trace < r10.trace);

  // Collinear features along the boresight leave blind directions.
  std::vector<Vec3> ray;
  for (int i = 0; i < 10; ++i) {
    ray.emplace_back(0.0, 1.0 + 0.5 * i, 0.5);
  }
  CHECK_FALSE(localization_crlb(ray, camera, noise, 8).tracking_ok);
}

TEST_CASE("pas baseline holds the forward view") {
  SamplerParams sampler;
  SensorParams sensor;
  const Pose base = Pose::from_yaw(Vec3(1.0, 2.0, 0.0), 0.3);
  const BaselineResult r = pas_plan(base, sampler, sensor);
  CHECK(r.command.yaw == doctest::Approx(0.0));
  CHECK(r.command.pitch == doctest::Approx(std::atan2(0.5, 2.0)));
  const Vec3 expect =
      base.position + 2.0 * Vec3(std::sin(0.3), std::cos(0.3), 0.0);
  CHECK((r.landing_point - expect).norm() < 1e-12);
}

TEST_CASE("usv baseline turns toward the densest sector") {
  InfoMap map(0.4);
  std::vector<Vec3> pts;
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> jitter(-1.5, 1.5);
  // Cluster roughly 72 degrees right of forward, at one of the scan yaws.
  const double target_yaw = -kPi + 7 * (2.0 * kPi / 10.0);
  const Vec3 center(6.0 * std::sin(target_yaw), 6.0 * std::cos(target_yaw),
                    0.0);
  for (int i = 0; i < 200; ++i) {
    pts.emplace_back(center.x() + jitter(rng), center.y() + jitter(rng), 0.0);
  }
  map.insert_points(pts);
  SamplerParams sampler;
  SensorParams sensor;
  const NoiseModel noise = NoiseModel::isotropic(1.0);
  const Pose base = Pose::from_yaw(Vec3::Zero(), 0.0);
  const BaselineResult r = usv_plan(map, base, sampler, sensor, noise);
  CHECK_FALSE(r.fallback);
  CHECK(r.command.yaw == doctest::Approx(target_yaw).epsilon(1e-9));
  CHECK(r.score > 0.0);

  InfoMap empty(0.4);
  const BaselineResult fb = usv_plan(empty, base, sampler, sensor, noise);
  CHECK(fb.fallback);
  CHECK(fb.command.yaw == doctest::Approx(0.0));
}

TEST_CASE("mst baseline is seed-deterministic") {
  InfoMap map(0.4);
  std::vector<Vec3> pts;
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> spread(-4.0, 4.0);
  for (int i = 0; i < 300; ++i) {
    pts.emplace_back(spread(rng), spread(rng), 0.0);
  }
  map.insert_points(pts);
  SamplerParams sampler;
  SensorParams sensor;
  const NoiseModel noise = NoiseModel::isotropic(1.0);
  const Pose base = Pose::from_yaw(Vec3::Zero(), 0.0);
  const BaselineResult a = mst_plan(map, base, sampler, sensor, noise, 42);
  const BaselineResult b = mst_plan(map, base, sampler, sensor, noise, 42);
  CHECK((a.landing_point - b.landing_point).norm() == 0.0);
  CHECK(a.score == b.score);
  CHECK((a.landing_point - base.position).head<2>().norm() <= 5.0 + 1e-9);

  InfoMap empty(0.4);
  CHECK(mst_plan(empty, base, sampler, sensor, noise, 42).fallback);
}

TEST_CASE("rsdt baseline picks the highest-gain sample") {
  InfoMap map(0.4);
  std::vector<Vec3> pts;
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> jitter(-0.8, 0.8);
  for (int i = 0; i < 150; ++i) {
    pts.emplace_back(3.0 + jitter(rng), 3.0 + jitter(rng), 0.0);
  }
  map.insert_points(pts);
  SamplerParams sampler;
  SensorParams sensor;
  const NoiseModel noise = NoiseModel::isotropic(1.0);
  const Pose base = Pose::from_yaw(Vec3::Zero(), 0.0);
  const BaselineResult r = rsdt_plan(map, base, sampler, sensor, noise);
  CHECK_FALSE(r.fallback);

  SampleGrid grid = generate_samples(base.position, 0.0, sampler);
  evaluate_gains(map, Vec3(0.0, 0.0, 0.5), grid, noise);
  double best_gain = 0.0;
  for (const SamplePoint& s : grid.points) {
    best_gain = std::max(best_gain, s.gain);
  }
  CHECK(r.score == doctest::Approx(best_gain).epsilon(1e-12));
  CHECK(r.landing_point.x() > 0.0);
  CHECK(r.landing_point.y() > 0.0);
}

TEST_CASE("run_scenario emits one record per step for every planner") {
  for (const PlannerKind kind :
       {PlannerKind::kPas, PlannerKind::kUsv, PlannerKind::kMst,
        PlannerKind::kRsdt, PlannerKind::kIglov}) {
    Scenario s = tiny_scenario();
    s.planner = kind;
    const std::vector<StepRecord> records = run_scenario(s);
    REQUIRE(records.size() == 6);
    for (const StepRecord& rec : records) {
      CHECK(rec.planner == kind);
      CHECK(std::isfinite(rec.cmd_yaw));
      CHECK(std::isfinite(rec.cmd_pitch));
      CHECK(rec.act_yaw >= s.gimbal.yaw.lo - 1e-9);
      CHECK(rec.act_yaw <= s.gimbal.yaw.hi + 1e-9);
      CHECK(rec.act_pitch >= s.gimbal.pitch.lo - 1e-9);
      CHECK(rec.act_pitch <= s.gimbal.pitch.hi + 1e-9);
      CHECK(rec.rel_yaw == doctest::Approx(wrap_angle(rec.act_yaw)));
      CHECK(rec.visible >= 0);
      CHECK(rec.plan_ms == 0.0);  // timing disabled by default
    }
    if (kind == PlannerKind::kPas) {
      for (const StepRecord& rec : records) {
        CHECK(rec.cmd_yaw == doctest::Approx(0.0));
      }
    }
  }
}

TEST_CASE("run_scenario telemetry is byte-identical across runs") {
  Scenario s = tiny_scenario();
  s.planner = PlannerKind::kIglov;
  const std::string a = telemetry_csv(run_scenario(s));
  const std::string b = telemetry_csv(run_scenario(s));
  CHECK(a == b);
  Scenario reseeded = s;
  reseeded.seed = 99;
  const std::string c = telemetry_csv(run_scenario(reseeded));
  CHECK(a != c);
}

TEST_CASE("telemetry CSV carries the full header") {
  const std::string csv = telemetry_csv(std::vector<StepRecord>{});
  CHECK(csv ==
        "step,t,x,y,z,yaw_base,planner,px,py,pz,cmd_yaw,cmd_pitch,act_yaw,"
        "act_pitch,rel_yaw,visible,crlb,ok,plan_ms,gain\n");
}

TEST_CASE("layers CSV is sorted and parseable") {
  InfoMap map(0.4);
  std::vector<Vec3> pts{Vec3(0.1, 0.1, 0.1), Vec3(1.1, 0.1, 0.1),
                        Vec3(-1.3, 2.0, 0.0)};
  map.insert_points(pts);
  const std::string csv =
      layers_csv(map.dump_layers(Vec3(0.0, 0.0, 0.5),
                                 NoiseModel::isotropic(1.0)));
  CHECK(csv.rfind("kx,ky,kz,cx,cy,cz,fisher,dist,weighted\n", 0) == 0);
  int lines = 0;
  for (char ch : csv) {
    lines += ch == '\n' ? 1 : 0;
  }
  CHECK(lines == 4);  // header + three voxels
}

TEST_CASE("point cloud CSV parsing") {
  const std::string text =
      "# comment line\n"
      "1.0,2.0,3.0\n"
      "\n"
      "  # indented comment\n"
      "-0.5,0.25,0\n";
  const std::vector<Vec3> pts = parse_point_cloud_csv(text);
  REQUIRE(pts.size() == 2);
  CHECK((pts[0] - Vec3(1.0, 2.0, 3.0)).norm() == 0.0);
  CHECK((pts[1] - Vec3(-0.5, 0.25, 0.0)).norm() == 0.0);
  CHECK_THROWS_AS(parse_point_cloud_csv("1.0,2.0\n"), ScenarioError);
  CHECK_THROWS_AS(parse_point_cloud_csv("a,b,c\n"), ScenarioError);
}

TEST_CASE("summarize aggregates telemetry") {
  std::vector<StepRecord> records(3);
  records[0].cmd_yaw = 0.0;
  records[0].crlb = 2.0;
  records[0].tracking_ok = true;
  records[0].rel_yaw = 0.1;
  records[1].cmd_yaw = 0.5;
  records[1].crlb = 4.0;
  records[1].tracking_ok = true;
  records[1].rel_yaw = -0.4;
  records[2].cmd_yaw = -0.5;
  records[2].tracking_ok = false;
  records[2].rel_yaw = 0.2;
  const BenchRow row = summarize("demo", records);
  CHECK(row.steps == 3);
  CHECK(row.tracking_failures == 1);
  CHECK(row.crlb_mean == doctest::Approx(3.0));
  CHECK(row.crlb_max == doctest::Approx(4.0));
  CHECK(row.yaw_total_variation == doctest::Approx(0.5 + 1.0));
  CHECK(row.max_abs_rel_yaw == doctest::Approx(0.4));
}

TEST_CASE("seeded dropout thins insertions deterministically") {
  Scenario s = tiny_scenario();
  s.sensor.dropout = 0.5;
  const std::string a = telemetry_csv(run_scenario(s));
  const std::string b = telemetry_csv(run_scenario(s));
  CHECK(a == b);
}
