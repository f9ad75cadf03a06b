#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iglov/io.hpp"
#include "iglov/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioError = 2;
constexpr int kExitPlannerAbort = 3;

iglov::Vec3 parse_camera(const std::string& text) {
  std::istringstream in(text);
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  char c1 = 0;
  char c2 = 0;
  if (!(in >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',') {
    throw iglov::ScenarioError("--camera expects x,y,z");
  }
  return {x, y, z};
}

int run_map(const std::string& cloud_path, const std::string& camera_text,
            const std::string& out_path, double voxel_size, double sigma2) {
  const std::vector<iglov::Vec3> points =
      iglov::read_point_cloud_csv(cloud_path);
  const iglov::Vec3 camera = parse_camera(camera_text);
  iglov::InfoMap map(voxel_size);
  map.insert_points(points);
  const auto rows =
      map.dump_layers(camera, iglov::NoiseModel::isotropic(sigma2));
  iglov::write_text_file(out_path, iglov::layers_csv(rows));
  std::cout << "wrote " << rows.size() << " voxel rows to " << out_path
            << "\n";
  return kExitOk;
}

int run_plan(const std::string& scenario_path, const std::string& out_path,
             const std::string& curves_path,
             std::optional<std::uint64_t> seed, bool timing) {
  iglov::Scenario scenario = iglov::load_scenario(scenario_path);
  if (seed) {
    scenario.seed = *seed;
  }
  iglov::RunOptions options;
  options.measure_time = timing;
  std::string curves;
  if (!curves_path.empty()) {
    options.curves_out = &curves;
  }
  const std::vector<iglov::StepRecord> records =
      iglov::run_scenario(scenario, options);
  iglov::write_text_file(out_path, iglov::telemetry_csv(records));
  if (!curves_path.empty()) {
    iglov::write_text_file(curves_path, curves);
  }
  int failures = 0;
  for (const auto& rec : records) {
    failures += rec.tracking_ok ? 0 : 1;
  }
  std::cout << "scenario " << scenario.name << ": " << records.size()
            << " steps, planner " << iglov::planner_name(scenario.planner)
            << ", " << failures << " tracking failures, telemetry in "
            << out_path << "\n";
  return kExitOk;
}

int run_bench(const std::string& dir, const std::string& planners_text,
              const std::string& out_path,
              std::optional<std::uint64_t> seed) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw iglov::ScenarioError("bench: no scenario files in '" + dir + "'");
  }
  std::vector<iglov::Scenario> scenarios;
  for (const auto& file : files) {
    scenarios.push_back(iglov::load_scenario(file.string()));
  }
  std::vector<iglov::PlannerKind> planners;
  std::istringstream in(planners_text);
  std::string token;
  while (std::getline(in, token, ',')) {
    const auto kind = iglov::planner_from_name(token);
    if (!kind) {
      throw iglov::ScenarioError("bench: unknown planner '" + token + "'");
    }
    planners.push_back(*kind);
  }
  if (planners.empty()) {
    throw iglov::ScenarioError("bench: no planners requested");
  }
  const std::vector<iglov::BenchRow> rows =
      iglov::bench(std::move(scenarios), planners, seed);
  iglov::write_text_file(out_path, iglov::report_csv(rows));
  std::printf("%-16s %-6s %6s %9s %12s %10s %10s\n", "scenario", "planner",
              "steps", "failures", "crlb_mean", "yaw_tv", "plan_ms");
  for (const auto& row : rows) {
    std::printf("%-16s %-6s %6d %9d %12.4f %10.3f %10.3f\n",
                row.scenario.c_str(), row.planner.c_str(), row.steps,
                row.tracking_failures, row.crlb_mean,
                row.yaw_total_variation, row.plan_ms_mean);
  }
  std::cout << "report written to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-driven gimbal view planning toolkit"};
  app.require_subcommand(1);

  std::string cloud_path;
  std::string camera_text = "0,0,0";
  std::string map_out = "layers.csv";
  double voxel_size = 0.4;
  double sigma2 = 1.0;
  CLI::App* map_cmd =
      app.add_subcommand("map", "Voxelize a point cloud and dump "
                                "information layers");
  map_cmd->add_option("--cloud", cloud_path, "Point cloud CSV (x,y,z rows)")
      ->required();
  map_cmd->add_option("--camera", camera_text, "Camera position x,y,z")
      ->required();
  map_cmd->add_option("--out", map_out, "Output layers CSV")->required();
  map_cmd->add_option("--voxel-size", voxel_size, "Voxel edge length, m");
  map_cmd->add_option("--sigma2", sigma2, "Isotropic noise variance");

  std::string scenario_path;
  std::string plan_out = "telemetry.csv";
  std::string curves_path;
  bool timing = false;
  std::optional<std::uint64_t> seed;
  CLI::App* plan_cmd =
      app.add_subcommand("plan", "Run one scenario and write telemetry");
  plan_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")
      ->required();
  plan_cmd->add_option("--out", plan_out, "Output telemetry CSV")->required();
  plan_cmd->add_option("--curves", curves_path,
                       "Also dump first-step gain curves to this CSV");
  plan_cmd->add_option("--seed", seed, "Override the scenario seed");
  plan_cmd->add_flag("--timing", timing,
                     "Record wall-clock planning times (breaks byte-exact "
                     "reproducibility of the telemetry)");

  std::string scenario_dir;
  std::string planners_text = "pas,usv,mst,rsdt,iglov";
  std::string bench_out = "report.csv";
  std::optional<std::uint64_t> bench_seed;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Run every planner on every scenario in a "
                                  "directory");
  bench_cmd->add_option("--scenario-dir", scenario_dir,
                        "Directory of scenario JSON files")
      ->required();
  bench_cmd->add_option("--planners", planners_text,
                        "Comma-separated planner list");
  bench_cmd->add_option("--out", bench_out, "Output report CSV")->required();
  bench_cmd->add_option("--seed", bench_seed, "Override every scenario seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (map_cmd->parsed()) {
      return run_map(cloud_path, camera_text, map_out, voxel_size, sigma2);
    }
    if (plan_cmd->parsed()) {
      return run_plan(scenario_path, plan_out, curves_path, seed, timing);
    }
    if (bench_cmd->parsed()) {
      return run_bench(scenario_dir, planners_text, bench_out, bench_seed);
    }
  } catch (const iglov::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenarioError;
  } catch (const iglov::NonFiniteInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitScenarioError;
  } catch (const iglov::Error& e) {
    std::cerr << "planner abort: " << e.what() << "\n";
    return kExitPlannerAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlannerAbort;
  }
  return kExitOk;
}
