#pragma once

#include <string>
#include <vector>

#include "iglov/sim.hpp"

namespace iglov {

// Reads a point-cloud CSV of `x,y,z` rows. Blank lines and lines starting
// with '#' are skipped. Throws ScenarioError on malformed rows.
std::vector<Vec3> read_point_cloud_csv(const std::string& path);
std::vector<Vec3> parse_point_cloud_csv(const std::string& text);

// Voxel information layers, one row per occupied voxel sorted by key.
// Header: kx,ky,kz,cx,cy,cz,fisher,dist,weighted
std::string layers_csv(const std::vector<LayerRow>& rows);

// Telemetry rows mirroring StepRecord.
// Header: step,t,x,y,z,yaw_base,planner,px,py,pz,cmd_yaw,cmd_pitch,act_yaw,
//         act_pitch,rel_yaw,visible,crlb,ok,plan_ms,gain
std::string telemetry_csv(std::span<const StepRecord> records);

// Raw vs fitted gain along each circle at 0.01 rad resolution.
// Header: circle,theta,gain_raw,gain_fit
std::string curves_csv(const InfoMap& map, const Vec3& camera_position,
                       const LocalInfoModel& model, const NoiseModel& noise);

// Benchmark summary rows.
// Header: scenario,planner,steps,failures,crlb_mean,crlb_max,yaw_tv,
//         max_abs_rel_yaw,plan_ms_mean
std::string report_csv(std::span<const BenchRow> rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace iglov
