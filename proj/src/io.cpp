#include "iglov/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace iglov {

namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

double parse_double(std::string_view token, const std::string& line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' ||
                         *(end - 1) == '\r')) {
    --end;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ScenarioError("point cloud: malformed number in line '" + line +
                        "'");
  }
  return value;
}

}  // namespace

std::vector<Vec3> parse_point_cloud_csv(const std::string& text) {
  std::vector<Vec3> points;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view(line);
    while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) {
      view.remove_prefix(1);
    }
    if (view.empty() || view.front() == '#' || view == "\r") {
      continue;
    }
    double coords[3];
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t comma = view.find(',', start);
      if (i < 2 && comma == std::string_view::npos) {
        throw ScenarioError("point cloud: expected x,y,z in line '" + line +
                            "'");
      }
      const std::size_t len =
          (i < 2 ? comma : view.size()) - start;
      coords[i] = parse_double(view.substr(start, len), line);
      start = (i < 2 ? comma + 1 : view.size());
    }
    points.emplace_back(coords[0], coords[1], coords[2]);
  }
  return points;
}

std::vector<Vec3> read_point_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("point cloud: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_point_cloud_csv(buf.str());
}

std::string layers_csv(const std::vector<LayerRow>& rows) {
  std::ostringstream out;
  out << "kx,ky,kz,cx,cy,cz,fisher,dist,weighted\n";
  for (const LayerRow& row : rows) {
    out << row.key.x << ',' << row.key.y << ',' << row.key.z << ','
        << format("%.6f", row.center.x()) << ','
        << format("%.6f", row.center.y()) << ','
        << format("%.6f", row.center.z()) << ','
        << format("%.9f", row.fisher) << ',' << format("%.9f", row.dist)
        << ',' << format("%.9f", row.weighted) << '\n';
  }
  return out.str();
}

std::string telemetry_csv(std::span<const StepRecord> records) {
  std::ostringstream out;
  out << "step,t,x,y,z,yaw_base,planner,px,py,pz,cmd_yaw,cmd_pitch,act_yaw,"
         "act_pitch,rel_yaw,visible,crlb,ok,plan_ms,gain\n";
  for (const StepRecord& rec : records) {
    out << rec.step << ',' << format("%.3f", rec.time) << ','
        << format("%.6f", rec.base_position.x()) << ','
        << format("%.6f", rec.base_position.y()) << ','
        << format("%.6f", rec.base_position.z()) << ','
        << format("%.6f", rec.base_yaw) << ',' << planner_name(rec.planner)
        << ',' << format("%.6f", rec.landing_point.x()) << ','
        << format("%.6f", rec.landing_point.y()) << ','
        << format("%.6f", rec.landing_point.z()) << ','
        << format("%.6f", rec.cmd_yaw) << ',' << format("%.6f", rec.cmd_pitch)
        << ',' << format("%.6f", rec.act_yaw) << ','
        << format("%.6f", rec.act_pitch) << ','
        << format("%.6f", rec.rel_yaw) << ',' << rec.visible << ','
        << format("%.6f", rec.crlb) << ',' << (rec.tracking_ok ? 1 : 0)
        << ',' << format("%.3f", rec.plan_ms) << ','
        << format("%.6f", rec.gain) << '\n';
  }
  return out.str();
}

std::string curves_csv(const InfoMap& map, const Vec3& camera_position,
                       const LocalInfoModel& model, const NoiseModel& noise) {
  std::ostringstream out;
  out << "circle,theta,gain_raw,gain_fit\n";
  const double theta_max = model.params.max_theta();
  for (const InfoCurve& curve : model.curves) {
    for (int i = 0;; ++i) {
      const double theta = std::min(-theta_max + 0.01 * i, theta_max);
      const Vec3 p = model.point_at(curve.circle, theta);
      const double info = map.neighbor_sum_info(
          camera_position, p, model.params.neighbor_radius, noise);
      const double raw = info * (1.0 - std::abs(theta) / kPi);
      out << curve.circle << ',' << format("%.4f", theta) << ','
          << format("%.9f", raw) << ','
          << format("%.9f", curve_eval(curve, theta)) << '\n';
      if (theta >= theta_max) {
        break;
      }
    }
  }
  return out.str();
}

std::string report_csv(std::span<const BenchRow> rows) {
  std::ostringstream out;
  out << "scenario,planner,steps,failures,crlb_mean,crlb_max,yaw_tv,"
         "max_abs_rel_yaw,plan_ms_mean\n";
  for (const BenchRow& row : rows) {
    out << row.scenario << ',' << row.planner << ',' << row.steps << ','
        << row.tracking_failures << ',' << format("%.6f", row.crlb_mean)
        << ',' << format("%.6f", row.crlb_max) << ','
        << format("%.6f", row.yaw_total_variation) << ','
        << format("%.6f", row.max_abs_rel_yaw) << ','
        << format("%.3f", row.plan_ms_mean) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ScenarioError("cannot open output file '" + path + "'");
  }
  out << content;
}

}  // namespace iglov
