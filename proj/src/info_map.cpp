#include "iglov/info_map.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace iglov {

NoiseModel NoiseModel::isotropic(double sigma2) {
  NoiseModel n;
  n.mode = Mode::kIsotropic;
  n.sigma2 = sigma2;
  n.validate();
  return n;
}

NoiseModel NoiseModel::depth_dependent(double pixel_var, double depth_coeff) {
  NoiseModel n;
  n.mode = Mode::kDepthDependent;
  n.pixel_var = pixel_var;
  n.depth_coeff = depth_coeff;
  n.validate();
  return n;
}

NoiseModel NoiseModel::general(const Mat3& q) {
  NoiseModel n;
  n.mode = Mode::kGeneral;
  n.q = q;
  n.validate();
  return n;
}

Mat3 NoiseModel::covariance(double depth) const {
  switch (mode) {
    case Mode::kIsotropic:
      return sigma2 * Mat3::Identity();
    case Mode::kDepthDependent: {
      const double dz = depth_coeff * depth * depth;
      Mat3 q = Mat3::Zero();
      q(0, 0) = pixel_var;
      q(1, 1) = pixel_var;
      q(2, 2) = std::max(dz * dz, 1e-12);
      return q;
    }
    case Mode::kGeneral:
      return q;
  }
  return Mat3::Identity();
}

Mat3 NoiseModel::inverse_covariance(double depth) const {
  switch (mode) {
    case Mode::kIsotropic:
      return (1.0 / sigma2) * Mat3::Identity();
    case Mode::kDepthDependent: {
      Mat3 qi = Mat3::Zero();
      const double dz = depth_coeff * depth * depth;
      qi(0, 0) = 1.0 / pixel_var;
      qi(1, 1) = 1.0 / pixel_var;
      qi(2, 2) = 1.0 / std::max(dz * dz, 1e-12);
      return qi;
    }
    case Mode::kGeneral:
      return q.inverse();
  }
  return Mat3::Identity();
}

void NoiseModel::validate() const {
  switch (mode) {
    case Mode::kIsotropic:
      if (!std::isfinite(sigma2) || sigma2 <= 0.0) {
        throw ScenarioError("noise: sigma2 must be finite and positive");
      }
      break;
    case Mode::kDepthDependent:
      if (!std::isfinite(pixel_var) || pixel_var <= 0.0 ||
          !std::isfinite(depth_coeff) || depth_coeff <= 0.0) {
        throw ScenarioError("noise: depth-dependent parameters must be positive");
      }
      break;
    case Mode::kGeneral: {
      if (!q.allFinite()) {
        throw ScenarioError("noise: covariance must be finite");
      }
      if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ScenarioError("noise: covariance must be symmetric");
      }
      Eigen::SelfAdjointEigenSolver<Mat3> es(q);
      if (es.eigenvalues().minCoeff() <= 0.0) {
        throw ScenarioError("noise: covariance must be positive definite");
      }
      break;
    }
  }
}

bool VoxelKey::operator<(const VoxelKey& o) const {
  if (x != o.x) return x < o.x;
  if (y != o.y) return y < o.y;
  return z < o.z;
}

namespace {

inline std::uint64_t mix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ull;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

}  // namespace

std::size_t VoxelKeyHash::operator()(const VoxelKey& k) const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(k.x));
  h = mix64(h ^ static_cast<std::uint64_t>(k.y));
  h = mix64(h ^ static_cast<std::uint64_t>(k.z));
  return static_cast<std::size_t>(h);
}

Mat6 fisher_matrix(const Vec3& camera_position, const Vec3& point,
                   const NoiseModel& noise) {
  const Vec3 d = point - camera_position;
  const double r = d.norm();
  if (r < kMinFisherRange) {
    throw RangeTooSmallError("fisher_matrix: range below guard radius");
  }
  const Vec3 u = d / r;
  const Mat3 proj = (Mat3::Identity() - u * u.transpose()) / r;
  Mat36 jac;
  jac.leftCols<3>() = -proj;
  jac.rightCols<3>() = proj * skew(d);
  const Mat6 fim = jac.transpose() * noise.inverse_covariance(r) * jac;
  return 0.5 * (fim + fim.transpose());
}

Mat6 fisher_matrix_oriented(const Pose& camera, const Vec3& point,
                            const NoiseModel& noise) {
  const Vec3 d = point - camera.position;
  const double r = d.norm();
  if (r < kMinFisherRange) {
    throw RangeTooSmallError("fisher_matrix_oriented: range below guard radius");
  }
  const Mat3 rot = camera.rotation();
  const Vec3 pc = rot.transpose() * d;
  const Vec3 u = pc / r;
  const Mat3 proj = (Mat3::Identity() - u * u.transpose()) / r;
  Mat36 jac;
  // Translation in world coordinates, rotation as a right perturbation.
  jac.leftCols<3>() = -proj * rot.transpose();
  jac.rightCols<3>() = proj * skew(pc);
  const Mat6 fim = jac.transpose() * noise.inverse_covariance(r) * jac;
  return 0.5 * (fim + fim.transpose());
}

double fisher_trace(const Vec3& camera_position, const Vec3& point,
                    const NoiseModel& noise) {
  return fisher_matrix(camera_position, point, noise).trace();
}

InfoMap::InfoMap(double voxel_size) : voxel_size_(voxel_size) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw ScenarioError("info map: voxel size must be finite and positive");
  }
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
  min_key_ = {kMax, kMax, kMax};
  max_key_ = {kMin, kMin, kMin};
}

VoxelKey InfoMap::key_of(const Vec3& p) const {
  const auto cell = [this](double v) {
    return static_cast<std::int64_t>(std::floor(v / voxel_size_));
  };
  return {cell(p.x()), cell(p.y()), cell(p.z())};
}

Vec3 InfoMap::center_of(const VoxelKey& k) const {
  return {(static_cast<double>(k.x) + 0.5) * voxel_size_,
          (static_cast<double>(k.y) + 0.5) * voxel_size_,
          (static_cast<double>(k.z) + 0.5) * voxel_size_};
}

void InfoMap::insert_points(std::span<const Vec3> points) {
  for (const Vec3& p : points) {
    if (!p.allFinite()) {
      throw NonFiniteInputError("insert_points: point is not finite");
    }
  }
  if (points.empty()) {
    return;
  }
  for (const Vec3& p : points) {
    const VoxelKey k = key_of(p);
    voxels_[k].count += 1;
    invalidate_neighborhood(k);
    min_key_.x = std::min(min_key_.x, k.x);
    min_key_.y = std::min(min_key_.y, k.y);
    min_key_.z = std::min(min_key_.z, k.z);
    max_key_.x = std::max(max_key_.x, k.x);
    max_key_.y = std::max(max_key_.y, k.y);
    max_key_.z = std::max(max_key_.z, k.z);
  }
  ++epoch_;
}

void InfoMap::invalidate_neighborhood(const VoxelKey& k) {
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        const auto it = voxels_.find({k.x + dx, k.y + dy, k.z + dz});
        if (it != voxels_.end()) {
          it->second.stats_fresh = false;
        }
      }
    }
  }
}

std::uint32_t InfoMap::count(const VoxelKey& k) const {
  const auto it = voxels_.find(k);
  return it == voxels_.end() ? 0 : it->second.count;
}

DistributionStats InfoMap::compute_stats(const VoxelKey& k) const {
  double sum = 0.0;
  std::array<double, 27> counts{};
  std::size_t idx = 0;
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        const auto it = voxels_.find({k.x + dx, k.y + dy, k.z + dz});
        const double c = it == voxels_.end()
                             ? 0.0
                             : static_cast<double>(it->second.count);
        counts[idx++] = c;
        sum += c;
      }
    }
  }
  DistributionStats stats;
  stats.mean = sum / 27.0;
  double sq = 0.0;
  for (double c : counts) {
    const double d = c - stats.mean;
    sq += d * d;
  }
  stats.stddev = std::sqrt(sq / 27.0);
  return stats;
}

DistributionStats InfoMap::distribution_stats(const VoxelKey& k) const {
  const auto it = voxels_.find(k);
  if (it == voxels_.end()) {
    return compute_stats(k);
  }
  if (!it->second.stats_fresh) {
    it->second.stats = compute_stats(k);
    it->second.stats_fresh = true;
  }
  return it->second.stats;
}

double InfoMap::distribution_info(const VoxelKey& k) const {
  const DistributionStats s = distribution_stats(k);
  return s.mean * (1.0 + std::exp(-s.stddev));
}

double InfoMap::weighted_info(const Vec3& camera_position, const VoxelKey& k,
                              const NoiseModel& noise) const {
  const auto it = voxels_.find(k);
  if (it == voxels_.end()) {
    return 0.0;
  }
  return distribution_info(k) *
         fisher_trace(camera_position, center_of(k), noise);
}

double InfoMap::neighbor_sum_info(const Vec3& camera_position,
                                  const Vec3& point, double radius,
                                  const NoiseModel& noise) const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ScenarioError("neighbor_sum_info: radius must be positive");
  }
  if (voxels_.empty()) {
    return 0.0;
  }
  const Vec3 r3(radius, radius, radius);
  VoxelKey lo = key_of(point - r3);
  VoxelKey hi = key_of(point + r3);
  lo.x = std::max(lo.x, min_key_.x);
  lo.y = std::max(lo.y, min_key_.y);
  lo.z = std::max(lo.z, min_key_.z);
  hi.x = std::min(hi.x, max_key_.x);
  hi.y = std::min(hi.y, max_key_.y);
  hi.z = std::min(hi.z, max_key_.z);
  const double r2 = radius * radius;
  double sum = 0.0;
  for (std::int64_t kx = lo.x; kx <= hi.x; ++kx) {
    for (std::int64_t ky = lo.y; ky <= hi.y; ++ky) {
      for (std::int64_t kz = lo.z; kz <= hi.z; ++kz) {
        const VoxelKey k{kx, ky, kz};
        if ((center_of(k) - point).squaredNorm() > r2) {
          continue;
        }
        sum += weighted_info(camera_position, k, noise);
      }
    }
  }
  return sum;
}

std::vector<LayerRow> InfoMap::dump_layers(const Vec3& camera_position,
                                           const NoiseModel& noise) const {
  std::vector<LayerRow> rows;
  rows.reserve(voxels_.size());
  for (const auto& [key, voxel] : voxels_) {
    LayerRow row;
    row.key = key;
    row.center = center_of(key);
    row.count = voxel.count;
    // Clamp the range to the guard radius so a camera sitting inside a
    // voxel still produces a finite row.
    Vec3 cam = camera_position;
    if ((row.center - cam).norm() < kMinFisherRange) {
      cam = row.center - Vec3(kMinFisherRange, 0.0, 0.0);
    }
    row.fisher = fisher_trace(cam, row.center, noise);
    row.dist = distribution_info(key);
    row.weighted = row.fisher * row.dist;
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(),
            [](const LayerRow& a, const LayerRow& b) { return a.key < b.key; });
  return rows;
}

}  // namespace iglov
