#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "iglov/geometry.hpp"

namespace iglov {

// Observation noise covariance of a back-projected landmark, parameterized
// by measurement depth.
struct NoiseModel {
  enum class Mode { kIsotropic, kDepthDependent, kGeneral };

  Mode mode = Mode::kIsotropic;
  double sigma2 = 1.0;            // isotropic variance
  double pixel_var = 0.25;        // lateral variance, depth-dependent mode
  double depth_coeff = 1.425e-3;  // depth std dev = depth_coeff * z^2, meters
  Mat3 q = Mat3::Identity();      // explicit covariance, general mode

  static NoiseModel isotropic(double sigma2 = 1.0);
  static NoiseModel depth_dependent(double pixel_var = 0.25,
                                    double depth_coeff = 1.425e-3);
  static NoiseModel general(const Mat3& q);

  // Covariance at the given depth. Symmetric positive definite.
  Mat3 covariance(double depth) const;
  Mat3 inverse_covariance(double depth) const;
  // Throws NonFiniteInputError / ScenarioError on invalid parameters.
  void validate() const;
};

struct VoxelKey {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  bool operator==(const VoxelKey&) const = default;
  // Lexicographic, used for stable dump ordering.
  bool operator<(const VoxelKey& o) const;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const;
};

struct DistributionStats {
  double mean = 0.0;
  double stddev = 0.0;
};

struct LayerRow {
  VoxelKey key;
  Vec3 center = Vec3::Zero();
  std::uint32_t count = 0;
  double fisher = 0.0;
  double dist = 0.0;
  double weighted = 0.0;
};

// Local point-feature Fisher information matrix for a bearing-type
// observation, evaluated at identity camera orientation. Rows/cols order:
// [translation | rotation]. Throws RangeTooSmallError below the guard
// radius.
Mat6 fisher_matrix(const Vec3& camera_position, const Vec3& point,
                   const NoiseModel& noise);

// Fisher information matrix with the camera at an arbitrary orientation;
// used to accumulate localization information over tracked features.
Mat6 fisher_matrix_oriented(const Pose& camera, const Vec3& point,
                            const NoiseModel& noise);

double fisher_trace(const Vec3& camera_position, const Vec3& point,
                    const NoiseModel& noise);

inline constexpr double kMinFisherRange = 0.05;

// Sparse voxel hash map of observed feature counts with cached
// neighborhood-distribution statistics.
class InfoMap {
 public:
  explicit InfoMap(double voxel_size = 0.4);

  double voxel_size() const { return voxel_size_; }
  std::size_t size() const { return voxels_.size(); }
  std::uint64_t epoch() const { return epoch_; }

  VoxelKey key_of(const Vec3& p) const;
  Vec3 center_of(const VoxelKey& k) const;

  // Inserts feature points, creating voxels as needed and invalidating the
  // stats cache of every touched 3x3x3 neighborhood. Throws
  // NonFiniteInputError before any mutation if a point is not finite.
  void insert_points(std::span<const Vec3> points);

  std::uint32_t count(const VoxelKey& k) const;
  bool contains(const VoxelKey& k) const { return voxels_.count(k) > 0; }

  // Mean and population standard deviation of the 27 counts in the voxel's
  // 3x3x3 neighborhood (center included, absent voxels count 0).
  DistributionStats distribution_stats(const VoxelKey& k) const;

  // Distribution-weighted occupancy term mean * (1 + exp(-stddev)).
  double distribution_info(const VoxelKey& k) const;

  // distribution_info * fisher_trace for an occupied voxel, 0 otherwise.
  double weighted_info(const Vec3& camera_position, const VoxelKey& k,
                       const NoiseModel& noise) const;

  // Sum of weighted_info over occupied voxels whose centers lie within
  // radius of the query point. Scans only the bounding key box, so cost is
  // independent of total map size.
  double neighbor_sum_info(const Vec3& camera_position, const Vec3& point,
                           double radius, const NoiseModel& noise) const;

  // One row per occupied voxel, sorted by key. Ranges below the Fisher
  // guard radius are clamped to it so the dump never throws.
  std::vector<LayerRow> dump_layers(const Vec3& camera_position,
                                    const NoiseModel& noise) const;

  template <typename Fn>
  void for_each_voxel(Fn&& fn) const {
    for (const auto& [key, voxel] : voxels_) {
      fn(key, voxel.count);
    }
  }

 private:
  struct Voxel {
    std::uint32_t count = 0;
    mutable DistributionStats stats;
    mutable bool stats_fresh = false;
  };

  void invalidate_neighborhood(const VoxelKey& k);
  DistributionStats compute_stats(const VoxelKey& k) const;

  double voxel_size_;
  std::uint64_t epoch_ = 0;
  std::unordered_map<VoxelKey, Voxel, VoxelKeyHash> voxels_;
  // Bounds of occupied keys, kept for bounded local scans.
  VoxelKey min_key_;
  VoxelKey max_key_;
};

}  // namespace iglov
