#pragma once

#include <vector>

#include "fpr/interaction.hpp"

namespace fpr {

inline constexpr int kDescriptorDim = 256;

/// Fixed-length place descriptor. Stored as float32 to match the on-disk
/// format; all arithmetic over descriptors accumulates in double.
struct Descriptor {
  std::vector<float> values;

  int dim() const { return static_cast<int>(values.size()); }
};

struct LossWeights {
  double lambda_d = 0.01;
  double lambda_t = 1.00;
  double lambda_r = 0.01;
  double alpha = 0.5;  // triplet margin
};

/// Sum of |d_i - D_j(u_i, v_i)| over all sparse targets. With mean_reduction
/// the sum is divided by the number of targets (0 when there are none).
double depth_loss(const SparseDepthTargets& targets,
                  const std::vector<DepthMap>& depths,
                  bool mean_reduction = false);

/// Squared Euclidean distance between descriptors.
double descriptor_distance(const Descriptor& a, const Descriptor& b);

/// Lazy triplet loss over one query, its positives and negatives:
///   n_pos * (alpha + max_p dis(q,p)) - sum_n dis(q,n)
/// The default is the literal form, which may be negative; hinge clamps the
/// result at 0.
double triplet_loss(const Descriptor& query,
                    const std::vector<Descriptor>& positives,
                    const std::vector<Descriptor>& negatives, double alpha,
                    bool hinge = false);

/// Relative LiDAR pose between a query and a positive sample given their
/// world-frame ego poses: maps positive-frame LiDAR points into the query
/// LiDAR frame.
Pose relative_lidar_pose(const Pose& pose_q, const Pose& pose_p,
                         const Pose& t_ego_lidar);

/// L1 difference between the query range image and the positive cloud's
/// range image after reprojection into the query frame, summed over all
/// pixels with invalid pixels contributing their 0 encoding. mean_reduction
/// averages over pixels valid in both images instead (0 when none are).
double reprojection_loss(const PointCloud& cloud_p, const PointCloud& cloud_q,
                         const Pose& t_l, const SphericalConfig& cfg,
                         bool mean_reduction = false);

/// Weighted sum of the three training losses.
double total_loss(double ld, double lt, double lr, const LossWeights& w);

}  // namespace fpr
