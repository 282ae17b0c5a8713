#include "fpr/losses.hpp"

#include <algorithm>
#include <cmath>

namespace fpr {

double depth_loss(const SparseDepthTargets& targets,
                  const std::vector<DepthMap>& depths, bool mean_reduction) {
  if (depths.size() != targets.cameras.size()) {
    throw ShapeError("depth_loss: expected " +
                     std::to_string(targets.cameras.size()) +
                     " depth maps, got " + std::to_string(depths.size()));
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < targets.cameras.size(); ++j) {
    const auto& cam = targets.cameras[j];
    const DepthMap& map = depths[j];
    if (map.width != cam.width || map.height != cam.height) {
      throw ShapeError("depth_loss: depth map size mismatch for camera '" +
                       cam.camera_name + "'");
    }
    for (const DepthTarget& t : cam.targets) {
      if (t.u < 0 || t.u >= map.width || t.v < 0 || t.v >= map.height) {
        throw ShapeError("depth_loss: target pixel out of bounds for '" +
                         cam.camera_name + "'");
      }
      sum += std::abs(t.d - map.at(t.u, t.v));
      ++count;
    }
  }
  if (mean_reduction) {
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
  }
  return sum;
}

double descriptor_distance(const Descriptor& a, const Descriptor& b) {
  if (a.dim() != b.dim()) {
    throw ShapeError("descriptor_distance: dimension mismatch (" +
                     std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) +
                     ")");
  }
  double sum = 0.0;
  for (int k = 0; k < a.dim(); ++k) {
    const double diff = static_cast<double>(a.values[k]) - b.values[k];
    sum += diff * diff;
  }
  return sum;
}

double triplet_loss(const Descriptor& query,
                    const std::vector<Descriptor>& positives,
                    const std::vector<Descriptor>& negatives, double alpha,
                    bool hinge) {
  if (positives.empty() || negatives.empty()) {
    throw ArgumentError("triplet_loss: positives and negatives must be "
                        "nonempty");
  }
  double max_pos = 0.0;
  bool first = true;
  for (const Descriptor& p : positives) {
    const double d = descriptor_distance(query, p);
    if (first || d > max_pos) {
      max_pos = d;
      first = false;
    }
  }
  double neg_sum = 0.0;
  for (const Descriptor& n : negatives) {
    neg_sum += descriptor_distance(query, n);
  }
  const double loss =
      static_cast<double>(positives.size()) * (alpha + max_pos) - neg_sum;
  return hinge ? std::max(0.0, loss) : loss;
}

Pose relative_lidar_pose(const Pose& pose_q, const Pose& pose_p,
                         const Pose& t_ego_lidar) {
  return compose(invert(t_ego_lidar),
                 compose(invert(pose_q), compose(pose_p, t_ego_lidar)));
}

double reprojection_loss(const PointCloud& cloud_p, const PointCloud& cloud_q,
                         const Pose& t_l, const SphericalConfig& cfg,
                         bool mean_reduction) {
  const RangeImage img_p = spherical_projection(transform_points(cloud_p, t_l), cfg);
  const RangeImage img_q = spherical_projection(cloud_q, cfg);
  double sum = 0.0;
  std::size_t co_valid = 0;
  for (int v = 0; v < cfg.height; ++v) {
    for (int u = 0; u < cfg.width; ++u) {
      const double diff = std::abs(img_p.range(u, v) - img_q.range(u, v));
      if (mean_reduction) {
        if (img_p.valid(u, v) && img_q.valid(u, v)) {
          sum += diff;
          ++co_valid;
        }
      } else {
        sum += diff;
      }
    }
  }
  if (mean_reduction) {
    return co_valid == 0 ? 0.0 : sum / static_cast<double>(co_valid);
  }
  return sum;
}

double total_loss(double ld, double lt, double lr, const LossWeights& w) {
  return w.lambda_d * ld + w.lambda_t * lt + w.lambda_r * lr;
}

}  // namespace fpr
