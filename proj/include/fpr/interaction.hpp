#pragma once

#include <string>
#include <vector>

#include "fpr/geometry.hpp"

namespace fpr {

struct RigCamera {
  std::string name;
  CameraIntrinsics intrinsics;
  Pose t_ego_cam;  // camera frame -> ego frame
};

/// Surround-view camera set mounted on the ego body.
struct CameraRig {
  std::vector<RigCamera> cameras;

  std::size_t size() const { return cameras.size(); }
  void validate() const;
};

/// Per-camera dense depth grid; 0 means no value.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;  // row-major, meters

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h) {
    depth.assign(static_cast<std::size_t>(w) * h, 0.0);
  }

  double& at(int u, int v) {
    return depth[static_cast<std::size_t>(v) * width + u];
  }
  double at(int u, int v) const {
    return depth[static_cast<std::size_t>(v) * width + u];
  }
};

struct DepthTarget {
  int u = 0;        // pixel column
  int v = 0;        // pixel row
  double d = 0.0;   // camera-frame depth, meters
};

/// LiDAR points projected into each camera, z-buffered per pixel. These are
/// the sparse supervision targets for pseudo depth.
struct SparseDepthTargets {
  struct PerCamera {
    std::string camera_name;
    int width = 0;
    int height = 0;
    std::vector<DepthTarget> targets;
  };
  std::vector<PerCamera> cameras;

  std::size_t total_targets() const {
    std::size_t n = 0;
    for (const auto& cam : cameras) n += cam.targets.size();
    return n;
  }
};

/// RGB image with values in [0, 1], row-major interleaved.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h) {
    rgb.assign(static_cast<std::size_t>(w) * h * 3, 0.0f);
  }

  float& at(int u, int v, int c) {
    return rgb[(static_cast<std::size_t>(v) * width + u) * 3 + c];
  }
  float at(int u, int v, int c) const {
    return rgb[(static_cast<std::size_t>(v) * width + u) * 3 + c];
  }
};

/// Projects every laser point into every camera and keeps, per pixel, the
/// smallest depth. Input cloud is in the LiDAR frame.
SparseDepthTargets render_sparse_depth(const PointCloud& cloud,
                                       const CameraRig& rig,
                                       const Pose& t_ego_lidar,
                                       double near_clip = kDefaultNearClip);

/// Attaches RGB to each point from the camera that sees it at the smallest
/// projection depth. Geometry and intensity pass through unchanged; points
/// outside every camera keep color (0,0,0) and visible=false.
ColoredPointCloud colorize_cloud(const PointCloud& cloud,
                                 const std::vector<Image>& images,
                                 const CameraRig& rig, const Pose& t_ego_lidar,
                                 double near_clip = kDefaultNearClip);

/// Spherical projection of a colored cloud into a (range, R, G, B) panorama.
RangeImage rendered_range_image(const ColoredPointCloud& colored,
                                const SphericalConfig& cfg);

/// Builds the per-camera depth maps that reproduce a set of sparse targets
/// exactly (pixel collisions keep the smallest depth).
std::vector<DepthMap> depth_maps_from_targets(const SparseDepthTargets& targets);

/// Unprojects every nonzero depth pixel through its camera, transforms the
/// points to the LiDAR frame and renders one holistic range image.
RangeImage depth_maps_to_lidar_range(const std::vector<DepthMap>& depths,
                                     const CameraRig& rig,
                                     const Pose& t_ego_lidar,
                                     const SphericalConfig& cfg);

}  // namespace fpr
