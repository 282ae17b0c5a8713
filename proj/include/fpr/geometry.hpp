#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <vector>

#include "fpr/error.hpp"

namespace fpr {

inline constexpr double kDefaultNearClip = 0.1;  // meters

/// Rigid transform: rotation (unit quaternion) followed by translation.
/// Applied to a point as x' = R x + t.
struct Pose {
  Eigen::Vector3d translation{0.0, 0.0, 0.0};
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};  // (w, x, y, z)

  static Pose identity() { return Pose{}; }

  bool is_unit(double tol = 1e-9) const {
    return std::abs(rotation.norm() - 1.0) <= tol;
  }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& a);

/// Pinhole camera, z forward, no distortion.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const { return fx > 0.0 && fy > 0.0 && width > 0 && height > 0; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  Eigen::Vector3d xyz() const { return {x, y, z}; }
};

struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Point with RGB attached by appearance rendering. Points not seen by any
/// camera keep (0,0,0) and visible=false so the geometry is preserved.
struct ColoredPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  bool visible = false;

  Eigen::Vector3d xyz() const { return {x, y, z}; }
};

struct ColoredPointCloud {
  std::vector<ColoredPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

PointCloud transform_points(const PointCloud& cloud, const Pose& pose);
PointCloud strip_colors(const ColoredPointCloud& cloud);

/// Spherical panorama grid. Azimuth spans the full circle over `width`
/// columns; elevation spans [fov_down, fov_up] (degrees) over `height` rows.
struct SphericalConfig {
  int width = 1056;
  int height = 32;
  double fov_up = 10.67;     // degrees
  double fov_down = -30.67;  // degrees
  double r_min = 1.0;        // meters
  double r_max = 100.0;      // meters

  bool valid() const {
    return width > 0 && height > 0 && fov_up > fov_down && r_min >= 0.0 &&
           r_min < r_max;
  }

  /// LiDAR-branch grid (32 x 1056, HDL-32E style vertical field of view).
  static SphericalConfig lidar_default() { return SphericalConfig{}; }

  /// Camera-branch grid for the holistic range image (352 x 1056). Reuses
  /// the LiDAR vertical field of view so the two branches stay aligned.
  static SphericalConfig camera_default() {
    SphericalConfig cfg;
    cfg.height = 352;
    return cfg;
  }
};

/// Range panorama. channels == 1 stores range only; channels == 4 stores
/// (range, R, G, B). Invalid pixels are exactly 0 in every channel. The
/// range channel carries float32-precision values (like the cloud format),
/// which keeps project/unproject round trips bit-exact.
class RangeImage {
 public:
  RangeImage() = default;
  RangeImage(int width, int height, int channels);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  double& at(int u, int v, int c = 0) {
    return data_[(static_cast<std::size_t>(v) * width_ + u) * channels_ + c];
  }
  double at(int u, int v, int c = 0) const {
    return data_[(static_cast<std::size_t>(v) * width_ + u) * channels_ + c];
  }

  double range(int u, int v) const { return at(u, v, 0); }
  bool valid(int u, int v) const { return at(u, v, 0) > 0.0; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const RangeImage& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<double> data_;
};

struct CameraProjection {
  double u = 0.0;      // horizontal pixel coordinate (real-valued)
  double v = 0.0;      // vertical pixel coordinate (real-valued)
  double depth = 0.0;  // camera-frame z, meters
  int px = 0;          // nearest-integer pixel column, guaranteed in bounds
  int py = 0;          // nearest-integer pixel row, guaranteed in bounds
};

/// Projects a camera-frame point through the pinhole model. Returns nothing
/// when the point is behind the near clip or its rounded pixel falls outside
/// the image, which realizes the out-of-view indicator of the depth targets.
std::optional<CameraProjection> project_to_camera(
    const Eigen::Vector3d& point_cam, const CameraIntrinsics& intr,
    double near_clip = kDefaultNearClip);

/// Grid cell for a direction/range under `cfg`, or nothing when the point is
/// outside the radial or vertical field-of-view limits.
std::optional<std::pair<int, int>> spherical_cell(const Eigen::Vector3d& p,
                                                  double range,
                                                  const SphericalConfig& cfg);

RangeImage spherical_projection(const PointCloud& cloud,
                                const SphericalConfig& cfg);

/// 4-channel variant writing (range, R, G, B); collisions keep the nearest
/// point, colors included.
RangeImage spherical_projection(const ColoredPointCloud& cloud,
                                const SphericalConfig& cfg);

/// Ray through the center of pixel (u, v), unit length.
Eigen::Vector3d pixel_center_ray(int u, int v, const SphericalConfig& cfg);

/// Maps every valid pixel back to a 3D point on its pixel-center ray at the
/// stored range. Intensity is set to 0.
PointCloud unproject_range_image(const RangeImage& img,
                                 const SphericalConfig& cfg);

}  // namespace fpr
