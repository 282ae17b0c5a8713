#include "fpr/geometry.hpp"

#include <cmath>
#include <numbers>

namespace fpr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

void require_unit(const Pose& pose, const char* op) {
  if (!pose.is_unit()) {
    throw ArgumentError(std::string(op) +
                        ": pose quaternion is not unit length");
  }
}

// Half-up nearest-integer rounding, the documented pixel lookup rule.
int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

Pose compose(const Pose& a, const Pose& b) {
  require_unit(a, "compose");
  require_unit(b, "compose");
  Pose out;
  out.rotation = (a.rotation * b.rotation).normalized();
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

Pose invert(const Pose& a) {
  require_unit(a, "invert");
  Pose out;
  out.rotation = a.rotation.conjugate();
  out.translation = -(out.rotation * a.translation);
  return out;
}

PointCloud transform_points(const PointCloud& cloud, const Pose& pose) {
  require_unit(pose, "transform_points");
  PointCloud out;
  out.points.reserve(cloud.points.size());
  for (const Point& p : cloud.points) {
    const Eigen::Vector3d q = pose.apply(p.xyz());
    out.points.push_back(Point{q.x(), q.y(), q.z(), p.intensity});
  }
  return out;
}

PointCloud strip_colors(const ColoredPointCloud& cloud) {
  PointCloud out;
  out.points.reserve(cloud.points.size());
  for (const ColoredPoint& p : cloud.points) {
    out.points.push_back(Point{p.x, p.y, p.z, p.intensity});
  }
  return out;
}

std::optional<CameraProjection> project_to_camera(
    const Eigen::Vector3d& point_cam, const CameraIntrinsics& intr,
    double near_clip) {
  if (point_cam.z() <= near_clip) {
    return std::nullopt;
  }
  CameraProjection proj;
  proj.depth = point_cam.z();
  proj.u = intr.fx * point_cam.x() / point_cam.z() + intr.cx;
  proj.v = intr.fy * point_cam.y() / point_cam.z() + intr.cy;
  proj.px = round_half_up(proj.u);
  proj.py = round_half_up(proj.v);
  if (proj.px < 0 || proj.px >= intr.width || proj.py < 0 ||
      proj.py >= intr.height) {
    return std::nullopt;
  }
  return proj;
}

std::optional<std::pair<int, int>> spherical_cell(const Eigen::Vector3d& p,
                                                  double range,
                                                  const SphericalConfig& cfg) {
  // A zero or non-finite range cannot be projected (and range 0 is the
  // invalid-pixel encoding), so it is culled even when r_min == 0.
  if (!(range > 0.0) || range < cfg.r_min || range > cfg.r_max) {
    return std::nullopt;
  }
  const double fov_up = cfg.fov_up * kDegToRad;
  const double fov_down = cfg.fov_down * kDegToRad;
  const double elevation = std::asin(p.z() / range);
  if (elevation < fov_down || elevation > fov_up) {
    return std::nullopt;
  }
  const double azimuth = std::atan2(p.y(), p.x());
  int u = static_cast<int>(
      std::floor(0.5 * (1.0 - azimuth / kPi) * cfg.width));
  int v = static_cast<int>(std::floor(
      (1.0 - (elevation - fov_down) / (fov_up - fov_down)) * cfg.height));
  u = std::clamp(u, 0, cfg.width - 1);
  v = std::clamp(v, 0, cfg.height - 1);
  return std::make_pair(u, v);
}

namespace {

// Shared z-buffered scatter; Write stores one point's payload into a pixel.
template <typename PointT, typename Write>
RangeImage project_cloud(const std::vector<PointT>& points, int channels,
                         const SphericalConfig& cfg, Write&& write) {
  if (!cfg.valid()) {
    throw ArgumentError("spherical_projection: invalid spherical config");
  }
  RangeImage img(cfg.width, cfg.height, channels);
  for (const PointT& p : points) {
    const Eigen::Vector3d xyz = p.xyz();
    const double range =
        std::sqrt(xyz.x() * xyz.x() + xyz.y() * xyz.y() + xyz.z() * xyz.z());
    const auto cell = spherical_cell(xyz, range, cfg);
    if (!cell) {
      continue;
    }
    // Ranges are stored at float32 precision. Re-projecting an unprojected
    // pixel recomputes the range with a few double ulps of noise, which is
    // far below float32 resolution, so round trips stay bit-exact.
    const double stored = static_cast<double>(static_cast<float>(range));
    const auto [u, v] = *cell;
    if (!img.valid(u, v) || stored < img.range(u, v)) {
      write(img, u, v, stored, p);
    }
  }
  return img;
}

}  // namespace

RangeImage spherical_projection(const PointCloud& cloud,
                                const SphericalConfig& cfg) {
  return project_cloud(cloud.points, 1, cfg,
                       [](RangeImage& img, int u, int v, double range,
                          const Point&) { img.at(u, v, 0) = range; });
}

RangeImage spherical_projection(const ColoredPointCloud& cloud,
                                const SphericalConfig& cfg) {
  return project_cloud(cloud.points, 4, cfg,
                       [](RangeImage& img, int u, int v, double range,
                          const ColoredPoint& p) {
                         img.at(u, v, 0) = range;
                         img.at(u, v, 1) = p.r;
                         img.at(u, v, 2) = p.g;
                         img.at(u, v, 3) = p.b;
                       });
}

RangeImage::RangeImage(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 4)) {
    throw ArgumentError("RangeImage: bad dimensions or channel count");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
}

Eigen::Vector3d pixel_center_ray(int u, int v, const SphericalConfig& cfg) {
  const double fov_up = cfg.fov_up * kDegToRad;
  const double fov_down = cfg.fov_down * kDegToRad;
  const double azimuth = kPi * (1.0 - 2.0 * (u + 0.5) / cfg.width);
  const double elevation =
      fov_down + (1.0 - (v + 0.5) / cfg.height) * (fov_up - fov_down);
  const double ce = std::cos(elevation);
  return {ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation)};
}

PointCloud unproject_range_image(const RangeImage& img,
                                 const SphericalConfig& cfg) {
  if (img.width() != cfg.width || img.height() != cfg.height) {
    throw ShapeError("unproject_range_image: image size does not match config");
  }
  PointCloud cloud;
  for (int v = 0; v < img.height(); ++v) {
    for (int u = 0; u < img.width(); ++u) {
      if (!img.valid(u, v)) {
        continue;
      }
      const Eigen::Vector3d p = img.range(u, v) * pixel_center_ray(u, v, cfg);
      cloud.points.push_back(Point{p.x(), p.y(), p.z(), 0.0});
    }
  }
  return cloud;
}

}  // namespace fpr
