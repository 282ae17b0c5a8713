#include "fpr/interaction.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace fpr {

void CameraRig::validate() const {
  if (cameras.empty()) {
    throw ArgumentError("CameraRig: at least one camera is required");
  }
  std::unordered_set<std::string> names;
  for (const RigCamera& cam : cameras) {
    if (!cam.intrinsics.valid()) {
      throw ArgumentError("CameraRig: invalid intrinsics for camera '" +
                          cam.name + "'");
    }
    if (!cam.t_ego_cam.is_unit()) {
      throw ArgumentError("CameraRig: non-unit extrinsic rotation for '" +
                          cam.name + "'");
    }
    if (!names.insert(cam.name).second) {
      throw ArgumentError("CameraRig: duplicate camera name '" + cam.name +
                          "'");
    }
  }
}

SparseDepthTargets render_sparse_depth(const PointCloud& cloud,
                                       const CameraRig& rig,
                                       const Pose& t_ego_lidar,
                                       double near_clip) {
  rig.validate();
  SparseDepthTargets out;
  out.cameras.reserve(rig.cameras.size());
  for (const RigCamera& cam : rig.cameras) {
    SparseDepthTargets::PerCamera per;
    per.camera_name = cam.name;
    per.width = cam.intrinsics.width;
    per.height = cam.intrinsics.height;

    const Pose t_cam_lidar = compose(invert(cam.t_ego_cam), t_ego_lidar);
    // z-buffer: pixel -> index into per.targets
    std::unordered_map<std::int64_t, std::size_t> slot;
    for (const Point& p : cloud.points) {
      const auto proj =
          project_to_camera(t_cam_lidar.apply(p.xyz()), cam.intrinsics,
                            near_clip);
      if (!proj) {
        continue;
      }
      const std::int64_t key =
          static_cast<std::int64_t>(proj->py) * cam.intrinsics.width +
          proj->px;
      auto it = slot.find(key);
      if (it == slot.end()) {
        slot.emplace(key, per.targets.size());
        per.targets.push_back(DepthTarget{proj->px, proj->py, proj->depth});
      } else if (proj->depth < per.targets[it->second].d) {
        per.targets[it->second].d = proj->depth;
      }
    }
    out.cameras.push_back(std::move(per));
  }
  return out;
}

ColoredPointCloud colorize_cloud(const PointCloud& cloud,
                                 const std::vector<Image>& images,
                                 const CameraRig& rig, const Pose& t_ego_lidar,
                                 double near_clip) {
  rig.validate();
  if (images.size() != rig.cameras.size()) {
    throw ArgumentError("colorize_cloud: expected " +
                        std::to_string(rig.cameras.size()) + " images, got " +
                        std::to_string(images.size()));
  }
  for (std::size_t j = 0; j < images.size(); ++j) {
    const CameraIntrinsics& intr = rig.cameras[j].intrinsics;
    if (images[j].width != intr.width || images[j].height != intr.height) {
      throw ArgumentError("colorize_cloud: image size mismatch for camera '" +
                          rig.cameras[j].name + "'");
    }
  }

  std::vector<Pose> t_cam_lidar;
  t_cam_lidar.reserve(rig.cameras.size());
  for (const RigCamera& cam : rig.cameras) {
    t_cam_lidar.push_back(compose(invert(cam.t_ego_cam), t_ego_lidar));
  }

  ColoredPointCloud out;
  out.points.reserve(cloud.points.size());
  for (const Point& p : cloud.points) {
    ColoredPoint cp;
    cp.x = p.x;
    cp.y = p.y;
    cp.z = p.z;
    cp.intensity = p.intensity;

    double best_depth = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rig.cameras.size(); ++j) {
      const auto proj = project_to_camera(t_cam_lidar[j].apply(p.xyz()),
                                          rig.cameras[j].intrinsics, near_clip);
      if (proj && proj->depth < best_depth) {
        best_depth = proj->depth;
        cp.r = images[j].at(proj->px, proj->py, 0);
        cp.g = images[j].at(proj->px, proj->py, 1);
        cp.b = images[j].at(proj->px, proj->py, 2);
        cp.visible = true;
      }
    }
    out.points.push_back(cp);
  }
  return out;
}

RangeImage rendered_range_image(const ColoredPointCloud& colored,
                                const SphericalConfig& cfg) {
  return spherical_projection(colored, cfg);
}

std::vector<DepthMap> depth_maps_from_targets(
    const SparseDepthTargets& targets) {
  std::vector<DepthMap> maps;
  maps.reserve(targets.cameras.size());
  for (const auto& cam : targets.cameras) {
    DepthMap map(cam.width, cam.height);
    for (const DepthTarget& t : cam.targets) {
      double& cell = map.at(t.u, t.v);
      if (cell == 0.0 || t.d < cell) {
        cell = t.d;
      }
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

RangeImage depth_maps_to_lidar_range(const std::vector<DepthMap>& depths,
                                     const CameraRig& rig,
                                     const Pose& t_ego_lidar,
                                     const SphericalConfig& cfg) {
  rig.validate();
  if (depths.size() != rig.cameras.size()) {
    throw ShapeError("depth_maps_to_lidar_range: expected " +
                     std::to_string(rig.cameras.size()) + " depth maps, got " +
                     std::to_string(depths.size()));
  }

  PointCloud merged;
  for (std::size_t j = 0; j < rig.cameras.size(); ++j) {
    const CameraIntrinsics& intr = rig.cameras[j].intrinsics;
    const DepthMap& map = depths[j];
    if (map.width != intr.width || map.height != intr.height) {
      throw ShapeError("depth_maps_to_lidar_range: depth map size mismatch "
                       "for camera '" +
                       rig.cameras[j].name + "'");
    }
    const Pose t_lidar_cam = compose(invert(t_ego_lidar), rig.cameras[j].t_ego_cam);
    for (int v = 0; v < map.height; ++v) {
      for (int u = 0; u < map.width; ++u) {
        const double d = map.at(u, v);
        if (d <= 0.0) {
          continue;
        }
        const Eigen::Vector3d p_cam((u - intr.cx) / intr.fx * d,
                                    (v - intr.cy) / intr.fy * d, d);
        const Eigen::Vector3d p_lidar = t_lidar_cam.apply(p_cam);
        merged.points.push_back(
            Point{p_lidar.x(), p_lidar.y(), p_lidar.z(), 0.0});
      }
    }
  }
  return spherical_projection(merged, cfg);
}

}  // namespace fpr
