#include "fpr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "fpr/random.hpp"

namespace fpr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLoopRadius = 32.0;     // meters
constexpr double kArcStep = 2.5;         // meters between samples (5 m/s at 2 Hz)
constexpr double kSiteSpacing = 600.0;   // meters between landmark sites
constexpr double kRevisitRadius = 9.0;   // revisit guarantee radius, meters
constexpr int kSplatRadius = 3;          // pixels

CameraRig default_rig() {
  CameraRig rig;
  const int width = 640;
  const int height = 352;
  const double focal = (width / 2.0) / std::tan(30.0 * std::numbers::pi / 180.0);
  for (int k = 0; k < 6; ++k) {
    const double yaw = k * kTwoPi / 6.0;
    RigCamera cam;
    cam.name = "cam" + std::to_string(k);
    cam.intrinsics =
        CameraIntrinsics{focal, focal, width / 2.0, height / 2.0, width, height};
    // Optical axis along the yaw direction, image x to the right, image y
    // down; columns of R are the camera axes expressed in the ego frame.
    Eigen::Matrix3d rot;
    rot.col(0) = Eigen::Vector3d(std::sin(yaw), -std::cos(yaw), 0.0);
    rot.col(1) = Eigen::Vector3d(0.0, 0.0, -1.0);
    rot.col(2) = Eigen::Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
    cam.t_ego_cam.rotation = Eigen::Quaterniond(rot).normalized();
    cam.t_ego_cam.translation =
        Eigen::Vector3d(0.3 * std::cos(yaw), 0.3 * std::sin(yaw), 1.6);
    rig.cameras.push_back(std::move(cam));
  }
  return rig;
}

Pose default_lidar_extrinsic() {
  Pose pose;
  pose.translation = Eigen::Vector3d(0.0, 0.0, 1.84);
  return pose;
}

// Snaps a LiDAR-frame point to the center elevation of its grid row, keeping
// azimuth and range, the way a fixed beam pattern samples the world.
std::optional<Point> beam_quantize(const Eigen::Vector3d& p_lidar,
                                   double intensity,
                                   const SphericalConfig& grid) {
  const double range = p_lidar.norm();
  const auto cell = spherical_cell(p_lidar, range, grid);
  if (!cell) {
    return std::nullopt;
  }
  const double fov_up = grid.fov_up * std::numbers::pi / 180.0;
  const double fov_down = grid.fov_down * std::numbers::pi / 180.0;
  const double elevation =
      fov_down + (1.0 - (cell->second + 0.5) / grid.height) * (fov_up - fov_down);
  const double azimuth = std::atan2(p_lidar.y(), p_lidar.x());
  const double horizontal = range * std::cos(elevation);
  const Eigen::Vector3d q(horizontal * std::cos(azimuth),
                          horizontal * std::sin(azimuth),
                          range * std::sin(elevation));
  // Store at float32 precision so written clouds round-trip bit-exactly.
  return Point{static_cast<float>(q.x()), static_cast<float>(q.y()),
               static_cast<float>(q.z()), static_cast<float>(intensity)};
}

struct ScenePlan {
  int site = 0;
  bool revisit = false;
};

std::vector<ScenePlan> plan_scenes(const SynthParams& params) {
  std::vector<ScenePlan> plans;
  plans.reserve(params.num_scenes);
  int next_site = 0;
  double acc = 0.0;
  bool any_revisit = false;
  for (int i = 0; i < params.num_scenes; ++i) {
    ScenePlan plan;
    if (i == 0) {
      plan.site = next_site++;
    } else {
      acc += params.revisit_rate;
      if (acc >= 1.0) {
        acc -= 1.0;
        plan.site = 0;
        plan.revisit = true;
        any_revisit = true;
      } else {
        plan.site = next_site++;
      }
    }
    plans.push_back(plan);
  }
  // A positive rate must yield at least one revisit so that later scenes
  // have reachable ground truth.
  if (!any_revisit && params.revisit_rate > 0.0 && params.num_scenes >= 2) {
    plans.back() = ScenePlan{0, true};
  }
  return plans;
}

}  // namespace

void SynthParams::validate() const {
  if (num_scenes < 0 || samples_per_scene < 0) {
    throw ArgumentError("synth params: scene and sample counts must be >= 0");
  }
  if (sample_period_us <= 0) {
    throw ArgumentError("synth params: sample period must be positive");
  }
  if (landmarks_per_site < 1) {
    throw ArgumentError("synth params: landmarks_per_site must be >= 1");
  }
  if (revisit_rate < 0.0 || revisit_rate > 1.0) {
    throw ArgumentError("synth params: revisit_rate must be in [0, 1]");
  }
  if (palette.empty()) {
    throw ArgumentError("synth params: palette must be nonempty");
  }
  for (const auto& rgb : palette) {
    for (int c : rgb) {
      if (c < 0 || c > 255) {
        throw ArgumentError("synth params: palette entries must be 8-bit");
      }
    }
  }
  if (date_step_days < 1) {
    throw ArgumentError("synth params: date_step_days must be >= 1");
  }
}

SynthResult generate_synthetic(const SynthParams& params,
                               const fs::path& out) {
  params.validate();
  fs::create_directories(out / "clouds");
  fs::create_directories(out / "images");

  SynthResult result;
  Dataset& dataset = result.dataset;
  dataset.root = out;
  dataset.rig = default_rig();
  dataset.t_ego_lidar = default_lidar_extrinsic();
  dataset.lidar_grid = SphericalConfig::lidar_default();
  dataset.camera_grid = SphericalConfig::camera_default();

  const std::vector<ScenePlan> plans = plan_scenes(params);
  const int num_sites =
      1 + (plans.empty() ? 0
                         : std::max_element(plans.begin(), plans.end(),
                                            [](const auto& a, const auto& b) {
                                              return a.site < b.site;
                                            })
                               ->site);

  // Landmark field, one cluster per site.
  for (int site = 0; site < num_sites; ++site) {
    Rng rng = Rng::keyed(params.seed, "landmarks:" + std::to_string(site));
    const Eigen::Vector2d center(kSiteSpacing * site, 0.0);
    for (int i = 0; i < params.landmarks_per_site; ++i) {
      Landmark lm;
      lm.id = static_cast<int>(result.landmarks.size());
      const double angle = rng.uniform(0.0, kTwoPi);
      const double radius = rng.uniform(12.0, 52.0);
      const double height = rng.uniform(0.5, 5.0);
      lm.position = Eigen::Vector3d(center.x() + radius * std::cos(angle),
                                    center.y() + radius * std::sin(angle),
                                    height);
      lm.rgb = params.palette[i % params.palette.size()];
      result.landmarks.push_back(lm);
    }
  }

  // Trajectories and poses. The radial wobble is a function of the absolute
  // loop angle, so a revisit scene with a similar wobble follows nearly the
  // same lane as the base scene no matter where along the arc it starts.
  Rng base_rng = Rng::keyed(params.seed, "base-trajectory");
  const double base_theta0 = base_rng.uniform(0.0, kTwoPi);
  const double base_direction = base_rng.bounded(2) == 0 ? 1.0 : -1.0;
  const double base_amp = base_rng.uniform(1.0, 2.2);
  const double base_phase = base_rng.uniform(0.0, kTwoPi);
  const double dtheta = kArcStep / kLoopRadius;
  for (int i = 0; i < params.num_scenes; ++i) {
    Scene scene;
    char scene_name[16];
    std::snprintf(scene_name, sizeof(scene_name), "scene%02d", i);
    scene.id = scene_name;
    scene.date = params.start_date + static_cast<std::int64_t>(i) *
                                         params.date_step_days;

    Rng rng = Rng::keyed(params.seed, "scene:" + scene.id);
    const Eigen::Vector2d center(kSiteSpacing * plans[i].site, 0.0);
    double theta0, direction, wobble_amp, wobble_phase;
    if (i == 0) {
      theta0 = base_theta0;
      direction = base_direction;
      wobble_amp = base_amp;
      wobble_phase = base_phase;
    } else if (plans[i].revisit) {
      // Start within the base arc, shifted by whole sample steps plus a
      // small jitter, with a slightly perturbed lane: close enough for
      // database deduplication and nonempty ground truth.
      const int overlap = std::clamp(params.samples_per_scene, 1, 12);
      const double steps = static_cast<double>(rng.bounded(overlap)) +
                           rng.uniform(-0.2, 0.2);
      theta0 = base_theta0 + base_direction * dtheta * steps;
      direction = base_direction;
      wobble_amp = std::max(0.2, base_amp + rng.uniform(-0.3, 0.3));
      wobble_phase = base_phase + rng.uniform(-0.15, 0.15);
    } else {
      theta0 = rng.uniform(0.0, kTwoPi);
      direction = rng.bounded(2) == 0 ? 1.0 : -1.0;
      wobble_amp = rng.uniform(1.0, 2.2);
      wobble_phase = rng.uniform(0.0, kTwoPi);
    }

    const auto position_at = [&](int j) {
      const double theta = theta0 + direction * j * dtheta;
      const double radius =
          kLoopRadius + wobble_amp * std::sin(2.0 * theta + wobble_phase);
      return Eigen::Vector2d(center.x() + radius * std::cos(theta),
                             center.y() + radius * std::sin(theta));
    };

    const std::int64_t t0 =
        scene.date.days * 86400000000LL + 10LL * 3600000000LL;
    for (int j = 0; j < params.samples_per_scene; ++j) {
      const Eigen::Vector2d pos = position_at(j);
      const Eigen::Vector2d ahead =
          j + 1 < params.samples_per_scene ? position_at(j + 1) : pos;
      const Eigen::Vector2d behind = j > 0 ? position_at(j - 1) : pos;
      const Eigen::Vector2d heading = ahead - behind;
      const double yaw = std::atan2(heading.y(), heading.x());

      Sample sample;
      char sample_name[32];
      std::snprintf(sample_name, sizeof(sample_name), "%s_s%03d",
                    scene.id.c_str(), j);
      sample.id = sample_name;
      sample.scene_id = scene.id;
      sample.timestamp_us = t0 + j * params.sample_period_us;
      sample.pose.translation = Eigen::Vector3d(pos.x(), pos.y(), 0.0);
      sample.pose.rotation =
          Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
      sample.position = pos;
      sample.lidar_file = "clouds/" + sample.id + ".fpr1";
      if (params.write_images) {
        for (const RigCamera& cam : dataset.rig.cameras) {
          sample.image_files.push_back("images/" + sample.id + "_" + cam.name +
                                       ".ppm");
        }
      }
      scene.samples.push_back(std::move(sample));
    }
    dataset.scenes.push_back(std::move(scene));
  }

  // Revisit guarantee: some later-scene sample must come within the positive
  // radius of an earlier scene, checked by brute force before anything is
  // written.
  if (params.revisit_rate > 0.0 && params.num_scenes >= 2 &&
      params.samples_per_scene >= 1) {
    bool found = false;
    for (std::size_t i = 1; i < dataset.scenes.size() && !found; ++i) {
      for (const Sample& s : dataset.scenes[i].samples) {
        for (std::size_t h = 0; h < i && !found; ++h) {
          for (const Sample& earlier : dataset.scenes[h].samples) {
            if ((s.position - earlier.position).norm() <= kRevisitRadius) {
              found = true;
              break;
            }
          }
        }
        if (found) break;
      }
    }
    if (!found) {
      throw Error("generate_synthetic: revisit guarantee failed; no later "
                  "sample within " + std::to_string(kRevisitRadius) +
                  " m of an earlier scene");
    }
  }

  // Sensor payloads.
  std::vector<Pose> t_cam_lidar;
  for (const RigCamera& cam : dataset.rig.cameras) {
    t_cam_lidar.push_back(
        compose(invert(cam.t_ego_cam), dataset.t_ego_lidar));
  }
  const float background = 13.0f / 255.0f;
  for (const Scene& scene : dataset.scenes) {
    for (const Sample& sample : scene.samples) {
      const Pose t_world_lidar = compose(sample.pose, dataset.t_ego_lidar);
      const Pose t_lidar_world = invert(t_world_lidar);

      PointCloud cloud;
      for (const Landmark& lm : result.landmarks) {
        const Eigen::Vector2d offset =
            lm.position.head<2>() - t_world_lidar.translation.head<2>();
        if (offset.norm() > dataset.lidar_grid.r_max + 10.0) {
          continue;
        }
        const auto point = beam_quantize(t_lidar_world.apply(lm.position),
                                         lm.id, dataset.lidar_grid);
        if (point) {
          cloud.points.push_back(*point);
        }
      }
      write_cloud(cloud, out / sample.lidar_file);

      if (!params.write_images) {
        continue;
      }
      struct Splat {
        double depth;
        int px, py;
        const Landmark* lm;
      };
      for (std::size_t c = 0; c < dataset.rig.cameras.size(); ++c) {
        const RigCamera& cam = dataset.rig.cameras[c];
        Image image(cam.intrinsics.width, cam.intrinsics.height);
        std::fill(image.rgb.begin(), image.rgb.end(), background);

        std::vector<Splat> splats;
        for (const Point& p : cloud.points) {
          const auto proj = project_to_camera(t_cam_lidar[c].apply(p.xyz()),
                                              cam.intrinsics);
          if (!proj) {
            continue;
          }
          splats.push_back(Splat{proj->depth, proj->px, proj->py,
                                 &result.landmarks[static_cast<std::size_t>(
                                     p.intensity)]});
        }
        // Painter's order: far landmarks first so near ones win overlaps,
        // matching the smallest-depth rule of colorization.
        std::sort(splats.begin(), splats.end(),
                  [](const Splat& a, const Splat& b) { return a.depth > b.depth; });
        for (const Splat& s : splats) {
          for (int dy = -kSplatRadius; dy <= kSplatRadius; ++dy) {
            for (int dx = -kSplatRadius; dx <= kSplatRadius; ++dx) {
              if (dx * dx + dy * dy > kSplatRadius * kSplatRadius) {
                continue;
              }
              const int x = s.px + dx;
              const int y = s.py + dy;
              if (x < 0 || x >= image.width || y < 0 || y >= image.height) {
                continue;
              }
              image.at(x, y, 0) = static_cast<float>(s.lm->rgb[0]) / 255.0f;
              image.at(x, y, 1) = static_cast<float>(s.lm->rgb[1]) / 255.0f;
              image.at(x, y, 2) = static_cast<float>(s.lm->rgb[2]) / 255.0f;
            }
          }
        }
        write_ppm(image, out / sample.image_files[c]);
      }
    }
  }

  write_manifest(dataset);

  json landmarks = json::array();
  for (const Landmark& lm : result.landmarks) {
    landmarks.push_back(json{
        {"id", lm.id},
        {"pos", {lm.position.x(), lm.position.y(), lm.position.z()}},
        {"rgb", {lm.rgb[0], lm.rgb[1], lm.rgb[2]}}});
  }
  std::ofstream lm_out(out / "landmarks.json", std::ios::binary);
  if (!lm_out) {
    throw IoError("cannot open '" + (out / "landmarks.json").string() +
                  "' for writing");
  }
  lm_out << json{{"landmarks", std::move(landmarks)}}.dump(2) << "\n";
  return result;
}

std::vector<Landmark> read_landmarks(const fs::path& root) {
  std::ifstream in(root / "landmarks.json", std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + (root / "landmarks.json").string() +
                  "' for reading");
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("landmarks")) {
    throw FormatError("'" + (root / "landmarks.json").string() +
                      "': not a landmark table");
  }
  std::vector<Landmark> out;
  for (const json& item : j["landmarks"]) {
    Landmark lm;
    lm.id = item.at("id").get<int>();
    lm.position = Eigen::Vector3d(item.at("pos")[0].get<double>(),
                                  item.at("pos")[1].get<double>(),
                                  item.at("pos")[2].get<double>());
    lm.rgb = {item.at("rgb")[0].get<int>(), item.at("rgb")[1].get<int>(),
              item.at("rgb")[2].get<int>()};
    out.push_back(lm);
  }
  return out;
}

}  // namespace fpr
