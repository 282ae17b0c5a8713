#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "fpr/benchmark.hpp"
#include "fpr/interaction.hpp"

namespace fpr {

inline constexpr int kManifestFormatVersion = 1;

/// In-memory dataset: sensor configuration plus per-scene sample records.
/// Sample payloads (clouds, images) are loaded lazily per sample.
struct Dataset {
  std::filesystem::path root;
  int format_version = kManifestFormatVersion;
  CameraRig rig;
  Pose t_ego_lidar;
  SphericalConfig lidar_grid = SphericalConfig::lidar_default();
  SphericalConfig camera_grid = SphericalConfig::camera_default();
  std::vector<Scene> scenes;

  std::size_t sample_count() const;
  std::vector<const Sample*> all_samples() const;
  const Sample& sample(const std::string& id) const;

  PointCloud load_cloud(const Sample& sample) const;
  std::vector<Image> load_images(const Sample& sample) const;
};

/// Point cloud binary format: magic "FPR1", little-endian u32 count, then
/// count * 4 float32 (x, y, z, intensity).
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_cloud(const std::filesystem::path& path);

/// Binary PPM (P6, 8-bit), the normative image format.
void write_ppm(const Image& image, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);

void write_manifest(const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& root);

/// Training split file: scheme tag, the full parameter block (seed included)
/// and the mined tuples.
struct TrainSplitFile {
  std::string scheme;  // "supervised" | "self-supervised"
  nlohmann::json params;
  std::vector<TrainingTuple> tuples;
};

/// Test split file: parameter block, retrieval database ids, per-query
/// ground truth and the validation subset.
struct TestSplitFile {
  nlohmann::json params;
  std::vector<std::string> database_ids;
  std::vector<TestQuery> queries;
  std::vector<std::string> validation_ids;
};

void write_train_split(const TrainSplitFile& split,
                       const std::filesystem::path& path);
TrainSplitFile read_train_split(const std::filesystem::path& path);

void write_test_split(const TestSplitFile& split,
                      const std::filesystem::path& path);
TestSplitFile read_test_split(const std::filesystem::path& path);

/// JSON encoding helpers shared by the manifest and the split files.
nlohmann::json pose_to_json(const Pose& pose);
Pose pose_from_json(const nlohmann::json& j, const std::string& context);

}  // namespace fpr
