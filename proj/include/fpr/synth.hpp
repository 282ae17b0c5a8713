#pragma once

#include <array>
#include <cstdint>

#include "fpr/dataio.hpp"

namespace fpr {

/// One colored landmark in the synthetic world. The per-point intensity of
/// generated clouds encodes the landmark index, which lets tests recover the
/// ground-truth color of any point.
struct Landmark {
  int id = 0;
  Eigen::Vector3d position{0.0, 0.0, 0.0};  // world frame
  std::array<int, 3> rgb{0, 0, 0};          // 8-bit palette color
};

/// Synthetic world parameters. Scenes drive smooth noisy loops around
/// landmark sites; a seeded fraction of later scenes re-traverses the first
/// site's loop within the positive distance threshold, producing revisits.
/// Scene dates advance by date_step_days so a 105-day threshold lands inside
/// the schedule.
struct SynthParams {
  std::uint64_t seed = 0;
  int num_scenes = 8;
  int samples_per_scene = 80;
  std::int64_t sample_period_us = 500000;  // 2 Hz
  int landmarks_per_site = 64;
  std::vector<std::array<int, 3>> palette = {
      {230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},
      {245, 130, 48}, {145, 30, 180}, {70, 240, 240}, {240, 50, 230}};
  double revisit_rate = 0.5;
  Date start_date = Date{17541};  // 2018-01-10
  int date_step_days = 30;
  bool write_images = true;

  void validate() const;
};

struct SynthResult {
  Dataset dataset;
  std::vector<Landmark> landmarks;
};

/// Writes a complete dataset (manifest, clouds, images, landmark table)
/// under `out`. Generation is single-threaded and fully seeded: the same
/// params produce byte-identical datasets.
SynthResult generate_synthetic(const SynthParams& params,
                               const std::filesystem::path& out);

/// Reads the landmark table written next to a generated manifest.
std::vector<Landmark> read_landmarks(const std::filesystem::path& root);

}  // namespace fpr
