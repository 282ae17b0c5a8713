#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "fpr/losses.hpp"

namespace fpr {

/// Baseline extractor configuration. The geometric baseline histograms each
/// elevation row's valid ranges into log-spaced bins and flattens row-major,
/// so the descriptor ignores azimuth entirely (yaw invariance). The color
/// variant replaces it with a global 128-bin range histogram plus a 128-bin
/// hue histogram.
struct DescriptorConfig {
  int dim = kDescriptorDim;
  int rows = 32;
  int range_bins = 8;
  double r_min = 1.0;
  double r_max = 100.0;
  bool use_color = false;

  void validate() const;
};

Descriptor extract_baseline(const RangeImage& img, const DescriptorConfig& cfg);

/// Id-keyed descriptor collection with a uniform dimension. Iteration order
/// is insertion order, which the binary format preserves.
class DescriptorSet {
 public:
  DescriptorSet() = default;
  explicit DescriptorSet(int dim) : dim_(dim) {}

  void insert(const std::string& id, Descriptor descriptor);
  bool contains(const std::string& id) const;
  const Descriptor& at(const std::string& id) const;

  int dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  bool operator==(const DescriptorSet& other) const;

 private:
  int dim_ = -1;  // -1 until the first insert fixes it
  std::vector<std::string> ids_;
  std::vector<Descriptor> descriptors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Binary descriptor file: magic "FPRD", little-endian u32 count, u32 dim,
/// then per record u16 id byte length, the UTF-8 id, and dim float32 values.
void export_descriptors(const DescriptorSet& set,
                        const std::filesystem::path& path);
DescriptorSet import_descriptors(const std::filesystem::path& path);

}  // namespace fpr
