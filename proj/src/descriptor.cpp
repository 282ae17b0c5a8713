#include "fpr/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace fpr {

void DescriptorConfig::validate() const {
  if (dim <= 0 || rows <= 0 || range_bins <= 0) {
    throw ArgumentError("descriptor config: dim, rows, range_bins must be > 0");
  }
  if (!(0.0 < r_min && r_min < r_max)) {
    throw ArgumentError("descriptor config: require 0 < r_min < r_max");
  }
  if (!use_color && rows * range_bins != dim) {
    throw ArgumentError("descriptor config: rows * range_bins must equal dim");
  }
  if (use_color && dim % 2 != 0) {
    throw ArgumentError("descriptor config: color variant needs an even dim");
  }
}

namespace {

// Log-spaced bin index over [r_min, r_max], clamped to the last bin at r_max.
int range_bin(double r, double r_min, double r_max, int bins) {
  const double t = std::log(r / r_min) / std::log(r_max / r_min);
  const int b = static_cast<int>(std::floor(t * bins));
  return std::clamp(b, 0, bins - 1);
}

// Hue in [0, 1); black and gray pixels report no hue.
bool pixel_hue(double r, double g, double b, double& hue) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double chroma = mx - mn;
  if (mx <= 0.0 || chroma <= 0.0) {
    return false;
  }
  double h;
  if (mx == r) {
    h = std::fmod((g - b) / chroma, 6.0);
    if (h < 0.0) h += 6.0;
  } else if (mx == g) {
    h = (b - r) / chroma + 2.0;
  } else {
    h = (r - g) / chroma + 4.0;
  }
  hue = h / 6.0;
  return true;
}

Descriptor finalize(std::vector<double> hist) {
  double norm2 = 0.0;
  for (double v : hist) norm2 += v * v;
  const double norm = std::sqrt(norm2);
  Descriptor out;
  out.values.reserve(hist.size());
  for (double v : hist) {
    out.values.push_back(
        static_cast<float>(norm > 0.0 ? v / norm : 0.0));
  }
  return out;
}

}  // namespace

Descriptor extract_baseline(const RangeImage& img,
                            const DescriptorConfig& cfg) {
  cfg.validate();
  if (!cfg.use_color) {
    if (img.height() != cfg.rows) {
      throw ShapeError("extract_baseline: image has " +
                       std::to_string(img.height()) + " rows, config expects " +
                       std::to_string(cfg.rows));
    }
    std::vector<double> hist(static_cast<std::size_t>(cfg.dim), 0.0);
    for (int v = 0; v < img.height(); ++v) {
      for (int u = 0; u < img.width(); ++u) {
        if (!img.valid(u, v)) {
          continue;
        }
        const int b =
            range_bin(img.range(u, v), cfg.r_min, cfg.r_max, cfg.range_bins);
        hist[static_cast<std::size_t>(v) * cfg.range_bins + b] += 1.0;
      }
    }
    return finalize(std::move(hist));
  }

  // Color variant: global range histogram plus hue histogram, half the
  // dimension each.
  if (img.channels() != 4) {
    throw ShapeError("extract_baseline: color variant needs a 4-channel image");
  }
  const int half = cfg.dim / 2;
  std::vector<double> hist(static_cast<std::size_t>(cfg.dim), 0.0);
  for (int v = 0; v < img.height(); ++v) {
    for (int u = 0; u < img.width(); ++u) {
      if (!img.valid(u, v)) {
        continue;
      }
      hist[range_bin(img.range(u, v), cfg.r_min, cfg.r_max, half)] += 1.0;
      double hue;
      if (pixel_hue(img.at(u, v, 1), img.at(u, v, 2), img.at(u, v, 3), hue)) {
        const int hb = std::clamp(static_cast<int>(std::floor(hue * half)), 0,
                                  half - 1);
        hist[static_cast<std::size_t>(half) + hb] += 1.0;
      }
    }
  }
  return finalize(std::move(hist));
}

void DescriptorSet::insert(const std::string& id, Descriptor descriptor) {
  if (dim_ < 0) {
    dim_ = descriptor.dim();
  } else if (descriptor.dim() != dim_) {
    throw ShapeError("DescriptorSet: descriptor for '" + id + "' has dim " +
                     std::to_string(descriptor.dim()) + ", set has dim " +
                     std::to_string(dim_));
  }
  if (!index_.emplace(id, ids_.size()).second) {
    throw LookupError("DescriptorSet: duplicate id '" + id + "'");
  }
  ids_.push_back(id);
  descriptors_.push_back(std::move(descriptor));
}

bool DescriptorSet::contains(const std::string& id) const {
  return index_.count(id) > 0;
}

const Descriptor& DescriptorSet::at(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw LookupError("DescriptorSet: no descriptor for id '" + id + "'");
  }
  return descriptors_[it->second];
}

bool DescriptorSet::operator==(const DescriptorSet& other) const {
  if (ids_ != other.ids_) {
    return false;
  }
  for (std::size_t i = 0; i < descriptors_.size(); ++i) {
    if (descriptors_[i].values != other.descriptors_[i].values) {
      return false;
    }
  }
  return true;
}

namespace {

constexpr char kDescriptorMagic[4] = {'F', 'P', 'R', 'D'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

void put_u16(std::ostream& out, std::uint16_t v) {
  const unsigned char bytes[2] = {static_cast<unsigned char>(v & 0xff),
                                  static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 2);
}

}  // namespace

void export_descriptors(const DescriptorSet& set,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(kDescriptorMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(set.size()));
  put_u32(out, static_cast<std::uint32_t>(set.size() == 0
                                              ? std::max(set.dim(), 0)
                                              : set.dim()));
  for (const std::string& id : set.ids()) {
    if (id.size() > 0xffff) {
      throw FormatError("descriptor id '" + id.substr(0, 32) +
                        "...' exceeds 65535 bytes");
    }
    put_u16(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    const Descriptor& d = set.at(id);
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(d.values.data()),
              static_cast<std::streamsize>(d.values.size() * 4));
  }
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

namespace {

class BinaryReader {
 public:
  BinaryReader(std::istream& in, const std::string& path)
      : in_(in), path_(path) {}

  std::size_t offset() const { return offset_; }

  void read(void* dst, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError("'" + path_ + "': truncated reading " + what +
                        " at offset " + std::to_string(offset_) + ": expected " +
                        std::to_string(n) + " bytes, got " +
                        std::to_string(in_.gcount()));
    }
    offset_ += n;
  }

  std::uint32_t u32(const char* what) {
    unsigned char b[4];
    read(b, 4, what);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  std::uint16_t u16(const char* what) {
    unsigned char b[2];
    read(b, 2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }

 private:
  std::istream& in_;
  std::string path_;
  std::size_t offset_ = 0;
};

}  // namespace

DescriptorSet import_descriptors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  BinaryReader reader(in, path.string());
  char magic[4];
  reader.read(magic, 4, "magic");
  if (std::memcmp(magic, kDescriptorMagic, 4) != 0) {
    throw FormatError("'" + path.string() +
                      "': bad magic at offset 0, expected \"FPRD\"");
  }
  const std::uint32_t count = reader.u32("descriptor count");
  const std::uint32_t dim = reader.u32("descriptor dim");
  DescriptorSet set;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t id_len = reader.u16("id length");
    std::string id(id_len, '\0');
    reader.read(id.data(), id_len, "id");
    Descriptor d;
    d.values.resize(dim);
    reader.read(d.values.data(), static_cast<std::size_t>(dim) * 4, "values");
    try {
      set.insert(id, std::move(d));
    } catch (const LookupError&) {
      throw FormatError("'" + path.string() + "': duplicate id '" + id +
                        "' at offset " + std::to_string(reader.offset()));
    }
  }
  if (!reader.at_eof()) {
    throw FormatError("'" + path.string() + "': trailing bytes at offset " +
                      std::to_string(reader.offset()));
  }
  return set;
}

}  // namespace fpr
