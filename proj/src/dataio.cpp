#include "fpr/dataio.hpp"

#include <cstring>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace fpr {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t Dataset::sample_count() const {
  std::size_t n = 0;
  for (const Scene& scene : scenes) n += scene.samples.size();
  return n;
}

std::vector<const Sample*> Dataset::all_samples() const {
  std::vector<const Sample*> out;
  out.reserve(sample_count());
  for (const Scene& scene : scenes) {
    for (const Sample& sample : scene.samples) {
      out.push_back(&sample);
    }
  }
  return out;
}

const Sample& Dataset::sample(const std::string& id) const {
  for (const Scene& scene : scenes) {
    for (const Sample& sample : scene.samples) {
      if (sample.id == id) {
        return sample;
      }
    }
  }
  throw LookupError("dataset has no sample with id '" + id + "'");
}

PointCloud Dataset::load_cloud(const Sample& sample) const {
  return read_cloud(root / sample.lidar_file);
}

std::vector<Image> Dataset::load_images(const Sample& sample) const {
  std::vector<Image> images;
  images.reserve(sample.image_files.size());
  for (const std::string& file : sample.image_files) {
    images.push_back(read_ppm(root / file));
  }
  return images;
}

namespace {

constexpr char kCloudMagic[4] = {'F', 'P', 'R', '1'};

void put_u32_le(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32_le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

std::vector<char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

void write_cloud(const PointCloud& cloud, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(kCloudMagic, 4);
  put_u32_le(out, static_cast<std::uint32_t>(cloud.size()));
  std::vector<float> buffer;
  buffer.reserve(cloud.size() * 4);
  for (const Point& p : cloud.points) {
    buffer.push_back(static_cast<float>(p.x));
    buffer.push_back(static_cast<float>(p.y));
    buffer.push_back(static_cast<float>(p.z));
    buffer.push_back(static_cast<float>(p.intensity));
  }
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * 4));
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

PointCloud read_cloud(const fs::path& path) {
  const std::vector<char> bytes = read_file(path);
  if (bytes.size() < 4 ||
      std::memcmp(bytes.data(), kCloudMagic, 4) != 0) {
    throw FormatError("'" + path.string() +
                      "': bad magic at offset 0, expected \"FPR1\"");
  }
  if (bytes.size() < 8) {
    throw FormatError("'" + path.string() + "': truncated header: expected 8 "
                      "bytes, got " + std::to_string(bytes.size()));
  }
  const std::uint32_t count =
      get_u32_le(reinterpret_cast<const unsigned char*>(bytes.data() + 4));
  const std::size_t expected = 8 + static_cast<std::size_t>(count) * 16;
  if (bytes.size() != expected) {
    throw FormatError("'" + path.string() + "': expected " +
                      std::to_string(expected) + " bytes for " +
                      std::to_string(count) + " points, got " +
                      std::to_string(bytes.size()));
  }
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    float values[4];
    std::memcpy(values, bytes.data() + 8 + static_cast<std::size_t>(i) * 16,
                16);
    cloud.points.push_back(Point{values[0], values[1], values[2], values[3]});
  }
  return cloud;
}

void write_ppm(const Image& image, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<unsigned char> buffer;
  buffer.reserve(image.rgb.size());
  for (float v : image.rgb) {
    const float clamped = std::min(std::max(v, 0.0f), 1.0f);
    buffer.push_back(
        static_cast<unsigned char>(std::lround(clamped * 255.0f)));
  }
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size()));
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

namespace {

// Skips PPM whitespace and '#' comments; returns the next integer token.
int ppm_int(const std::vector<char>& bytes, std::size_t& pos,
            const std::string& path) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size() ||
      !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("'" + path + "': malformed PPM header at offset " +
                      std::to_string(pos));
  }
  int value = 0;
  while (pos < bytes.size() &&
         std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    value = value * 10 + (bytes[pos] - '0');
    ++pos;
  }
  return value;
}

}  // namespace

Image read_ppm(const fs::path& path) {
  const std::vector<char> bytes = read_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw FormatError("'" + path.string() +
                      "': bad magic at offset 0, expected \"P6\"");
  }
  std::size_t pos = 2;
  const int width = ppm_int(bytes, pos, path.string());
  const int height = ppm_int(bytes, pos, path.string());
  const int maxval = ppm_int(bytes, pos, path.string());
  if (width <= 0 || height <= 0 || maxval != 255) {
    throw FormatError("'" + path.string() + "': unsupported PPM header (" +
                      std::to_string(width) + "x" + std::to_string(height) +
                      ", maxval " + std::to_string(maxval) + ")");
  }
  ++pos;  // single whitespace byte after maxval
  const std::size_t expected = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() - pos != expected) {
    throw FormatError("'" + path.string() + "': expected " +
                      std::to_string(expected) + " pixel bytes, got " +
                      std::to_string(bytes.size() - pos));
  }
  Image image(width, height);
  for (std::size_t i = 0; i < expected; ++i) {
    image.rgb[i] =
        static_cast<float>(static_cast<unsigned char>(bytes[pos + i])) /
        255.0f;
  }
  return image;
}

json pose_to_json(const Pose& pose) {
  return json{{"t", {pose.translation.x(), pose.translation.y(),
                     pose.translation.z()}},
              {"q", {pose.rotation.w(), pose.rotation.x(), pose.rotation.y(),
                     pose.rotation.z()}}};
}

namespace {

const json& require_key(const json& j, const std::string& key,
                        const std::string& context) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw FormatError(context + ": missing field '" + key + "'");
  }
  return *it;
}

}  // namespace

Pose pose_from_json(const json& j, const std::string& context) {
  const json& t = require_key(j, "t", context);
  const json& q = require_key(j, "q", context);
  if (!t.is_array() || t.size() != 3 || !q.is_array() || q.size() != 4) {
    throw FormatError(context + ": pose needs t[3] and q[4]");
  }
  Pose pose;
  pose.translation = Eigen::Vector3d(t[0].get<double>(), t[1].get<double>(),
                                     t[2].get<double>());
  pose.rotation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                     q[2].get<double>(), q[3].get<double>());
  if (!pose.is_unit(1e-6)) {
    throw FormatError(context + ": pose quaternion is not unit length");
  }
  // Absorb round-off from sloppy writers; exactly-written quaternions keep
  // their bits so manifests round-trip unchanged.
  if (!pose.is_unit()) {
    pose.rotation.normalize();
  }
  return pose;
}

namespace {

json grid_to_json(const SphericalConfig& cfg) {
  return json{{"width", cfg.width},     {"height", cfg.height},
              {"fov_up", cfg.fov_up},   {"fov_down", cfg.fov_down},
              {"r_min", cfg.r_min},     {"r_max", cfg.r_max}};
}

SphericalConfig grid_from_json(const json& j, const std::string& context) {
  SphericalConfig cfg;
  cfg.width = require_key(j, "width", context).get<int>();
  cfg.height = require_key(j, "height", context).get<int>();
  cfg.fov_up = require_key(j, "fov_up", context).get<double>();
  cfg.fov_down = require_key(j, "fov_down", context).get<double>();
  cfg.r_min = require_key(j, "r_min", context).get<double>();
  cfg.r_max = require_key(j, "r_max", context).get<double>();
  if (!cfg.valid()) {
    throw FormatError(context + ": invalid spherical grid");
  }
  return cfg;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

json parse_json_file(const fs::path& path) {
  const std::vector<char> bytes = read_file(path);
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) {
    throw FormatError("'" + path.string() + "': not valid JSON");
  }
  return j;
}

}  // namespace

void write_manifest(const Dataset& dataset) {
  json rig = json::array();
  for (const RigCamera& cam : dataset.rig.cameras) {
    rig.push_back(json{{"name", cam.name},
                       {"fx", cam.intrinsics.fx},
                       {"fy", cam.intrinsics.fy},
                       {"cx", cam.intrinsics.cx},
                       {"cy", cam.intrinsics.cy},
                       {"width", cam.intrinsics.width},
                       {"height", cam.intrinsics.height},
                       {"t_ego_cam", pose_to_json(cam.t_ego_cam)}});
  }
  json scenes = json::array();
  for (const Scene& scene : dataset.scenes) {
    json samples = json::array();
    for (const Sample& sample : scene.samples) {
      samples.push_back(json{{"id", sample.id},
                             {"timestamp_us", sample.timestamp_us},
                             {"pose", pose_to_json(sample.pose)},
                             {"lidar_file", sample.lidar_file},
                             {"image_files", sample.image_files}});
    }
    scenes.push_back(json{{"id", scene.id},
                          {"date", format_date(scene.date)},
                          {"samples", std::move(samples)}});
  }
  const json manifest = {
      {"format_version", dataset.format_version},
      {"rig", {{"cameras", std::move(rig)}}},
      {"lidar",
       {{"t_ego_lidar", pose_to_json(dataset.t_ego_lidar)},
        {"lidar_grid", grid_to_json(dataset.lidar_grid)},
        {"camera_grid", grid_to_json(dataset.camera_grid)}}},
      {"scenes", std::move(scenes)}};
  write_text_file(dataset.root / "manifest.json", manifest.dump(2) + "\n");
}

Dataset load_dataset(const fs::path& root) {
  const fs::path manifest_path = root / "manifest.json";
  const json manifest = parse_json_file(manifest_path);
  const std::string ctx = manifest_path.string();

  Dataset dataset;
  dataset.root = root;
  dataset.format_version = require_key(manifest, "format_version", ctx).get<int>();
  if (dataset.format_version != kManifestFormatVersion) {
    throw FormatError(ctx + ": unsupported format_version " +
                      std::to_string(dataset.format_version) + " (expected " +
                      std::to_string(kManifestFormatVersion) + ")");
  }

  const json& rig = require_key(require_key(manifest, "rig", ctx), "cameras", ctx);
  for (const json& cam : rig) {
    RigCamera camera;
    camera.name = require_key(cam, "name", ctx).get<std::string>();
    camera.intrinsics.fx = require_key(cam, "fx", ctx).get<double>();
    camera.intrinsics.fy = require_key(cam, "fy", ctx).get<double>();
    camera.intrinsics.cx = require_key(cam, "cx", ctx).get<double>();
    camera.intrinsics.cy = require_key(cam, "cy", ctx).get<double>();
    camera.intrinsics.width = require_key(cam, "width", ctx).get<int>();
    camera.intrinsics.height = require_key(cam, "height", ctx).get<int>();
    camera.t_ego_cam = pose_from_json(require_key(cam, "t_ego_cam", ctx),
                                      ctx + ": t_ego_cam");
    dataset.rig.cameras.push_back(std::move(camera));
  }
  dataset.rig.validate();

  const json& lidar = require_key(manifest, "lidar", ctx);
  dataset.t_ego_lidar = pose_from_json(require_key(lidar, "t_ego_lidar", ctx),
                                       ctx + ": t_ego_lidar");
  dataset.lidar_grid =
      grid_from_json(require_key(lidar, "lidar_grid", ctx), ctx + ": lidar_grid");
  dataset.camera_grid = grid_from_json(require_key(lidar, "camera_grid", ctx),
                                       ctx + ": camera_grid");

  std::unordered_set<std::string> ids;
  for (const json& scene_json : require_key(manifest, "scenes", ctx)) {
    Scene scene;
    scene.id = require_key(scene_json, "id", ctx).get<std::string>();
    scene.date = parse_date(require_key(scene_json, "date", ctx).get<std::string>());
    std::int64_t last_ts = 0;
    for (const json& sample_json : require_key(scene_json, "samples", ctx)) {
      Sample sample;
      sample.id = require_key(sample_json, "id", ctx).get<std::string>();
      sample.scene_id = scene.id;
      sample.timestamp_us =
          require_key(sample_json, "timestamp_us", ctx).get<std::int64_t>();
      sample.pose = pose_from_json(require_key(sample_json, "pose", ctx),
                                   ctx + ": sample '" + sample.id + "' pose");
      sample.position = sample.pose.translation.head<2>();
      sample.lidar_file =
          require_key(sample_json, "lidar_file", ctx).get<std::string>();
      for (const json& f : require_key(sample_json, "image_files", ctx)) {
        sample.image_files.push_back(f.get<std::string>());
      }
      if (!ids.insert(sample.id).second) {
        throw FormatError(ctx + ": duplicate sample id '" + sample.id + "'");
      }
      if (!scene.samples.empty() && sample.timestamp_us <= last_ts) {
        throw FormatError(ctx + ": timestamps not strictly increasing in "
                          "scene '" + scene.id + "' at sample '" + sample.id +
                          "'");
      }
      last_ts = sample.timestamp_us;
      if (!fs::exists(root / sample.lidar_file)) {
        throw FormatError(ctx + ": missing LiDAR file '" + sample.lidar_file +
                          "' for sample '" + sample.id + "'");
      }
      for (const std::string& f : sample.image_files) {
        if (!fs::exists(root / f)) {
          throw FormatError(ctx + ": missing image file '" + f +
                            "' for sample '" + sample.id + "'");
        }
      }
      scene.samples.push_back(std::move(sample));
    }
    dataset.scenes.push_back(std::move(scene));
  }
  return dataset;
}

namespace {

json tuples_to_json(const std::vector<TrainingTuple>& tuples) {
  json out = json::array();
  for (const TrainingTuple& t : tuples) {
    out.push_back(json{{"query", t.query_id},
                       {"positives", t.positive_ids},
                       {"negatives", t.negative_ids}});
  }
  return out;
}

}  // namespace

void write_train_split(const TrainSplitFile& split, const fs::path& path) {
  const json j = {{"scheme", split.scheme},
                  {"params", split.params},
                  {"tuples", tuples_to_json(split.tuples)}};
  write_text_file(path, j.dump(2) + "\n");
}

TrainSplitFile read_train_split(const fs::path& path) {
  const json j = parse_json_file(path);
  const std::string ctx = path.string();
  TrainSplitFile split;
  split.scheme = require_key(j, "scheme", ctx).get<std::string>();
  if (split.scheme != "supervised" && split.scheme != "self-supervised") {
    throw FormatError(ctx + ": unknown scheme '" + split.scheme + "'");
  }
  split.params = require_key(j, "params", ctx);
  for (const json& t : require_key(j, "tuples", ctx)) {
    TrainingTuple tuple;
    tuple.query_id = require_key(t, "query", ctx).get<std::string>();
    for (const json& id : require_key(t, "positives", ctx)) {
      tuple.positive_ids.push_back(id.get<std::string>());
    }
    for (const json& id : require_key(t, "negatives", ctx)) {
      tuple.negative_ids.push_back(id.get<std::string>());
    }
    split.tuples.push_back(std::move(tuple));
  }
  return split;
}

void write_test_split(const TestSplitFile& split, const fs::path& path) {
  json queries = json::array();
  for (const TestQuery& q : split.queries) {
    queries.push_back(json{{"query", q.query_id}, {"gt", q.gt_ids}});
  }
  const json j = {{"params", split.params},
                  {"database", split.database_ids},
                  {"queries", std::move(queries)},
                  {"validation", split.validation_ids}};
  write_text_file(path, j.dump(2) + "\n");
}

TestSplitFile read_test_split(const fs::path& path) {
  const json j = parse_json_file(path);
  const std::string ctx = path.string();
  TestSplitFile split;
  split.params = require_key(j, "params", ctx);
  for (const json& id : require_key(j, "database", ctx)) {
    split.database_ids.push_back(id.get<std::string>());
  }
  for (const json& q : require_key(j, "queries", ctx)) {
    TestQuery query;
    query.query_id = require_key(q, "query", ctx).get<std::string>();
    for (const json& id : require_key(q, "gt", ctx)) {
      query.gt_ids.push_back(id.get<std::string>());
    }
    split.queries.push_back(std::move(query));
  }
  for (const json& id : require_key(j, "validation", ctx)) {
    split.validation_ids.push_back(id.get<std::string>());
  }
  return split;
}

}  // namespace fpr
