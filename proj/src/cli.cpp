#include "fpr/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <unordered_set>

#include "fpr/dataio.hpp"
#include "fpr/descriptor.hpp"
#include "fpr/losses.hpp"
#include "fpr/parallel.hpp"
#include "fpr/retrieval.hpp"
#include "fpr/synth.hpp"

namespace fpr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void emit_error(const std::string& type, const std::string& message) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump()
            << "\n";
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) {
    return flag_value;
  }
  if (const char* env = std::getenv("FPR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) {
      return n;
    }
  }
  return 1;
}

/// gamma given either as an ISO date or as a day offset from the earliest
/// scene date ("105 days" without an anchor).
Date resolve_gamma(const Dataset& dataset, const std::string& gamma_iso,
                   int gamma_days) {
  if (!gamma_iso.empty()) {
    return parse_date(gamma_iso);
  }
  if (dataset.scenes.empty()) {
    throw ArgumentError("dataset has no scenes; pass --gamma explicitly");
  }
  Date earliest = dataset.scenes.front().date;
  for (const Scene& scene : dataset.scenes) {
    earliest = std::min(earliest, scene.date);
  }
  return earliest + gamma_days;
}

std::vector<int> parse_topk(const std::string& arg) {
  std::vector<int> ks;
  std::size_t pos = 0;
  while (pos < arg.size()) {
    std::size_t next = arg.find(',', pos);
    if (next == std::string::npos) {
      next = arg.size();
    }
    const std::string token = arg.substr(pos, next - pos);
    try {
      ks.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw ArgumentError("bad --topk entry '" + token + "'");
    }
    pos = next + 1;
  }
  if (ks.empty() || !std::is_sorted(ks.begin(), ks.end()) || ks.front() < 1) {
    throw ArgumentError("--topk must be an ascending list of integers >= 1");
  }
  return ks;
}

DescriptorConfig baseline_config(const Dataset& dataset, bool use_color) {
  DescriptorConfig cfg;
  cfg.use_color = use_color;
  cfg.rows = dataset.lidar_grid.height;
  if (!use_color) {
    if (cfg.dim % cfg.rows != 0) {
      throw ArgumentError("descriptor dim " + std::to_string(cfg.dim) +
                          " is not divisible by the grid height " +
                          std::to_string(cfg.rows));
    }
    cfg.range_bins = cfg.dim / cfg.rows;
  }
  cfg.r_min = dataset.lidar_grid.r_min;
  cfg.r_max = dataset.lidar_grid.r_max;
  return cfg;
}

Descriptor describe_sample(const Dataset& dataset, const Sample& sample,
                           const DescriptorConfig& cfg) {
  const PointCloud cloud = dataset.load_cloud(sample);
  if (!cfg.use_color) {
    return extract_baseline(spherical_projection(cloud, dataset.lidar_grid),
                            cfg);
  }
  const std::vector<Image> images = dataset.load_images(sample);
  const ColoredPointCloud colored =
      colorize_cloud(cloud, images, dataset.rig, dataset.t_ego_lidar);
  return extract_baseline(rendered_range_image(colored, dataset.lidar_grid),
                          cfg);
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  SynthParams params;
  std::string start_date = "2018-01-10";
  bool no_images = false;
};

int run_synth(const SynthArgs& args) {
  SynthParams params = args.params;
  params.start_date = parse_date(args.start_date);
  params.write_images = !args.no_images;
  const SynthResult result = generate_synthetic(params, args.out);
  std::cout << json{{"dataset", args.out},
                    {"scenes", result.dataset.scenes.size()},
                    {"samples", result.dataset.sample_count()},
                    {"landmarks", result.landmarks.size()},
                    {"seed", params.seed}}
                   .dump()
            << "\n";
  return 0;
}

// ---- split ----------------------------------------------------------------

struct SplitArgs {
  std::string dataset;
  std::string out;
  std::string gamma_iso;
  int gamma_days = 105;
  double rho_pos = 9.0;
  int n_pos = 2;
  int n_neg = 4;
  std::uint64_t seed = 0;
  double val_fraction = 0.0;
  // supervised only
  double delta = 1.0;
  double rho_neg = 18.0;
  // self-supervised only
  int sigma_neg = 6;
  std::string mode = "faithful";
};

json supervised_params_json(const SupervisedParams& p) {
  return json{{"scheme", "supervised"},
              {"delta", p.delta},
              {"gamma", format_date(p.gamma)},
              {"rho_pos", p.rho_pos},
              {"rho_neg", p.rho_neg},
              {"n_pos", p.n_pos},
              {"n_neg", p.n_neg},
              {"seed", p.seed},
              {"val_fraction", p.val_fraction}};
}

json selfsupervised_params_json(const SelfSupervisedParams& p) {
  return json{{"scheme", "self-supervised"},
              {"gamma", format_date(p.gamma)},
              {"rho_pos", p.rho_pos},
              {"sigma_neg", p.sigma_neg},
              {"n_pos", p.n_pos},
              {"n_neg", p.n_neg},
              {"seed", p.seed},
              {"mode",
               p.mode == SelfSupervisedMode::kFaithful ? "faithful"
                                                       : "sanitized"},
              {"val_fraction", p.val_fraction}};
}

std::vector<std::string> ids_of(const std::vector<TestQuery>& queries) {
  std::vector<std::string> out;
  out.reserve(queries.size());
  for (const TestQuery& q : queries) {
    out.push_back(q.query_id);
  }
  return out;
}

int run_split_supervised(const SplitArgs& args) {
  const Dataset dataset = load_dataset(args.dataset);
  SupervisedParams params;
  params.delta = args.delta;
  params.gamma = resolve_gamma(dataset, args.gamma_iso, args.gamma_days);
  params.rho_pos = args.rho_pos;
  params.rho_neg = args.rho_neg;
  params.n_pos = args.n_pos;
  params.n_neg = args.n_neg;
  params.seed = args.seed;
  params.val_fraction = args.val_fraction;
  params.validate();

  const SupervisedSplit split = split_supervised(dataset.scenes, params);
  MiningSummary summary;
  std::vector<TrainingTuple> tuples = mine_supervised(split, params, &summary);
  std::vector<TestQuery> test_set =
      ground_truth(split.test_queries, split.database, params.rho_pos);
  std::vector<TestQuery> validation, test;
  split_validation(test_set, params.val_fraction, params.seed, validation,
                   test);

  fs::create_directories(args.out);
  const json params_json = supervised_params_json(params);

  TrainSplitFile train;
  train.scheme = "supervised";
  train.params = params_json;
  train.tuples = std::move(tuples);
  const fs::path train_path = fs::path(args.out) / "train_supervised.json";
  write_train_split(train, train_path);

  TestSplitFile test_file;
  test_file.params = params_json;
  for (const Sample& s : split.database) {
    test_file.database_ids.push_back(s.id);
  }
  test_file.queries = std::move(test_set);
  test_file.validation_ids = ids_of(validation);
  const fs::path test_path = fs::path(args.out) / "test_supervised.json";
  write_test_split(test_file, test_path);

  std::cout << json{{"scheme", "supervised"},
                    {"database", split.database.size()},
                    {"train_queries", split.train_queries.size()},
                    {"test_queries", split.test_queries.size()},
                    {"tuples", train.tuples.size()},
                    {"skipped_few_positives", summary.skipped_few_positives},
                    {"skipped_few_negatives", summary.skipped_few_negatives},
                    {"validation", test_file.validation_ids.size()},
                    {"train_file", train_path.string()},
                    {"test_file", test_path.string()}}
                   .dump()
            << "\n";
  return 0;
}

int run_split_selfsupervised(const SplitArgs& args) {
  const Dataset dataset = load_dataset(args.dataset);
  SelfSupervisedParams params;
  params.gamma = resolve_gamma(dataset, args.gamma_iso, args.gamma_days);
  params.rho_pos = args.rho_pos;
  params.sigma_neg = args.sigma_neg;
  params.n_pos = args.n_pos;
  params.n_neg = args.n_neg;
  params.seed = args.seed;
  params.val_fraction = args.val_fraction;
  if (args.mode == "faithful") {
    params.mode = SelfSupervisedMode::kFaithful;
  } else if (args.mode == "sanitized") {
    params.mode = SelfSupervisedMode::kSanitized;
  } else {
    throw ArgumentError("--mode must be 'faithful' or 'sanitized'");
  }
  params.validate();

  std::vector<Scene> old_scenes, new_scenes;
  split_selfsupervised(dataset.scenes, params, old_scenes, new_scenes);
  SelfSupervisedMining mining = mine_selfsupervised(old_scenes, params);

  std::vector<Sample> new_samples;
  for (const Scene& scene : new_scenes) {
    new_samples.insert(new_samples.end(), scene.samples.begin(),
                       scene.samples.end());
  }
  std::vector<TestQuery> test_set =
      ground_truth(new_samples, mining.old_samples, params.rho_pos);
  std::vector<TestQuery> validation, test;
  split_validation(test_set, params.val_fraction, params.seed, validation,
                   test);

  fs::create_directories(args.out);
  const json params_json = selfsupervised_params_json(params);

  TrainSplitFile train;
  train.scheme = "self-supervised";
  train.params = params_json;
  train.tuples = std::move(mining.tuples);
  const fs::path train_path =
      fs::path(args.out) / "train_self-supervised.json";
  write_train_split(train, train_path);

  TestSplitFile test_file;
  test_file.params = params_json;
  for (const Sample& s : mining.old_samples) {
    test_file.database_ids.push_back(s.id);
  }
  test_file.queries = std::move(test_set);
  test_file.validation_ids = ids_of(validation);
  const fs::path test_path = fs::path(args.out) / "test_self-supervised.json";
  write_test_split(test_file, test_path);

  std::cout << json{{"scheme", "self-supervised"},
                    {"old_scenes", old_scenes.size()},
                    {"new_scenes", new_scenes.size()},
                    {"scenes_too_short", mining.scenes_too_short},
                    {"database", test_file.database_ids.size()},
                    {"test_queries", test_file.queries.size()},
                    {"tuples", train.tuples.size()},
                    {"validation", test_file.validation_ids.size()},
                    {"train_file", train_path.string()},
                    {"test_file", test_path.string()}}
                   .dump()
            << "\n";
  return 0;
}

// ---- render ---------------------------------------------------------------

Image range_to_gray(const RangeImage& img, double r_min, double r_max) {
  Image out(img.width(), img.height());
  for (int v = 0; v < img.height(); ++v) {
    for (int u = 0; u < img.width(); ++u) {
      if (!img.valid(u, v)) {
        continue;
      }
      const double t =
          std::clamp((img.range(u, v) - r_min) / (r_max - r_min), 0.0, 1.0);
      const float gray = static_cast<float>(0.15 + 0.85 * (1.0 - t));
      out.at(u, v, 0) = gray;
      out.at(u, v, 1) = gray;
      out.at(u, v, 2) = gray;
    }
  }
  return out;
}

Image rendered_to_rgb(const RangeImage& img) {
  Image out(img.width(), img.height());
  for (int v = 0; v < img.height(); ++v) {
    for (int u = 0; u < img.width(); ++u) {
      if (!img.valid(u, v)) {
        continue;
      }
      out.at(u, v, 0) = static_cast<float>(img.at(u, v, 1));
      out.at(u, v, 1) = static_cast<float>(img.at(u, v, 2));
      out.at(u, v, 2) = static_cast<float>(img.at(u, v, 3));
    }
  }
  return out;
}

struct RenderArgs {
  std::string dataset;
  std::string sample_id;
  std::string out;
};

int run_render(const RenderArgs& args) {
  const Dataset dataset = load_dataset(args.dataset);
  const Sample& sample = dataset.sample(args.sample_id);
  const PointCloud cloud = dataset.load_cloud(sample);
  fs::create_directories(args.out);
  const fs::path out(args.out);
  json files = json::array();

  const auto emit = [&](const Image& image, const std::string& name) {
    const fs::path path = out / (sample.id + "_" + name + ".ppm");
    write_ppm(image, path);
    files.push_back(path.string());
  };

  // Raw LiDAR range panorama.
  const RangeImage range_img = spherical_projection(cloud, dataset.lidar_grid);
  emit(range_to_gray(range_img, dataset.lidar_grid.r_min,
                     dataset.lidar_grid.r_max),
       "range");

  // Sparse depth targets, holistic range image from the pseudo depth maps.
  const SparseDepthTargets targets =
      render_sparse_depth(cloud, dataset.rig, dataset.t_ego_lidar);
  const std::vector<DepthMap> depth_maps = depth_maps_from_targets(targets);
  const RangeImage holistic = depth_maps_to_lidar_range(
      depth_maps, dataset.rig, dataset.t_ego_lidar, dataset.camera_grid);
  emit(range_to_gray(holistic, dataset.camera_grid.r_min,
                     dataset.camera_grid.r_max),
       "holistic");

  if (!sample.image_files.empty()) {
    const std::vector<Image> images = dataset.load_images(sample);
    // Per-camera overlay: targets colored near=red, far=blue.
    for (std::size_t c = 0; c < images.size(); ++c) {
      Image overlay = images[c];
      for (const DepthTarget& t : targets.cameras[c].targets) {
        const float s = static_cast<float>(
            std::clamp(t.d / dataset.lidar_grid.r_max, 0.0, 1.0));
        overlay.at(t.u, t.v, 0) = 1.0f - s;
        overlay.at(t.u, t.v, 1) = 0.1f;
        overlay.at(t.u, t.v, 2) = s;
      }
      emit(overlay, "overlay_" + dataset.rig.cameras[c].name);
    }
    const ColoredPointCloud colored =
        colorize_cloud(cloud, images, dataset.rig, dataset.t_ego_lidar);
    emit(rendered_to_rgb(rendered_range_image(colored, dataset.lidar_grid)),
         "rendered");
  }

  std::cout << json{{"sample", sample.id}, {"files", std::move(files)}}.dump()
            << "\n";
  return 0;
}

// ---- describe ---------------------------------------------------------------

struct DescribeArgs {
  std::string dataset;
  std::string method = "baseline";
  std::string out;
  std::string input;
  bool use_color = false;
  int threads = 0;
};

int run_describe(const DescribeArgs& args) {
  const Dataset dataset = load_dataset(args.dataset);
  const std::vector<const Sample*> samples = dataset.all_samples();
  DescriptorSet set;

  if (args.method == "baseline") {
    const DescriptorConfig cfg = baseline_config(dataset, args.use_color);
    std::vector<Descriptor> results(samples.size());
    parallel_for(samples.size(), resolve_threads(args.threads),
                 [&](std::size_t i) {
                   results[i] = describe_sample(dataset, *samples[i], cfg);
                 });
    for (std::size_t i = 0; i < samples.size(); ++i) {
      set.insert(samples[i]->id, std::move(results[i]));
    }
  } else if (args.method == "import") {
    if (args.input.empty()) {
      throw ArgumentError("describe --method import requires --input");
    }
    set = import_descriptors(args.input);
    for (const Sample* sample : samples) {
      if (!set.contains(sample->id)) {
        throw LookupError("imported descriptors are missing sample '" +
                          sample->id + "'");
      }
    }
  } else {
    throw ArgumentError("--method must be 'baseline' or 'import'");
  }

  export_descriptors(set, args.out);
  std::cout << json{{"method", args.method},
                    {"descriptors", set.size()},
                    {"dim", set.dim()},
                    {"file", args.out}}
                   .dump()
            << "\n";
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string descriptors;
  std::string split;
  std::string topk = "1,5,10,20";
  std::string out;
  std::string csv;
  std::string subset = "test";
};

int run_evaluate(const EvaluateArgs& args) {
  const std::vector<int> ks = parse_topk(args.topk);
  const DescriptorSet set = import_descriptors(args.descriptors);
  const TestSplitFile split = read_test_split(args.split);

  std::vector<TestQuery> queries;
  if (args.subset == "all") {
    queries = split.queries;
  } else if (args.subset == "test" || args.subset == "validation") {
    const std::unordered_set<std::string> val(split.validation_ids.begin(),
                                              split.validation_ids.end());
    const bool keep_val = args.subset == "validation";
    for (const TestQuery& q : split.queries) {
      if ((val.count(q.query_id) > 0) == keep_val) {
        queries.push_back(q);
      }
    }
  } else {
    throw ArgumentError("--subset must be 'test', 'validation' or 'all'");
  }

  const RetrievalIndex index = RetrievalIndex::build(set, split.database_ids);
  const RecallReport report = evaluate_recall(index, queries, set, ks);

  json recall_json = json::object();
  for (const auto& [k, ar] : report.recalls) {
    recall_json[std::to_string(k)] = ar;
  }
  json per_query = json::array();
  for (const PerQueryResult& r : report.per_query) {
    per_query.push_back(json{
        {"id", r.query_id},
        {"rank", r.rank_of_first_hit ? json(*r.rank_of_first_hit)
                                     : json(nullptr)}});
  }
  const json report_json = {{"n_query", report.n_query},
                            {"excluded_empty_gt", report.excluded_empty_gt},
                            {"recall", recall_json},
                            {"per_query", std::move(per_query)}};
  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) {
      throw IoError("cannot open '" + args.out + "' for writing");
    }
    out << report_json.dump(2) << "\n";
  }
  if (!args.csv.empty()) {
    std::ofstream csv(args.csv, std::ios::binary);
    if (!csv) {
      throw IoError("cannot open '" + args.csv + "' for writing");
    }
    csv << "x,AR\n";
    for (const auto& [k, ar] : report.recalls) {
      csv << k << "," << ar << "\n";
    }
  }
  std::cout << json{{"n_query", report.n_query},
                    {"excluded_empty_gt", report.excluded_empty_gt},
                    {"recall", recall_json}}
                   .dump()
            << "\n";
  return 0;
}

// ---- loss -------------------------------------------------------------------

struct LossArgs {
  std::string dataset;
  std::string split;
  std::string tuple_id;
  double alpha = 0.5;
  double lambda_d = 0.01;
  double lambda_t = 1.00;
  double lambda_r = 0.01;
  bool hinge = false;
  bool mean = false;
  std::string depth_source = "query";
};

int run_loss(const LossArgs& args) {
  const Dataset dataset = load_dataset(args.dataset);
  const TrainSplitFile split = read_train_split(args.split);
  const TrainingTuple* tuple = nullptr;
  for (const TrainingTuple& t : split.tuples) {
    if (t.query_id == args.tuple_id) {
      tuple = &t;
      break;
    }
  }
  if (tuple == nullptr) {
    throw LookupError("split has no tuple with query id '" + args.tuple_id +
                      "'");
  }
  if (args.depth_source != "query" && args.depth_source != "positive") {
    throw ArgumentError("--depth-source must be 'query' or 'positive'");
  }

  const DescriptorConfig cfg = baseline_config(dataset, false);
  const auto descriptor_of = [&](const std::string& id) {
    return describe_sample(dataset, dataset.sample(id), cfg);
  };
  const Descriptor desc_q = descriptor_of(tuple->query_id);
  std::vector<Descriptor> desc_pos, desc_neg;
  for (const std::string& id : tuple->positive_ids) {
    desc_pos.push_back(descriptor_of(id));
  }
  for (const std::string& id : tuple->negative_ids) {
    desc_neg.push_back(descriptor_of(id));
  }
  const double lt =
      triplet_loss(desc_q, desc_pos, desc_neg, args.alpha, args.hinge);

  const Sample& query = dataset.sample(tuple->query_id);
  const Sample& positive = dataset.sample(tuple->positive_ids.front());
  const PointCloud cloud_q = dataset.load_cloud(query);
  const PointCloud cloud_p = dataset.load_cloud(positive);
  const Pose t_l =
      relative_lidar_pose(query.pose, positive.pose, dataset.t_ego_lidar);
  const double lr = reprojection_loss(cloud_p, cloud_q, t_l,
                                      dataset.lidar_grid, args.mean);

  const SparseDepthTargets targets =
      render_sparse_depth(cloud_q, dataset.rig, dataset.t_ego_lidar);
  const std::vector<DepthMap> maps = depth_maps_from_targets(
      args.depth_source == "query"
          ? targets
          : render_sparse_depth(transform_points(cloud_p, t_l), dataset.rig,
                                dataset.t_ego_lidar));
  const double ld = depth_loss(targets, maps, args.mean);

  const LossWeights weights{args.lambda_d, args.lambda_t, args.lambda_r,
                            args.alpha};
  std::cout << json{{"query", tuple->query_id},
                    {"L_d", ld},
                    {"L_t", lt},
                    {"L_r", lr},
                    {"L_all", total_loss(ld, lt, lr, weights)},
                    {"params",
                     {{"alpha", args.alpha},
                      {"lambda_d", args.lambda_d},
                      {"lambda_t", args.lambda_t},
                      {"lambda_r", args.lambda_r},
                      {"hinge", args.hinge},
                      {"mean", args.mean},
                      {"depth_source", args.depth_source}}}}
                   .dump()
            << "\n";
  return 0;
}

void add_gamma_flags(CLI::App* cmd, SplitArgs& args) {
  cmd->add_option("--gamma", args.gamma_iso,
                  "Date threshold as YYYY-MM-DD (overrides --gamma-days)");
  cmd->add_option("--gamma-days", args.gamma_days,
                  "Days after the earliest scene date")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Multi-modal place recognition benchmark toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--out", synth_args.out, "Output dataset directory")
      ->required();
  synth->add_option("--scenes", synth_args.params.num_scenes, "Scene count")
      ->capture_default_str();
  synth
      ->add_option("--samples-per-scene", synth_args.params.samples_per_scene,
                   "Samples per scene")
      ->capture_default_str();
  synth->add_option("--seed", synth_args.params.seed, "Generator seed")
      ->capture_default_str();
  synth
      ->add_option("--revisit-rate", synth_args.params.revisit_rate,
                   "Fraction of later scenes re-traversing the first loop")
      ->capture_default_str();
  synth
      ->add_option("--landmarks", synth_args.params.landmarks_per_site,
                   "Landmarks per site")
      ->capture_default_str();
  synth
      ->add_option("--sample-period-us", synth_args.params.sample_period_us,
                   "Sample period in microseconds")
      ->capture_default_str();
  synth
      ->add_option("--start-date", synth_args.start_date,
                   "Date of the first scene (YYYY-MM-DD)")
      ->capture_default_str();
  synth
      ->add_option("--date-step-days", synth_args.params.date_step_days,
                   "Days between consecutive scene dates")
      ->capture_default_str();
  synth->add_flag("--no-images", synth_args.no_images,
                  "Skip camera image synthesis");

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Organize train/test splits");
  split->require_subcommand(1);
  auto* supervised =
      split->add_subcommand("supervised", "Distance-metric organization");
  auto* selfsup = split->add_subcommand("self-supervised",
                                        "Time-metric organization");
  for (CLI::App* cmd : {supervised, selfsup}) {
    cmd->add_option("--dataset", split_args.dataset, "Dataset directory")
        ->required();
    cmd->add_option("--out", split_args.out, "Output directory")->required();
    add_gamma_flags(cmd, split_args);
    cmd->add_option("--rho-pos", split_args.rho_pos,
                    "Positive distance threshold, meters")
        ->capture_default_str();
    cmd->add_option("--n-pos", split_args.n_pos, "Positives per query")
        ->capture_default_str();
    cmd->add_option("--n-neg", split_args.n_neg, "Negatives per query")
        ->capture_default_str();
    cmd->add_option("--seed", split_args.seed, "Mining seed")
        ->capture_default_str();
    cmd->add_option("--val-fraction", split_args.val_fraction,
                    "Fraction of test queries held out for validation")
        ->capture_default_str();
  }
  supervised
      ->add_option("--delta", split_args.delta,
                   "Database admission interval, meters")
      ->capture_default_str();
  supervised
      ->add_option("--rho-neg", split_args.rho_neg,
                   "Negative distance threshold, meters")
      ->capture_default_str();
  selfsup
      ->add_option("--sigma-neg", split_args.sigma_neg,
                   "Negative time threshold, samples")
      ->capture_default_str();
  selfsup
      ->add_option("--mode", split_args.mode,
                   "Negative buffer bookkeeping: faithful|sanitized")
      ->capture_default_str();

  RenderArgs render_args;
  auto* render =
      app.add_subcommand("render", "Emit interaction artifacts as images");
  render->add_option("--dataset", render_args.dataset, "Dataset directory")
      ->required();
  render->add_option("--sample", render_args.sample_id, "Sample id")
      ->required();
  render->add_option("--out", render_args.out, "Output directory")->required();

  DescribeArgs describe_args;
  auto* describe =
      app.add_subcommand("describe", "Extract or import descriptors");
  describe->add_option("--dataset", describe_args.dataset, "Dataset directory")
      ->required();
  describe
      ->add_option("--method", describe_args.method,
                   "Descriptor source: baseline|import")
      ->capture_default_str();
  describe->add_option("--out", describe_args.out, "Output descriptor file")
      ->required();
  describe->add_option("--input", describe_args.input,
                       "Descriptor file to import (for --method import)");
  describe->add_flag("--use-color", describe_args.use_color,
                     "Color-augmented baseline (needs camera images)");
  describe
      ->add_option("--threads", describe_args.threads,
                   "Worker threads (default: FPR_THREADS or 1)")
      ->capture_default_str();

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "Compute average recall");
  evaluate
      ->add_option("--descriptors", evaluate_args.descriptors,
                   "Descriptor file")
      ->required();
  evaluate->add_option("--split", evaluate_args.split, "Test split file")
      ->required();
  evaluate->add_option("--topk", evaluate_args.topk, "Recall cutoffs")
      ->capture_default_str();
  evaluate->add_option("--out", evaluate_args.out, "Report JSON path");
  evaluate->add_option("--csv", evaluate_args.csv, "Report CSV path");
  evaluate
      ->add_option("--subset", evaluate_args.subset,
                   "Queries to evaluate: test|validation|all")
      ->capture_default_str();

  LossArgs loss_args;
  auto* loss =
      app.add_subcommand("loss", "Evaluate training losses for one tuple");
  loss->add_option("--dataset", loss_args.dataset, "Dataset directory")
      ->required();
  loss->add_option("--split", loss_args.split, "Train split file")->required();
  loss->add_option("--tuple", loss_args.tuple_id, "Query id of the tuple")
      ->required();
  loss->add_option("--alpha", loss_args.alpha, "Triplet margin")
      ->capture_default_str();
  loss->add_option("--lambda-d", loss_args.lambda_d, "Depth loss weight")
      ->capture_default_str();
  loss->add_option("--lambda-t", loss_args.lambda_t, "Triplet loss weight")
      ->capture_default_str();
  loss->add_option("--lambda-r", loss_args.lambda_r,
                   "Reprojection loss weight")
      ->capture_default_str();
  loss->add_flag("--hinge", loss_args.hinge, "Clamp the triplet loss at 0");
  loss->add_flag("--mean", loss_args.mean,
                 "Mean reductions for depth and reprojection losses");
  loss->add_option("--depth-source", loss_args.depth_source,
                   "Cloud behind the pseudo depth maps: query|positive")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (synth->parsed()) return run_synth(synth_args);
    if (supervised->parsed()) return run_split_supervised(split_args);
    if (selfsup->parsed()) return run_split_selfsupervised(split_args);
    if (render->parsed()) return run_render(render_args);
    if (describe->parsed()) return run_describe(describe_args);
    if (evaluate->parsed()) return run_evaluate(evaluate_args);
    if (loss->parsed()) return run_loss(loss_args);
    emit_error("usage", "no subcommand given");
    return 2;
  } catch (const CLI::CallForHelp&) {
    // Help for the deepest subcommand the parser reached.
    CLI::App* target = &app;
    while (!target->get_subcommands().empty()) {
      target = target->get_subcommands().front();
    }
    std::cout << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 2;
  } catch (const ArgumentError& e) {
    emit_error("usage", e.what());
    return 2;
  } catch (const FormatError& e) {
    emit_error("format", e.what());
    return 2;
  } catch (const IoError& e) {
    emit_error("io", e.what());
    return 2;
  } catch (const LookupError& e) {
    emit_error("lookup", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("fpr");
  for (const std::string& arg : args) {
    argv.push_back(arg.c_str());
  }
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace fpr::cli
