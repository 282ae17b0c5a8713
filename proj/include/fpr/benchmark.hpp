#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "fpr/date.hpp"
#include "fpr/geometry.hpp"

namespace fpr {

/// One timestamped multi-sensor capture. `position` is the 2D (x, y)
/// projection of the ego translation; altitude is ignored by every distance
/// threshold.
struct Sample {
  std::string id;
  std::string scene_id;
  std::int64_t timestamp_us = 0;
  Eigen::Vector2d position{0.0, 0.0};
  Pose pose;
  std::string lidar_file;
  std::vector<std::string> image_files;
};

struct Scene {
  std::string id;
  Date date;
  std::vector<Sample> samples;
};

/// Distance-metric organization parameters. Defaults follow the benchmark
/// configuration: delta 1 m, rho_pos 9 m, rho_neg 18 m, 2 positives and 4
/// negatives per query.
struct SupervisedParams {
  double delta = 1.0;      // database admission interval, meters
  Date gamma;              // date threshold splitting train from test queries
  double rho_pos = 9.0;    // positive distance threshold, meters
  double rho_neg = 18.0;   // negative distance threshold, meters
  int n_pos = 2;
  int n_neg = 4;
  std::uint64_t seed = 0;
  double val_fraction = 0.0;

  void validate() const;
};

enum class SelfSupervisedMode { kFaithful, kSanitized };

/// Time-metric organization parameters. sigma_neg counts samples; at the
/// 2 Hz sample period the default of 6 corresponds to 3 s.
struct SelfSupervisedParams {
  Date gamma;
  double rho_pos = 9.0;  // used for test ground truth only
  int sigma_neg = 6;
  int n_pos = 2;
  int n_neg = 4;
  std::uint64_t seed = 0;
  SelfSupervisedMode mode = SelfSupervisedMode::kFaithful;
  double val_fraction = 0.0;

  void validate() const;
};

struct TrainingTuple {
  std::string query_id;
  std::vector<std::string> positive_ids;
  std::vector<std::string> negative_ids;
};

struct TestQuery {
  std::string query_id;
  std::vector<std::string> gt_ids;  // empty means no reachable ground truth
};

/// Database / train-query / test-query partition of the supervised scheme.
struct SupervisedSplit {
  std::vector<Sample> database;       // A
  std::vector<Sample> train_queries;  // B
  std::vector<Sample> test_queries;   // C
};

struct MiningSummary {
  std::size_t candidates = 0;
  std::size_t mined = 0;
  std::size_t skipped_few_positives = 0;
  std::size_t skipped_few_negatives = 0;
  std::vector<std::string> skipped_ids;
};

struct SelfSupervisedSceneTrace {
  std::string scene_id;
  std::vector<std::string> negative_buffer;  // final V_neg contents, in order
};

struct SelfSupervisedMining {
  std::vector<TrainingTuple> tuples;
  std::vector<Sample> old_samples;  // V_old, doubles as the test database
  std::vector<SelfSupervisedSceneTrace> traces;
  std::size_t scenes_too_short = 0;
};

/// Ids of candidates within `radius` of the query position, ascending by
/// distance with ties broken by id order.
std::vector<std::string> knn_within(
    const Eigen::Vector2d& query_pos,
    const std::vector<std::pair<std::string, Eigen::Vector2d>>& candidates,
    double radius);

/// Database admission pass of the supervised scheme: samples at least delta
/// from every database sample (or the very first sample) become database;
/// the rest become train queries when dated before gamma, test queries
/// otherwise. Order-dependent by definition.
SupervisedSplit split_supervised(const std::vector<Scene>& scenes,
                                 const SupervisedParams& params);

/// Mines (query, positives, negatives) tuples for the train queries against
/// the database. Queries lacking n_pos in-radius or n_neg out-of-radius
/// candidates are skipped and reported in the summary.
std::vector<TrainingTuple> mine_supervised(const SupervisedSplit& split,
                                           const SupervisedParams& params,
                                           MiningSummary* summary = nullptr);

/// Per-query ground truth: all database ids within rho_pos. Queries with no
/// ground truth get an empty list; retrieval evaluation excludes them.
std::vector<TestQuery> ground_truth(const std::vector<Sample>& queries,
                                    const std::vector<Sample>& database,
                                    double rho_pos);

/// Whole-scene date split: scenes dated strictly before gamma are old.
void split_selfsupervised(const std::vector<Scene>& scenes,
                          const SelfSupervisedParams& params,
                          std::vector<Scene>& old_scenes,
                          std::vector<Scene>& new_scenes);

/// Time-metric mining over the old scenes. Faithful mode reproduces the
/// published bookkeeping verbatim, including its duplicate buffer insertions
/// and negatives newer than sigma_neg at early indices; sanitized mode only
/// admits negatives more than sigma_neg samples older than the query.
SelfSupervisedMining mine_selfsupervised(const std::vector<Scene>& old_scenes,
                                         const SelfSupervisedParams& params);

/// Seeded uniform split of the test queries; floor(fraction * n) become
/// validation. Both outputs preserve the input order.
void split_validation(const std::vector<TestQuery>& test_set, double fraction,
                      std::uint64_t seed, std::vector<TestQuery>& validation,
                      std::vector<TestQuery>& test);

}  // namespace fpr
