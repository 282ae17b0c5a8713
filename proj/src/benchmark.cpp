#include "fpr/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpr/random.hpp"

namespace fpr {

void SupervisedParams::validate() const {
  if (delta <= 0.0) {
    throw ArgumentError("supervised params: delta must be > 0");
  }
  if (!(0.0 < rho_pos && rho_pos < rho_neg)) {
    throw ArgumentError("supervised params: require 0 < rho_pos < rho_neg");
  }
  if (n_pos < 1 || n_neg < 1) {
    throw ArgumentError("supervised params: n_pos and n_neg must be >= 1");
  }
  if (val_fraction < 0.0 || val_fraction > 1.0) {
    throw ArgumentError("supervised params: val_fraction must be in [0, 1]");
  }
}

void SelfSupervisedParams::validate() const {
  if (sigma_neg < 1) {
    throw ArgumentError("self-supervised params: sigma_neg must be >= 1");
  }
  if (n_pos < 1 || n_neg < 1) {
    throw ArgumentError("self-supervised params: n_pos and n_neg must be >= 1");
  }
  if (rho_pos <= 0.0) {
    throw ArgumentError("self-supervised params: rho_pos must be > 0");
  }
  if (val_fraction < 0.0 || val_fraction > 1.0) {
    throw ArgumentError("self-supervised params: val_fraction must be in "
                        "[0, 1]");
  }
}

std::vector<std::string> knn_within(
    const Eigen::Vector2d& query_pos,
    const std::vector<std::pair<std::string, Eigen::Vector2d>>& candidates,
    double radius) {
  if (radius <= 0.0) {
    throw ArgumentError("knn_within: radius must be > 0");
  }
  std::vector<std::pair<double, const std::string*>> hits;
  const double r2 = radius * radius;
  for (const auto& [id, pos] : candidates) {
    const double d2 = (pos - query_pos).squaredNorm();
    if (d2 <= r2) {
      hits.emplace_back(d2, &id);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return *a.second < *b.second;
  });
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (const auto& [d2, id] : hits) {
    out.push_back(*id);
  }
  return out;
}

SupervisedSplit split_supervised(const std::vector<Scene>& scenes,
                                 const SupervisedParams& params) {
  params.validate();
  SupervisedSplit split;
  for (const Scene& scene : scenes) {
    for (const Sample& sample : scene.samples) {
      double min_d2 = std::numeric_limits<double>::infinity();
      for (const Sample& db : split.database) {
        min_d2 = std::min(min_d2, (db.position - sample.position).squaredNorm());
      }
      if (split.database.empty() || min_d2 >= params.delta * params.delta) {
        split.database.push_back(sample);
      } else if (scene.date < params.gamma) {
        split.train_queries.push_back(sample);
      } else {
        split.test_queries.push_back(sample);
      }
    }
  }
  return split;
}

std::vector<TrainingTuple> mine_supervised(const SupervisedSplit& split,
                                           const SupervisedParams& params,
                                           MiningSummary* summary) {
  params.validate();
  MiningSummary local;
  MiningSummary& stats = summary ? *summary : local;
  stats = MiningSummary{};
  stats.candidates = split.train_queries.size();

  std::vector<TrainingTuple> tuples;
  const double pos_r2 = params.rho_pos * params.rho_pos;
  const double neg_r2 = params.rho_neg * params.rho_neg;
  for (const Sample& query : split.train_queries) {
    // Candidate pools, in database admission order.
    std::vector<std::size_t> pos_pool;
    std::vector<std::size_t> neg_pool;
    for (std::size_t i = 0; i < split.database.size(); ++i) {
      const double d2 =
          (split.database[i].position - query.position).squaredNorm();
      if (d2 <= pos_r2) {
        pos_pool.push_back(i);
      } else if (d2 > neg_r2) {
        neg_pool.push_back(i);
      }
    }
    if (pos_pool.size() < static_cast<std::size_t>(params.n_pos)) {
      ++stats.skipped_few_positives;
      stats.skipped_ids.push_back(query.id);
      continue;
    }
    if (neg_pool.size() < static_cast<std::size_t>(params.n_neg)) {
      ++stats.skipped_few_negatives;
      stats.skipped_ids.push_back(query.id);
      continue;
    }
    Rng rng = Rng::keyed(params.seed, query.id);
    TrainingTuple tuple;
    tuple.query_id = query.id;
    for (std::size_t k : rng.sample_indices(pos_pool.size(), params.n_pos)) {
      tuple.positive_ids.push_back(split.database[pos_pool[k]].id);
    }
    for (std::size_t k : rng.sample_indices(neg_pool.size(), params.n_neg)) {
      tuple.negative_ids.push_back(split.database[neg_pool[k]].id);
    }
    tuples.push_back(std::move(tuple));
  }
  stats.mined = tuples.size();
  return tuples;
}

std::vector<TestQuery> ground_truth(const std::vector<Sample>& queries,
                                    const std::vector<Sample>& database,
                                    double rho_pos) {
  if (rho_pos <= 0.0) {
    throw ArgumentError("ground_truth: rho_pos must be > 0");
  }
  std::vector<std::pair<std::string, Eigen::Vector2d>> candidates;
  candidates.reserve(database.size());
  for (const Sample& db : database) {
    candidates.emplace_back(db.id, db.position);
  }
  std::vector<TestQuery> out;
  out.reserve(queries.size());
  for (const Sample& query : queries) {
    out.push_back(TestQuery{query.id,
                            knn_within(query.position, candidates, rho_pos)});
  }
  return out;
}

void split_selfsupervised(const std::vector<Scene>& scenes,
                          const SelfSupervisedParams& params,
                          std::vector<Scene>& old_scenes,
                          std::vector<Scene>& new_scenes) {
  params.validate();
  old_scenes.clear();
  new_scenes.clear();
  for (const Scene& scene : scenes) {
    if (scene.date < params.gamma) {
      old_scenes.push_back(scene);
    } else {
      new_scenes.push_back(scene);
    }
  }
}

SelfSupervisedMining mine_selfsupervised(const std::vector<Scene>& old_scenes,
                                         const SelfSupervisedParams& params) {
  params.validate();
  SelfSupervisedMining out;
  const std::size_t threshold = static_cast<std::size_t>(params.sigma_neg) +
                                params.n_pos + params.n_neg;
  for (const Scene& scene : old_scenes) {
    std::vector<std::size_t> neg_buffer;  // indices into scene.samples
    bool mined_any = false;
    for (std::size_t j = 0; j < scene.samples.size(); ++j) {
      const Sample& sample = scene.samples[j];
      out.old_samples.push_back(sample);
      if (j < threshold) {
        neg_buffer.push_back(j);
        continue;
      }

      TrainingTuple tuple;
      tuple.query_id = sample.id;
      for (std::size_t k = j - params.n_pos; k < j; ++k) {
        tuple.positive_ids.push_back(scene.samples[k].id);
      }

      Rng rng = Rng::keyed(params.seed, sample.id);
      if (params.mode == SelfSupervisedMode::kFaithful) {
        // Verbatim buffer: may contain duplicates and entries newer than
        // sigma_neg; selection is uniform over buffer positions.
        for (std::size_t k :
             rng.sample_indices(neg_buffer.size(), params.n_neg)) {
          tuple.negative_ids.push_back(scene.samples[neg_buffer[k]].id);
        }
        neg_buffer.push_back(j - params.sigma_neg);
      } else {
        // Only samples more than sigma_neg indices older than the query;
        // this also excludes the positive window.
        const std::size_t eligible = j - params.sigma_neg;
        for (std::size_t k : rng.sample_indices(eligible, params.n_neg)) {
          tuple.negative_ids.push_back(scene.samples[k].id);
        }
      }
      out.tuples.push_back(std::move(tuple));
      mined_any = true;
    }
    if (!mined_any) {
      ++out.scenes_too_short;
    }
    SelfSupervisedSceneTrace trace;
    trace.scene_id = scene.id;
    for (std::size_t k : neg_buffer) {
      trace.negative_buffer.push_back(scene.samples[k].id);
    }
    out.traces.push_back(std::move(trace));
  }
  return out;
}

void split_validation(const std::vector<TestQuery>& test_set, double fraction,
                      std::uint64_t seed, std::vector<TestQuery>& validation,
                      std::vector<TestQuery>& test) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw ArgumentError("split_validation: fraction must be in [0, 1]");
  }
  validation.clear();
  test.clear();
  const std::size_t n = test_set.size();
  const std::size_t n_val =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  Rng rng = Rng::keyed(seed, "validation-split");
  std::vector<bool> is_val(n, false);
  for (std::size_t i : rng.sample_indices(n, n_val)) {
    is_val[i] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    (is_val[i] ? validation : test).push_back(test_set[i]);
  }
}

}  // namespace fpr
