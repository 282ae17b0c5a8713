#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpr/benchmark.hpp"
#include "fpr/descriptor.hpp"

namespace fpr {

/// Immutable database for exact nearest-neighbor retrieval under squared
/// Euclidean distance. Desk-scale databases make a linear scan affordable
/// and keep evaluation bit-reproducible.
class RetrievalIndex {
 public:
  static RetrievalIndex build(const DescriptorSet& set,
                              const std::vector<std::string>& database_ids);

  /// The k nearest database ids, ascending by distance, ties broken by id
  /// order. Returns fewer than k when the database is smaller.
  std::vector<std::string> top_k(const Descriptor& query, int k) const;

  std::size_t size() const { return ids_.size(); }
  int dim() const { return dim_; }

 private:
  int dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;  // size() * dim_, contiguous
};

struct PerQueryResult {
  std::string query_id;
  std::optional<int> rank_of_first_hit;  // 1-based; empty when no hit
};

struct RecallReport {
  std::size_t n_query = 0;            // queries with nonempty ground truth
  std::size_t excluded_empty_gt = 0;  // queries dropped from the denominator
  std::map<int, double> recalls;      // x -> AR@x in percent
  std::vector<PerQueryResult> per_query;
};

/// AR@x over the test set: a query succeeds at x when any of its top-x
/// retrievals is in its ground-truth list. Queries with empty ground truth
/// are excluded from the denominator and counted separately.
RecallReport evaluate_recall(const RetrievalIndex& index,
                             const std::vector<TestQuery>& test_set,
                             const DescriptorSet& descriptors,
                             const std::vector<int>& ks);

}  // namespace fpr
