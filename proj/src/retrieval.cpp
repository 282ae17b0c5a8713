#include "fpr/retrieval.hpp"

#include <algorithm>
#include <unordered_set>

namespace fpr {

RetrievalIndex RetrievalIndex::build(
    const DescriptorSet& set, const std::vector<std::string>& database_ids) {
  RetrievalIndex index;
  index.dim_ = std::max(set.dim(), 0);
  index.ids_.reserve(database_ids.size());
  index.data_.reserve(database_ids.size() * static_cast<std::size_t>(index.dim_));
  std::unordered_set<std::string> seen;
  for (const std::string& id : database_ids) {
    if (!seen.insert(id).second) {
      throw LookupError("build_index: duplicate database id '" + id + "'");
    }
    const Descriptor& d = set.at(id);  // throws LookupError when missing
    index.ids_.push_back(id);
    index.data_.insert(index.data_.end(), d.values.begin(), d.values.end());
  }
  return index;
}

std::vector<std::string> RetrievalIndex::top_k(const Descriptor& query,
                                               int k) const {
  if (k < 1) {
    throw ArgumentError("top_k: k must be >= 1");
  }
  if (query.dim() != dim_) {
    throw ShapeError("top_k: query dim " + std::to_string(query.dim()) +
                     " does not match index dim " + std::to_string(dim_));
  }
  struct Scored {
    double dist;
    std::size_t idx;
  };
  std::vector<Scored> scored;
  scored.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const float* row = data_.data() + i * static_cast<std::size_t>(dim_);
    double sum = 0.0;
    for (int c = 0; c < dim_; ++c) {
      const double diff = static_cast<double>(query.values[c]) - row[c];
      sum += diff * diff;
    }
    scored.push_back(Scored{sum, i});
  }
  const std::size_t take = std::min<std::size_t>(k, scored.size());
  const auto closer = [this](const Scored& a, const Scored& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return ids_[a.idx] < ids_[b.idx];
  };
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    closer);
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back(ids_[scored[i].idx]);
  }
  return out;
}

RecallReport evaluate_recall(const RetrievalIndex& index,
                             const std::vector<TestQuery>& test_set,
                             const DescriptorSet& descriptors,
                             const std::vector<int>& ks) {
  if (ks.empty() || !std::is_sorted(ks.begin(), ks.end()) || ks.front() < 1) {
    throw ArgumentError("evaluate_recall: ks must be nonempty, ascending and "
                        ">= 1");
  }
  RecallReport report;
  const int max_k = ks.back();
  std::vector<std::size_t> hits_at(ks.size(), 0);
  for (const TestQuery& query : test_set) {
    if (query.gt_ids.empty()) {
      ++report.excluded_empty_gt;
      continue;
    }
    ++report.n_query;
    const std::unordered_set<std::string> gt(query.gt_ids.begin(),
                                             query.gt_ids.end());
    const std::vector<std::string> retrieved =
        index.top_k(descriptors.at(query.query_id), max_k);
    std::optional<int> rank;
    for (std::size_t r = 0; r < retrieved.size(); ++r) {
      if (gt.count(retrieved[r])) {
        rank = static_cast<int>(r) + 1;
        break;
      }
    }
    report.per_query.push_back(PerQueryResult{query.query_id, rank});
    if (rank) {
      for (std::size_t i = 0; i < ks.size(); ++i) {
        if (*rank <= ks[i]) {
          ++hits_at[i];
        }
      }
    }
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    report.recalls[ks[i]] =
        report.n_query == 0
            ? 0.0
            : 100.0 * static_cast<double>(hits_at[i]) /
                  static_cast<double>(report.n_query);
  }
  return report;
}

}  // namespace fpr
