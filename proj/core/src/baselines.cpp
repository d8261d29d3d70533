#include "vectormaton/baselines.hpp"

#include <string>
#include <unordered_set>

namespace vectormaton {

OptQueryIndex OptQueryIndex::build(const Dataset& dataset, const HnswParams& params,
                                   std::uint64_t max_total_insertions) {
  dataset.validate();
  params.validate();
  OptQueryIndex index;
  index.store_ = dataset.vectors;

  std::uint64_t next_graph = 0;
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::string_view s = dataset.sequences[i];
    const auto id = static_cast<VectorId>(i + 1);
    // A record enters each pattern's graph once, however often it occurs.
    seen.clear();
    for (std::size_t begin = 0; begin < s.size(); ++begin) {
      for (std::size_t end = begin + 1; end <= s.size(); ++end) {
        ++index.enumerated_;
        const std::string_view p = s.substr(begin, end - begin);
        if (!seen.insert(p).second) continue;
        if (index.insertions_ + 1 > max_total_insertions) {
          throw ResourceLimitError("optquery: more than " + std::to_string(max_total_insertions) +
                                   " graph insertions required");
        }
        auto it = index.graphs_.find(std::string(p));
        if (it == index.graphs_.end()) {
          HnswParams per_pattern = params;
          per_pattern.seed = params.seed + next_graph++;
          it = index.graphs_.emplace(std::string(p), HnswGraph(per_pattern)).first;
        }
        it->second.insert(id, index.store_);
        ++index.insertions_;
      }
    }
  }
  return index;
}

const HnswGraph* OptQueryIndex::graph(std::string_view pattern) const {
  auto it = graphs_.find(std::string(pattern));
  return it == graphs_.end() ? nullptr : &it->second;
}

QueryResult OptQueryIndex::query(std::span<const float> q, std::string_view pattern,
                                 std::size_t k, std::size_t ef_search) const {
  if (ef_search < k) throw std::invalid_argument("optquery: ef_search must be >= k");
  const HnswGraph* g = graph(pattern);
  if (g == nullptr) return {};
  return g->search(q, k, ef_search, store_);
}

PreFilter::PreFilter(const Dataset& dataset) : store_(&dataset.vectors) {
  dataset.validate();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    esam_.add_sequence(static_cast<VectorId>(i + 1), dataset.sequences[i]);
  }
}

std::span<const VectorId> PreFilter::matching_ids(std::string_view pattern) const {
  const auto state = esam_.locate(pattern);
  if (!state) return {};
  return esam_.state(*state).ids;
}

QueryResult PreFilter::query(std::span<const float> q, std::string_view pattern,
                             std::size_t k) const {
  return brute_force_topk(q, matching_ids(pattern), k, *store_);
}

PostFilter::PostFilter(const Dataset& dataset, const HnswParams& params)
    : dataset_(&dataset), graph_(params) {
  dataset.validate();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    graph_.insert(static_cast<VectorId>(i + 1), dataset.vectors);
  }
}

QueryResult PostFilter::query(std::span<const float> q, std::string_view pattern,
                              std::size_t k, std::size_t ef_search) const {
  if (ef_search < k) throw std::invalid_argument("postfilter: ef_search must be >= k");
  QueryResult out;
  for (const Neighbor& n : graph_.search_candidates(q, ef_search, dataset_->vectors)) {
    if (!contains_oracle(dataset_->sequence(n.id), pattern)) continue;
    out.push_back(n);
    if (out.size() == k) break;
  }
  return out;
}

}  // namespace vectormaton
