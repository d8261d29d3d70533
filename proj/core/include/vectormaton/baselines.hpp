#pragma once

// Comparison methods for pattern-constrained search.
//
//   OptQuery       one HNSW graph per distinct pattern, O(m^2) space
//   PreFiltering   exact scan over the records that contain the pattern
//   PostFiltering  unconstrained HNSW search, then drop non-matching records

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vectormaton/core.hpp"
#include "vectormaton/esam.hpp"
#include "vectormaton/hnsw.hpp"

namespace vectormaton {

class OptQueryIndex {
 public:
  static constexpr std::uint64_t kDefaultInsertionCap = 50'000'000;

  /// Throws ResourceLimitError once the number of graph insertions would
  /// exceed max_total_insertions.
  static OptQueryIndex build(const Dataset& dataset, const HnswParams& params,
                             std::uint64_t max_total_insertions = kDefaultInsertionCap);

  QueryResult query(std::span<const float> q, std::string_view pattern, std::size_t k,
                    std::size_t ef_search) const;

  /// Graph for a pattern, or nullptr when the pattern occurs nowhere.
  const HnswGraph* graph(std::string_view pattern) const;
  std::size_t pattern_count() const noexcept { return graphs_.size(); }
  /// Insertions actually performed (distinct substrings per sequence).
  std::uint64_t total_insertions() const noexcept { return insertions_; }
  /// Substring occurrences enumerated, duplicates included.
  std::uint64_t enumerated_substrings() const noexcept { return enumerated_; }
  const VectorStore& store() const noexcept { return store_; }

 private:
  VectorStore store_;
  std::unordered_map<std::string, HnswGraph> graphs_;
  std::uint64_t insertions_ = 0;
  std::uint64_t enumerated_ = 0;
};

/// Exact search over the records whose sequence contains the pattern, with
/// the candidate set taken from the automaton state's id set.
class PreFilter {
 public:
  explicit PreFilter(const Dataset& dataset);

  QueryResult query(std::span<const float> q, std::string_view pattern, std::size_t k) const;
  /// Ids of records containing the pattern (empty when it occurs nowhere).
  std::span<const VectorId> matching_ids(std::string_view pattern) const;
  const Esam& esam() const noexcept { return esam_; }

 private:
  const VectorStore* store_;
  Esam esam_;
};

class PostFilter {
 public:
  /// Builds one HNSW graph over every record in the dataset. The dataset
  /// must outlive this object.
  PostFilter(const Dataset& dataset, const HnswParams& params);

  QueryResult query(std::span<const float> q, std::string_view pattern, std::size_t k,
                    std::size_t ef_search) const;
  const HnswGraph& graph() const noexcept { return graph_; }

 private:
  const Dataset* dataset_;
  HnswGraph graph_;
};

}  // namespace vectormaton
