#pragma once

// Hierarchical navigable small world graph over ids of an external
// VectorStore. The graph never copies vectors; every call that touches
// distances takes the store it was built against.

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "vectormaton/core.hpp"
#include "vectormaton/serialize.hpp"

namespace vectormaton {

struct HnswParams {
  std::uint32_t M = 16;
  std::uint32_t ef_construction = 200;
  /// Multiplier for level sampling; 0 selects 1/ln(M).
  double level_norm = 0.0;
  std::uint64_t seed = 0x5eed;

  /// Throws std::invalid_argument unless M >= 2 and ef_construction >= M.
  void validate() const;
  double effective_level_norm() const noexcept;

  friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

class HnswGraph {
 public:
  HnswGraph() : HnswGraph(HnswParams{}) {}
  explicit HnswGraph(HnswParams params);

  /// Throws std::invalid_argument for duplicate or unresolvable ids.
  void insert(VectorId id, const VectorStore& store);

  /// Top-k by (distance, id) using a candidate list of ef_search entries.
  /// Tombstoned nodes are traversed but never returned.
  QueryResult search(std::span<const float> q, std::size_t k, std::size_t ef_search,
                     const VectorStore& store, const Tombstones* tombstones = nullptr) const;

  /// The full layer-0 candidate list (up to ef_search live entries), ranked.
  QueryResult search_candidates(std::span<const float> q, std::size_t ef_search,
                                const VectorStore& store,
                                const Tombstones* tombstones = nullptr) const;

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  bool contains(VectorId id) const noexcept { return local_.contains(id); }
  const HnswParams& params() const noexcept { return params_; }

  /// Member ids in insertion order.
  const std::vector<VectorId>& node_ids() const noexcept { return ids_; }
  int max_level() const noexcept { return max_level_; }
  /// Vector id of the entry point; 0 when empty.
  VectorId entry_point() const noexcept { return empty() ? 0 : ids_[entry_]; }
  int level_of(VectorId id) const;
  /// Neighbor vector ids of `id` at `level`.
  std::vector<VectorId> neighbors(VectorId id, int level) const;
  std::size_t edge_count(int level) const;
  std::size_t degree_cap(int level) const noexcept {
    return level == 0 ? 2 * static_cast<std::size_t>(params_.M) : params_.M;
  }

  void serialize(io::ByteWriter& out) const;
  static HnswGraph deserialize(io::ByteReader& in);

  friend bool operator==(const HnswGraph& a, const HnswGraph& b) {
    return a.params_ == b.params_ && a.ids_ == b.ids_ && a.links_ == b.links_ &&
           a.entry_ == b.entry_ && a.max_level_ == b.max_level_ &&
           a.rng_state_ == b.rng_state_;
  }

 private:
  using Local = std::uint32_t;
  struct Candidate {
    float dist;
    VectorId id;
    Local node;
  };

  int sample_level();
  float dist_to(std::span<const float> q, Local node, const VectorStore& store) const {
    return store.distance(q, ids_[node]);
  }
  Local greedy_descend(std::span<const float> q, Local start, int from_level, int to_level,
                       const VectorStore& store) const;
  std::vector<Candidate> search_layer(std::span<const float> q, Local entry, std::size_t ef,
                                      int level, const VectorStore& store,
                                      const Tombstones* tombstones) const;
  std::vector<Local> select_neighbors(std::vector<Candidate> candidates, std::size_t cap,
                                      const VectorStore& store) const;

  HnswParams params_;
  std::vector<VectorId> ids_;
  std::unordered_map<VectorId, Local> local_;
  // links_[node][level] holds local neighbor indices.
  std::vector<std::vector<std::vector<Local>>> links_;
  Local entry_ = 0;
  int max_level_ = -1;
  std::uint64_t rng_state_ = 0;
};

}  // namespace vectormaton
