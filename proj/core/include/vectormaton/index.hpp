#pragma once

// The VectorMaton index: an Esam whose states each carry a StateIndex. A
// state's own index covers only the ids not already covered by its inherited
// successor, so the two indexes together hold exactly the state's id set.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vectormaton/core.hpp"
#include "vectormaton/esam.hpp"
#include "vectormaton/hnsw.hpp"

namespace vectormaton {

struct BuildConfig {
  static constexpr std::uint64_t kNoGraphs = std::numeric_limits<std::uint64_t>::max();

  /// Base sets smaller than this are kept as raw id lists.
  std::uint64_t threshold = 200;
  HnswParams hnsw{};
  std::size_t parallelism = 1;
  /// Disabling makes every state index its full id set.
  bool index_reuse = true;

  void validate() const;
};

struct StateIndex {
  enum class Kind : std::uint8_t { kRawIds = 0, kGraph = 1 };

  Kind kind = Kind::kRawIds;
  /// Sorted ids indexed by this state alone.
  std::vector<VectorId> base;
  std::optional<HnswGraph> graph;
  std::optional<StateId> inherited;

  friend bool operator==(const StateIndex&, const StateIndex&) = default;
};

struct IndexStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t graph_states = 0;
  std::size_t total_id_set = 0;
  std::size_t total_base = 0;
  std::size_t total_length = 0;
};

class VectorMatonIndex {
 public:
  VectorMatonIndex() = default;

  /// Serial build. Throws std::invalid_argument for an empty dataset.
  static VectorMatonIndex build(const Dataset& dataset, const BuildConfig& config);
  /// Build with config.parallelism workers; output equals build().
  static VectorMatonIndex build_parallel(const Dataset& dataset, const BuildConfig& config);

  QueryResult query(std::span<const float> q, std::string_view pattern, std::size_t k,
                    std::size_t ef_search) const;

  /// Adds a record and returns its id (previous size + 1).
  VectorId insert(std::span<const float> v, std::string_view s);
  /// Lazy delete. Throws std::invalid_argument for unknown or deleted ids.
  void remove(VectorId id);

  const Esam& esam() const noexcept { return esam_; }
  const VectorStore& store() const noexcept { return store_; }
  const Tombstones& tombstones() const noexcept { return tombstones_; }
  const BuildConfig& config() const noexcept { return config_; }
  const StateIndex& state_index(StateId s) const { return indexes_.at(s); }
  const std::vector<StateIndex>& state_indexes() const noexcept { return indexes_; }
  std::size_t size() const noexcept { return store_.size(); }

  IndexStats stats() const;
  /// Returns an empty string when every state's base and its inherited
  /// state's base partition the state's id set; otherwise a description of
  /// the first violation.
  std::string check_exact_cover() const;

  /// VMAT1 snapshot.
  std::vector<std::uint8_t> serialize() const;
  static VectorMatonIndex deserialize(std::span<const std::uint8_t> bytes);
  void save(const std::string& path) const;
  static VectorMatonIndex load(const std::string& path);

  friend bool operator==(const VectorMatonIndex& a, const VectorMatonIndex& b) {
    return a.esam_ == b.esam_ && a.indexes_ == b.indexes_ && a.store_ == b.store_ &&
           a.tombstones_ == b.tombstones_;
  }

 private:
  static VectorMatonIndex prepare(const Dataset& dataset, const BuildConfig& config);
  /// Fills indexes_[u] assuming every successor of u is finished.
  void build_state(StateId u);
  void make_graph(StateId u);
  HnswParams graph_params(StateId u) const;
  QueryResult search_state(StateId u, std::span<const float> q, std::size_t k,
                           std::size_t ef_search) const;

  Esam esam_;
  std::vector<StateIndex> indexes_;
  VectorStore store_;
  Tombstones tombstones_;
  BuildConfig config_;
};

}  // namespace vectormaton
