#pragma once

// Shared data model for pattern-constrained nearest neighbor search: vector
// storage, result lists, the distance kernel, and the naive oracles that the
// rest of the library is checked against.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vectormaton {

/// 1-based vector / sequence identifier. 0 is never a valid id.
using VectorId = std::uint32_t;

enum class Metric : std::uint8_t {
  kSquaredL2 = 0,
  kCosine = 1,
};

/// Thrown for malformed files, truncated snapshots and inconsistent inputs.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a build would exceed a configured resource cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

float distance(std::span<const float> a, std::span<const float> b,
               Metric metric = Metric::kSquaredL2);

/// Dense row-major vector storage addressed by 1-based ids.
class VectorStore {
 public:
  VectorStore() = default;
  explicit VectorStore(std::size_t dim, Metric metric = Metric::kSquaredL2);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }
  Metric metric() const noexcept { return metric_; }
  void set_metric(Metric metric) noexcept { metric_ = metric; }

  bool contains(VectorId id) const noexcept { return id >= 1 && id <= size(); }

  /// Throws std::invalid_argument for ids outside 1..size().
  std::span<const float> at(VectorId id) const;
  std::span<const float> operator[](VectorId id) const noexcept {
    return {data_.data() + (static_cast<std::size_t>(id) - 1) * dim_, dim_};
  }

  /// Appends a vector and returns its id.
  VectorId push_back(std::span<const float> v);

  float distance(std::span<const float> q, VectorId id) const noexcept {
    return vectormaton::distance(q, (*this)[id], metric_);
  }
  float distance(VectorId a, VectorId b) const noexcept {
    return vectormaton::distance((*this)[a], (*this)[b], metric_);
  }

  const std::vector<float>& raw() const noexcept { return data_; }

  friend bool operator==(const VectorStore&, const VectorStore&) = default;

 private:
  std::size_t dim_ = 0;
  Metric metric_ = Metric::kSquaredL2;
  std::vector<float> data_;
};

/// Paired vector and sequence collections; record i (1-based) is
/// (vectors[i], sequences[i-1]).
struct Dataset {
  VectorStore vectors;
  std::vector<std::string> sequences;

  std::size_t size() const noexcept { return sequences.size(); }
  std::size_t dim() const noexcept { return vectors.dim(); }
  std::size_t total_length() const noexcept;
  std::string_view sequence(VectorId id) const { return sequences.at(id - 1); }

  /// Throws FormatError when the invariants between the two arrays fail.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct Neighbor {
  VectorId id = 0;
  float dist = 0.0f;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ordering used everywhere results are ranked: distance, then id.
inline bool closer(const Neighbor& a, const Neighbor& b) noexcept {
  return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
}

/// Ranked neighbors, sorted by closer(), no duplicate ids.
using QueryResult = std::vector<Neighbor>;

/// Lazily deleted ids. A dense bitmap over 1-based ids.
class Tombstones {
 public:
  bool contains(VectorId id) const noexcept {
    return id < marks_.size() && marks_[id];
  }
  /// Returns false when id was already present.
  bool insert(VectorId id);
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  std::vector<VectorId> ids() const;

  friend bool operator==(const Tombstones& a, const Tombstones& b) {
    return a.ids() == b.ids();
  }

 private:
  std::vector<bool> marks_;
  std::size_t count_ = 0;
};

/// Exact top-min(k, |candidates \ tombstones|) by (distance, id).
QueryResult brute_force_topk(std::span<const float> q,
                             std::span<const VectorId> candidates,
                             std::size_t k, const VectorStore& store,
                             const Tombstones* tombstones = nullptr);

/// Merges ranked lists, drops duplicate ids and keeps the best k.
QueryResult merge_topk(std::span<const QueryResult> lists, std::size_t k);

bool contains_oracle(std::string_view s, std::string_view p) noexcept;

/// Ids of all records whose sequence contains p, by linear scan.
std::vector<VectorId> vp_oracle(const Dataset& dataset, std::string_view p);

}  // namespace vectormaton
