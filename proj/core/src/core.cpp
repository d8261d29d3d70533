#include "vectormaton/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vectormaton {

float distance(std::span<const float> a, std::span<const float> b, Metric metric) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("distance: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  if (metric == Metric::kCosine) {
    float dot = 0.0f, na = 0.0f, nb = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    if (na == 0.0f || nb == 0.0f) return (na == nb) ? 0.0f : 1.0f;
    float d = 1.0f - dot / (std::sqrt(na) * std::sqrt(nb));
    return d < 0.0f ? 0.0f : d;
  }
  float sum = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const float diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

VectorStore::VectorStore(std::size_t dim, Metric metric) : dim_(dim), metric_(metric) {
  if (dim == 0) throw std::invalid_argument("VectorStore: dimension must be >= 1");
}

std::span<const float> VectorStore::at(VectorId id) const {
  if (!contains(id)) {
    throw std::invalid_argument("VectorStore: unknown id " + std::to_string(id));
  }
  return (*this)[id];
}

VectorId VectorStore::push_back(std::span<const float> v) {
  if (dim_ == 0) {
    if (v.empty()) throw std::invalid_argument("VectorStore: empty vector");
    dim_ = v.size();
  }
  if (v.size() != dim_) {
    throw std::invalid_argument("VectorStore: expected dimension " + std::to_string(dim_) +
                                ", got " + std::to_string(v.size()));
  }
  data_.insert(data_.end(), v.begin(), v.end());
  return static_cast<VectorId>(size());
}

std::size_t Dataset::total_length() const noexcept {
  return std::accumulate(sequences.begin(), sequences.end(), std::size_t{0},
                         [](std::size_t acc, const std::string& s) { return acc + s.size(); });
}

void Dataset::validate() const {
  if (vectors.size() != sequences.size()) {
    throw FormatError("dataset: " + std::to_string(vectors.size()) + " vectors but " +
                      std::to_string(sequences.size()) + " sequences");
  }
  if (!sequences.empty() && vectors.dim() == 0) {
    throw FormatError("dataset: vectors have dimension 0");
  }
}

bool Tombstones::insert(VectorId id) {
  if (id >= marks_.size()) marks_.resize(static_cast<std::size_t>(id) + 1, false);
  if (marks_[id]) return false;
  marks_[id] = true;
  ++count_;
  return true;
}

std::vector<VectorId> Tombstones::ids() const {
  std::vector<VectorId> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < marks_.size(); ++i) {
    if (marks_[i]) out.push_back(static_cast<VectorId>(i));
  }
  return out;
}

QueryResult brute_force_topk(std::span<const float> q, std::span<const VectorId> candidates,
                             std::size_t k, const VectorStore& store,
                             const Tombstones* tombstones) {
  QueryResult all;
  if (k == 0) return all;
  all.reserve(candidates.size());
  for (VectorId id : candidates) {
    if (tombstones != nullptr && tombstones->contains(id)) continue;
    all.push_back({id, vectormaton::distance(q, store.at(id), store.metric())});
  }
  if (all.size() > k) {
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
  } else {
    std::sort(all.begin(), all.end(), closer);
  }
  return all;
}

QueryResult merge_topk(std::span<const QueryResult> lists, std::size_t k) {
  QueryResult merged;
  for (const auto& list : lists) merged.insert(merged.end(), list.begin(), list.end());
  std::sort(merged.begin(), merged.end(), closer);
  merged.erase(std::unique(merged.begin(), merged.end(),
                           [](const Neighbor& a, const Neighbor& b) { return a.id == b.id; }),
               merged.end());
  if (merged.size() > k) merged.resize(k);
  return merged;
}

bool contains_oracle(std::string_view s, std::string_view p) noexcept {
  return s.find(p) != std::string_view::npos;
}

std::vector<VectorId> vp_oracle(const Dataset& dataset, std::string_view p) {
  std::vector<VectorId> ids;
  for (std::size_t i = 0; i < dataset.sequences.size(); ++i) {
    if (contains_oracle(dataset.sequences[i], p)) ids.push_back(static_cast<VectorId>(i + 1));
  }
  return ids;
}

}  // namespace vectormaton
