#include "vectormaton/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace vectormaton {

namespace {

constexpr int kMaxLevel = 32;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Epoch-stamped visited marks reused across searches on the same thread.
class VisitedMarks {
 public:
  void reset(std::size_t n) {
    if (marks_.size() < n) marks_.resize(n, 0);
    if (++epoch_ == 0) {
      std::fill(marks_.begin(), marks_.end(), 0);
      epoch_ = 1;
    }
  }
  bool test_and_set(std::size_t i) {
    if (marks_[i] == epoch_) return true;
    marks_[i] = epoch_;
    return false;
  }

 private:
  std::vector<std::uint32_t> marks_;
  std::uint32_t epoch_ = 0;
};

VisitedMarks& visited_marks() {
  thread_local VisitedMarks marks;
  return marks;
}

}  // namespace

void HnswParams::validate() const {
  if (M < 2) throw std::invalid_argument("hnsw: M must be >= 2");
  if (ef_construction < M) throw std::invalid_argument("hnsw: ef_construction must be >= M");
  if (level_norm < 0.0) throw std::invalid_argument("hnsw: level_norm must be >= 0");
}

double HnswParams::effective_level_norm() const noexcept {
  return level_norm > 0.0 ? level_norm : 1.0 / std::log(static_cast<double>(M));
}

HnswGraph::HnswGraph(HnswParams params) : params_(params), rng_state_(params.seed) {
  params_.validate();
}

int HnswGraph::sample_level() {
  const std::uint64_t bits = splitmix64(rng_state_) >> 11;
  const double u = 1.0 - static_cast<double>(bits) * 0x1.0p-53;  // (0, 1]
  const double level = std::floor(-std::log(u) * params_.effective_level_norm());
  return static_cast<int>(std::min<double>(level, kMaxLevel));
}

int HnswGraph::level_of(VectorId id) const {
  auto it = local_.find(id);
  if (it == local_.end()) throw std::invalid_argument("hnsw: id not in graph");
  return static_cast<int>(links_[it->second].size()) - 1;
}

std::vector<VectorId> HnswGraph::neighbors(VectorId id, int level) const {
  auto it = local_.find(id);
  if (it == local_.end()) throw std::invalid_argument("hnsw: id not in graph");
  const auto& levels = links_[it->second];
  std::vector<VectorId> out;
  if (level < 0 || level >= static_cast<int>(levels.size())) return out;
  for (Local n : levels[level]) out.push_back(ids_[n]);
  return out;
}

std::size_t HnswGraph::edge_count(int level) const {
  std::size_t total = 0;
  for (const auto& levels : links_) {
    if (level < static_cast<int>(levels.size())) total += levels[level].size();
  }
  return total;
}

HnswGraph::Local HnswGraph::greedy_descend(std::span<const float> q, Local start, int from_level,
                                           int to_level, const VectorStore& store) const {
  Local cur = start;
  float cur_dist = dist_to(q, cur, store);
  for (int level = from_level; level >= to_level; --level) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (Local n : links_[cur][level]) {
        const float d = dist_to(q, n, store);
        if (d < cur_dist || (d == cur_dist && ids_[n] < ids_[cur])) {
          cur = n;
          cur_dist = d;
          improved = true;
        }
      }
    }
  }
  return cur;
}

std::vector<HnswGraph::Candidate> HnswGraph::search_layer(std::span<const float> q, Local entry,
                                                          std::size_t ef, int level,
                                                          const VectorStore& store,
                                                          const Tombstones* tombstones) const {
  // Both heaps order by (dist, id); `nearer` is a strict weak order on that key.
  auto nearer = [](const Candidate& a, const Candidate& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
  };
  auto farther = [&](const Candidate& a, const Candidate& b) { return nearer(b, a); };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(farther)> frontier(farther);
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(nearer)> best(nearer);

  auto& visited = visited_marks();
  visited.reset(ids_.size());
  auto is_live = [&](VectorId id) { return tombstones == nullptr || !tombstones->contains(id); };

  const Candidate start{dist_to(q, entry, store), ids_[entry], entry};
  visited.test_and_set(entry);
  frontier.push(start);
  if (is_live(start.id)) best.push(start);

  while (!frontier.empty()) {
    const Candidate c = frontier.top();
    if (best.size() >= ef && nearer(best.top(), c)) break;
    frontier.pop();
    for (Local n : links_[c.node][level]) {
      if (visited.test_and_set(n)) continue;
      const Candidate next{dist_to(q, n, store), ids_[n], n};
      if (best.size() < ef || nearer(next, best.top())) {
        frontier.push(next);
        if (is_live(next.id)) {
          best.push(next);
          if (best.size() > ef) best.pop();
        }
      }
    }
  }

  std::vector<Candidate> out;
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<HnswGraph::Local> HnswGraph::select_neighbors(std::vector<Candidate> candidates,
                                                          std::size_t cap,
                                                          const VectorStore& store) const {
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
  });
  std::vector<Local> selected;
  if (candidates.size() <= cap) {
    for (const auto& c : candidates) selected.push_back(c.node);
    return selected;
  }
  // Keep a candidate only if it is closer to the base point than to every
  // neighbor already kept.
  for (const auto& c : candidates) {
    if (selected.size() >= cap) break;
    bool keep = true;
    for (Local s : selected) {
      if (store.distance(c.id, ids_[s]) < c.dist) {
        keep = false;
        break;
      }
    }
    if (keep) selected.push_back(c.node);
  }
  return selected;
}

void HnswGraph::insert(VectorId id, const VectorStore& store) {
  if (!store.contains(id)) {
    throw std::invalid_argument("hnsw: id " + std::to_string(id) + " not in vector store");
  }
  if (local_.contains(id)) {
    throw std::invalid_argument("hnsw: duplicate id " + std::to_string(id));
  }
  const auto node = static_cast<Local>(ids_.size());
  const int level = sample_level();
  ids_.push_back(id);
  local_.emplace(id, node);
  links_.emplace_back(static_cast<std::size_t>(level) + 1);

  if (node == 0) {
    entry_ = node;
    max_level_ = level;
    return;
  }

  const auto q = store[id];
  Local cur = entry_;
  if (level < max_level_) cur = greedy_descend(q, cur, max_level_, level + 1, store);

  for (int l = std::min(level, max_level_); l >= 0; --l) {
    auto found = search_layer(q, cur, params_.ef_construction, l, store, nullptr);
    cur = found.front().node;
    std::vector<Local> chosen = select_neighbors(std::move(found), params_.M, store);
    links_[node][l] = chosen;

    const std::size_t cap = degree_cap(l);
    for (Local nb : chosen) {
      auto& list = links_[nb][l];
      list.push_back(node);
      if (list.size() <= cap) continue;
      std::vector<Candidate> pool;
      pool.reserve(list.size());
      for (Local other : list) {
        pool.push_back({store.distance(ids_[nb], ids_[other]), ids_[other], other});
      }
      list = select_neighbors(std::move(pool), cap, store);
    }
  }

  if (level > max_level_) {
    entry_ = node;
    max_level_ = level;
  }
}

QueryResult HnswGraph::search_candidates(std::span<const float> q, std::size_t ef_search,
                                         const VectorStore& store,
                                         const Tombstones* tombstones) const {
  QueryResult out;
  if (empty() || ef_search == 0) return out;
  if (q.size() != store.dim()) throw std::invalid_argument("hnsw: query dimension mismatch");
  const Local start = greedy_descend(q, entry_, max_level_, 1, store);
  const auto found = search_layer(q, start, ef_search, 0, store, tombstones);
  out.reserve(found.size());
  for (const auto& c : found) out.push_back({c.id, c.dist});
  return out;
}

QueryResult HnswGraph::search(std::span<const float> q, std::size_t k, std::size_t ef_search,
                              const VectorStore& store, const Tombstones* tombstones) const {
  if (ef_search < k) throw std::invalid_argument("hnsw: ef_search must be >= k");
  QueryResult out = search_candidates(q, ef_search, store, tombstones);
  if (out.size() > k) out.resize(k);
  return out;
}

void HnswGraph::serialize(io::ByteWriter& out) const {
  out.put_u32(params_.M);
  out.put_u32(params_.ef_construction);
  out.put_f64(params_.level_norm);
  out.put_u64(params_.seed);
  out.put_u64(rng_state_);
  out.put_varint(ids_.size());
  if (ids_.empty()) return;
  out.put_varint(entry_);
  out.put_varint(static_cast<std::uint64_t>(max_level_));
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    out.put_varint(ids_[i]);
    out.put_varint(links_[i].size() - 1);
    for (const auto& level : links_[i]) {
      out.put_varint(level.size());
      for (Local n : level) out.put_varint(n);
    }
  }
}

HnswGraph HnswGraph::deserialize(io::ByteReader& in) {
  HnswParams params;
  params.M = in.get_u32();
  params.ef_construction = in.get_u32();
  params.level_norm = in.get_f64();
  params.seed = in.get_u64();
  HnswGraph g;
  try {
    g = HnswGraph(params);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("hnsw: bad parameters: ") + e.what());
  }
  g.rng_state_ = in.get_u64();
  const std::uint64_t n = in.get_varint();
  if (n == 0) return g;
  if (n > std::numeric_limits<Local>::max()) throw FormatError("hnsw: node count too large");
  g.entry_ = static_cast<Local>(in.get_varint());
  g.max_level_ = static_cast<int>(in.get_varint());
  if (g.entry_ >= n || g.max_level_ > kMaxLevel) throw FormatError("hnsw: bad entry point");
  g.ids_.reserve(n);
  g.links_.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto id = in.get_varint();
    if (id == 0 || id > std::numeric_limits<VectorId>::max()) {
      throw FormatError("hnsw: invalid node id at byte " + std::to_string(in.offset()));
    }
    g.ids_.push_back(static_cast<VectorId>(id));
    if (!g.local_.emplace(static_cast<VectorId>(id), static_cast<Local>(i)).second) {
      throw FormatError("hnsw: duplicate node id " + std::to_string(id));
    }
    const auto top = in.get_varint();
    if (top > static_cast<std::uint64_t>(g.max_level_)) throw FormatError("hnsw: node level too high");
    g.links_[i].resize(top + 1);
    for (auto& level : g.links_[i]) {
      const auto count = in.get_varint();
      if (count > n) throw FormatError("hnsw: neighbor list too long");
      level.reserve(count);
      for (std::uint64_t j = 0; j < count; ++j) {
        const auto nb = in.get_varint();
        if (nb >= n) throw FormatError("hnsw: neighbor index out of range");
        level.push_back(static_cast<Local>(nb));
      }
    }
  }
  if (static_cast<int>(g.links_[g.entry_].size()) - 1 != g.max_level_) {
    throw FormatError("hnsw: entry point level mismatch");
  }
  return g;
}

}  // namespace vectormaton
