#include "vectormaton/index.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <iterator>
#include <mutex>
#include <thread>

namespace vectormaton {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool sorted_contains(const std::vector<VectorId>& ids, VectorId id) {
  return std::binary_search(ids.begin(), ids.end(), id);
}

std::vector<VectorId> difference(const std::vector<VectorId>& a, const std::vector<VectorId>& b) {
  std::vector<VectorId> out;
  out.reserve(a.size());
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void BuildConfig::validate() const {
  if (threshold < 1) throw std::invalid_argument("build config: threshold must be >= 1");
  if (parallelism < 1) throw std::invalid_argument("build config: parallelism must be >= 1");
  hnsw.validate();
}

HnswParams VectorMatonIndex::graph_params(StateId u) const {
  HnswParams p = config_.hnsw;
  p.seed = mix_seed(config_.hnsw.seed, u);
  return p;
}

void VectorMatonIndex::make_graph(StateId u) {
  auto& idx = indexes_[u];
  idx.kind = StateIndex::Kind::kGraph;
  idx.graph.emplace(graph_params(u));
  for (VectorId id : idx.base) idx.graph->insert(id, store_);
}

void VectorMatonIndex::build_state(StateId u) {
  const EsamState& st = esam_.state(u);
  StateIndex& idx = indexes_[u];

  std::optional<StateId> best;
  if (config_.index_reuse) {
    for (const auto& [sym, v] : st.transitions) {
      if (!best) {
        best = v;
        continue;
      }
      const std::size_t size = indexes_[v].base.size();
      const std::size_t best_size = indexes_[*best].base.size();
      if (size > best_size || (size == best_size && v < *best)) best = v;
    }
  }
  idx.inherited = best;
  idx.base = best ? difference(st.ids, indexes_[*best].base) : st.ids;
  idx.graph.reset();
  idx.kind = StateIndex::Kind::kRawIds;
  if (idx.base.size() >= config_.threshold) make_graph(u);
}

VectorMatonIndex VectorMatonIndex::prepare(const Dataset& dataset, const BuildConfig& config) {
  config.validate();
  dataset.validate();
  if (dataset.size() == 0) throw std::invalid_argument("build: dataset is empty");
  VectorMatonIndex index;
  index.config_ = config;
  index.store_ = dataset.vectors;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    index.esam_.add_sequence(static_cast<VectorId>(i + 1), dataset.sequences[i]);
  }
  index.indexes_.resize(index.esam_.state_count());
  return index;
}

VectorMatonIndex VectorMatonIndex::build(const Dataset& dataset, const BuildConfig& config) {
  VectorMatonIndex index = prepare(dataset, config);
  for (StateId u : index.esam_.reverse_topological_order()) index.build_state(u);
  return index;
}

VectorMatonIndex VectorMatonIndex::build_parallel(const Dataset& dataset,
                                                  const BuildConfig& config) {
  VectorMatonIndex index = prepare(dataset, config);
  const std::size_t n = index.esam_.state_count();
  if (config.parallelism <= 1) {
    for (StateId u : index.esam_.reverse_topological_order()) index.build_state(u);
    return index;
  }

  // A state becomes ready once all of its transition successors are built.
  std::vector<std::vector<StateId>> predecessors(n);
  std::vector<std::atomic<std::uint32_t>> pending(n);
  std::deque<StateId> ready;
  for (StateId u = 0; u < n; ++u) {
    const auto& tr = index.esam_.state(u).transitions;
    pending[u].store(static_cast<std::uint32_t>(tr.size()), std::memory_order_relaxed);
    for (const auto& [sym, v] : tr) predecessors[v].push_back(u);
    if (tr.empty()) ready.push_back(u);
  }

  std::mutex mu;
  std::condition_variable cv;
  std::size_t done = 0;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      StateId u;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return !ready.empty() || done == n || failure; });
        if (done == n || failure) return;
        u = ready.front();
        ready.pop_front();
      }
      try {
        index.build_state(u);
      } catch (...) {
        std::lock_guard lock(mu);
        failure = std::current_exception();
        cv.notify_all();
        return;
      }
      std::lock_guard lock(mu);
      for (StateId p : predecessors[u]) {
        if (pending[p].fetch_sub(1, std::memory_order_acq_rel) == 1) ready.push_back(p);
      }
      ++done;
      cv.notify_all();
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(config.parallelism);
  for (std::size_t i = 0; i < config.parallelism; ++i) workers.emplace_back(worker);
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
  return index;
}

QueryResult VectorMatonIndex::search_state(StateId u, std::span<const float> q, std::size_t k,
                                           std::size_t ef_search) const {
  const StateIndex& idx = indexes_[u];
  if (idx.kind == StateIndex::Kind::kGraph) {
    return idx.graph->search(q, k, ef_search, store_, &tombstones_);
  }
  return brute_force_topk(q, idx.base, k, store_, &tombstones_);
}

QueryResult VectorMatonIndex::query(std::span<const float> q, std::string_view pattern,
                                    std::size_t k, std::size_t ef_search) const {
  if (k == 0) throw std::invalid_argument("query: k must be >= 1");
  if (ef_search < k) throw std::invalid_argument("query: ef_search must be >= k");
  if (q.size() != store_.dim()) throw std::invalid_argument("query: dimension mismatch");
  const auto cur = esam_.locate(pattern);
  if (!cur || indexes_.empty()) return {};
  std::vector<QueryResult> parts;
  parts.push_back(search_state(*cur, q, k, ef_search));
  if (const auto inherited = indexes_[*cur].inherited) {
    parts.push_back(search_state(*inherited, q, k, ef_search));
  }
  return merge_topk(parts, k);
}

VectorId VectorMatonIndex::insert(std::span<const float> v, std::string_view s) {
  if (store_.dim() != 0 && v.size() != store_.dim()) {
    throw std::invalid_argument("insert: dimension mismatch");
  }
  const VectorId id = store_.push_back(v);
  esam_.begin_sequence(id);
  if (indexes_.size() < esam_.state_count()) indexes_.resize(esam_.state_count());

  std::vector<StateId> affected;
  std::vector<bool> is_affected(esam_.state_count(), false);
  auto mark = [&](StateId u) {
    if (u >= is_affected.size()) is_affected.resize(static_cast<std::size_t>(u) + 1, false);
    if (!is_affected[u]) {
      is_affected[u] = true;
      affected.push_back(u);
    }
  };

  auto propagate = [&] {
    for (StateId u : esam_.propagate_id()) mark(u);
  };

  if (s.empty()) propagate();
  for (char ch : s) {
    const ExtendEvent ev = esam_.extend(static_cast<std::uint8_t>(ch));
    if (indexes_.size() < esam_.state_count()) indexes_.resize(esam_.state_count());
    if (ev.cloned) {
      // The copy takes over the original's role for the redirected states,
      // so it starts with the original's base and inherited pointer. The
      // id being inserted is placed after propagation.
      const auto [orig, copy] = *ev.cloned;
      StateIndex& ci = indexes_[copy];
      ci.inherited = indexes_[orig].inherited;
      std::vector<VectorId> base = esam_.state(copy).ids;
      if (ci.inherited) base = difference(base, indexes_[*ci.inherited].base);
      std::erase(base, id);
      ci.base = std::move(base);
      ci.kind = StateIndex::Kind::kRawIds;
      if (ci.base.size() >= config_.threshold) make_graph(copy);
      for (StateId r : ev.redirected) {
        if (indexes_[r].inherited == orig) indexes_[r].inherited = copy;
      }
      if (orig < is_affected.size() && is_affected[orig]) mark(copy);
    }
    propagate();
  }

  std::sort(affected.begin(), affected.end(), [this](StateId a, StateId b) {
    const auto la = esam_.state(a).max_len, lb = esam_.state(b).max_len;
    return la > lb || (la == lb && a < b);
  });
  for (StateId u : affected) {
    StateIndex& idx = indexes_[u];
    if (idx.inherited && sorted_contains(indexes_[*idx.inherited].base, id)) continue;
    idx.base.insert(std::upper_bound(idx.base.begin(), idx.base.end(), id), id);
    if (idx.kind == StateIndex::Kind::kGraph) {
      idx.graph->insert(id, store_);
    } else if (idx.base.size() >= config_.threshold) {
      make_graph(u);
    }
  }
  return id;
}

void VectorMatonIndex::remove(VectorId id) {
  if (!store_.contains(id)) {
    throw std::invalid_argument("delete: unknown id " + std::to_string(id));
  }
  if (!tombstones_.insert(id)) {
    throw std::invalid_argument("delete: id " + std::to_string(id) + " already deleted");
  }
}

IndexStats VectorMatonIndex::stats() const {
  IndexStats s;
  s.states = esam_.state_count();
  s.transitions = esam_.transition_count();
  s.total_id_set = esam_.total_id_count();
  s.total_length = esam_.total_length();
  for (const auto& idx : indexes_) {
    s.total_base += idx.base.size();
    if (idx.kind == StateIndex::Kind::kGraph) ++s.graph_states;
  }
  return s;
}

std::string VectorMatonIndex::check_exact_cover() const {
  if (indexes_.size() != esam_.state_count()) return "state index count mismatch";
  for (StateId u = 0; u < indexes_.size(); ++u) {
    const StateIndex& idx = indexes_[u];
    const auto& ids = esam_.state(u).ids;
    const std::string where = "state " + std::to_string(u) + ": ";
    if (!std::is_sorted(idx.base.begin(), idx.base.end()) ||
        std::adjacent_find(idx.base.begin(), idx.base.end()) != idx.base.end()) {
      return where + "base not strictly sorted";
    }
    if ((idx.kind == StateIndex::Kind::kGraph) != idx.graph.has_value()) {
      return where + "kind does not match graph presence";
    }
    if (idx.graph) {
      std::vector<VectorId> members = idx.graph->node_ids();
      std::sort(members.begin(), members.end());
      if (members != idx.base) return where + "graph members differ from base";
    }
    std::vector<VectorId> other;
    if (idx.inherited) {
      const auto& tr = esam_.state(u).transitions;
      if (std::none_of(tr.begin(), tr.end(),
                       [&](const auto& t) { return t.second == *idx.inherited; })) {
        return where + "inherited state is not a successor";
      }
      other = indexes_[*idx.inherited].base;
    }
    std::vector<VectorId> overlap;
    std::set_intersection(idx.base.begin(), idx.base.end(), other.begin(), other.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty()) return where + "base overlaps inherited base";
    std::vector<VectorId> merged;
    std::set_union(idx.base.begin(), idx.base.end(), other.begin(), other.end(),
                   std::back_inserter(merged));
    if (merged != ids) return where + "base and inherited base do not cover the id set";
  }
  return {};
}

}  // namespace vectormaton
