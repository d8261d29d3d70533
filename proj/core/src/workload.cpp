#include <algorithm>
#include <fstream>
#include <random>
#include <string>

#include "vectormaton/bench.hpp"

namespace vectormaton {

char alphabet_symbol(std::size_t i, std::size_t alphabet_size) {
  if (alphabet_size <= 26) return static_cast<char>('a' + i);
  return static_cast<char>('!' + i);
}

Dataset gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n == 0 || spec.dim == 0 || spec.alphabet_size == 0 || spec.max_len < spec.min_len) {
    throw std::invalid_argument("gen_synthetic: parameters must be positive and min_len <= max_len");
  }
  if (spec.alphabet_size > 94) {
    throw std::invalid_argument("gen_synthetic: alphabet_size must be <= 94");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<float> coord(0.0f, 1.0f);
  std::uniform_int_distribution<std::size_t> length(spec.min_len, spec.max_len);
  std::uniform_int_distribution<std::size_t> symbol(0, spec.alphabet_size - 1);

  Dataset d;
  d.vectors = VectorStore(spec.dim);
  d.sequences.reserve(spec.n);
  std::vector<float> row(spec.dim);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (auto& f : row) f = coord(rng);
    d.vectors.push_back(row);
    std::string s(length(rng), '\0');
    for (auto& ch : s) ch = alphabet_symbol(symbol(rng), spec.alphabet_size);
    d.sequences.push_back(std::move(s));
  }
  return d;
}

std::vector<std::size_t> Workload::pattern_lengths() const {
  std::vector<std::size_t> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(q.pattern.size());
  return out;
}

Workload gen_queries(const Dataset& dataset, const WorkloadSpec& spec) {
  dataset.validate();
  if (dataset.size() == 0) throw std::invalid_argument("gen_queries: empty dataset");
  if (spec.k == 0) throw std::invalid_argument("gen_queries: k must be >= 1");
  std::mt19937_64 rng(spec.seed);

  const std::size_t dim = dataset.dim();
  std::vector<float> lo(dim, 0.0f), hi(dim, 0.0f);
  for (std::size_t j = 0; j < dim; ++j) lo[j] = hi[j] = dataset.vectors[1][j];
  for (VectorId id = 1; id <= dataset.size(); ++id) {
    const auto v = dataset.vectors[id];
    for (std::size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], v[j]);
      hi[j] = std::max(hi[j], v[j]);
    }
  }

  Workload w;
  w.k = spec.k;
  w.queries.reserve(spec.count_per_length * spec.lengths.size());
  for (std::size_t len : spec.lengths) {
    // Prefix sums of per-record occurrence counts for this length.
    std::vector<std::uint64_t> prefix;
    prefix.reserve(dataset.size());
    std::uint64_t total = 0;
    for (const auto& s : dataset.sequences) {
      if (len >= 1 && s.size() >= len) total += s.size() - len + 1;
      prefix.push_back(total);
    }
    if (total == 0) {
      throw std::invalid_argument("gen_queries: no substring of length " + std::to_string(len));
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    for (std::size_t c = 0; c < spec.count_per_length; ++c) {
      const std::uint64_t r = pick(rng);
      const auto rec = static_cast<std::size_t>(
          std::upper_bound(prefix.begin(), prefix.end(), r) - prefix.begin());
      const std::uint64_t before = rec == 0 ? 0 : prefix[rec - 1];
      const auto start = static_cast<std::size_t>(r - before);
      Query q;
      q.pattern = dataset.sequences[rec].substr(start, len);
      q.vector.resize(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        q.vector[j] = std::uniform_real_distribution<float>(lo[j], hi[j])(rng);
      }
      w.queries.push_back(std::move(q));
    }
  }
  return w;
}

void save_workload(const Workload& workload, const std::string& vectors_path,
                   const std::string& patterns_path) {
  Dataset as_records;
  for (const auto& q : workload.queries) {
    as_records.vectors.push_back(q.vector);
    as_records.sequences.push_back(q.pattern);
  }
  save_dataset(as_records, vectors_path, patterns_path);
}

Workload load_workload(const std::string& vectors_path, const std::string& patterns_path,
                       std::size_t k) {
  const Dataset records = load_dataset(vectors_path, patterns_path);
  Workload w;
  w.k = k;
  w.queries.reserve(records.size());
  for (VectorId id = 1; id <= records.size(); ++id) {
    const auto v = records.vectors[id];
    w.queries.push_back({std::vector<float>(v.begin(), v.end()), records.sequences[id - 1]});
  }
  return w;
}

}  // namespace vectormaton
