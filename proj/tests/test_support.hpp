#pragma once

// Test-only oracles and fixtures. Nothing here calls into the code paths it
// is used to check beyond reading finished structures.

#include <cstdint>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "vectormaton/bench.hpp"
#include "vectormaton/core.hpp"
#include "vectormaton/esam.hpp"

namespace vectormaton::testing {

inline Dataset make_dataset(std::vector<std::vector<float>> vectors,
                            std::vector<std::string> sequences) {
  Dataset d;
  for (const auto& v : vectors) d.vectors.push_back(v);
  d.sequences = std::move(sequences);
  return d;
}

/// Sequences with 2-d vectors spread on a line; vectors are irrelevant to
/// automaton tests.
inline Dataset sequences_only(std::vector<std::string> sequences) {
  Dataset d;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    d.vectors.push_back(std::vector<float>{static_cast<float>(i), 0.0f});
  }
  d.sequences = std::move(sequences);
  return d;
}

/// Three motif-tagged records: v1 is nearest to the query but lacks "AAA",
/// v2 and v3 contain it and v3 is the nearer of the two.
inline Dataset motif_scenario() {
  return make_dataset({{1.0f, 1.1f}, {5.0f, 5.0f}, {1.5f, 1.5f}},
                      {"MKTLLVG", "GAAAKLM", "PAAAQ"});
}
inline const std::vector<float> kMotifQuery{1.0f, 1.0f};

inline Dataset random_sequences(std::size_t n, std::size_t min_len, std::size_t max_len,
                                std::size_t alphabet, std::uint64_t seed, std::size_t dim = 4) {
  SyntheticSpec spec;
  spec.n = n;
  spec.dim = dim;
  spec.min_len = min_len;
  spec.max_len = max_len;
  spec.alphabet_size = alphabet;
  spec.seed = seed;
  return gen_synthetic(spec);
}

/// For every state, the label of a longest root path (its maximal pattern),
/// found by a longest-path pass over the transition DAG in Kahn order.
inline std::vector<std::string> witness_patterns(const Esam& esam) {
  const std::size_t n = esam.state_count();
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& st : esam.states()) {
    for (const auto& [c, v] : st.transitions) ++indegree[v];
  }
  std::vector<long> best(n, -1);
  std::vector<std::string> label(n);
  best[Esam::kRoot] = 0;
  std::queue<StateId> ready;
  for (StateId u = 0; u < n; ++u) {
    if (indegree[u] == 0) ready.push(u);
  }
  while (!ready.empty()) {
    const StateId u = ready.front();
    ready.pop();
    for (const auto& [c, v] : esam.state(u).transitions) {
      if (best[u] >= 0 && best[u] + 1 > best[v]) {
        best[v] = best[u] + 1;
        label[v] = label[u] + static_cast<char>(c);
      }
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  return label;
}

inline std::vector<std::string> all_substrings(const std::vector<std::string>& sequences) {
  std::vector<std::string> out;
  for (const auto& s : sequences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j <= s.size(); ++j) out.push_back(s.substr(i, j - i));
    }
  }
  return out;
}

inline std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(dim);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace vectormaton::testing
