#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "vectormaton/esam.hpp"

using namespace vectormaton;
using vectormaton::testing::random_sequences;
using vectormaton::testing::witness_patterns;

namespace {

Esam build(const std::vector<std::string>& seqs) {
  Esam a;
  for (std::size_t i = 0; i < seqs.size(); ++i) a.add_sequence(static_cast<VectorId>(i + 1), seqs[i]);
  return a;
}

void expect_structural_invariants(const Esam& a) {
  const auto& root = a.state(Esam::kRoot);
  EXPECT_EQ(root.max_len, 0u);
  EXPECT_FALSE(root.suffix_link.has_value());
  for (StateId u = 0; u < a.state_count(); ++u) {
    const auto& st = a.state(u);
    if (u != Esam::kRoot) {
      ASSERT_TRUE(st.suffix_link.has_value());
      EXPECT_LT(a.state(*st.suffix_link).max_len, st.max_len);
    }
    for (const auto& [c, v] : st.transitions) {
      const auto& next = a.state(v);
      EXPECT_GE(next.max_len, st.max_len + 1);
      EXPECT_TRUE(std::includes(st.ids.begin(), st.ids.end(), next.ids.begin(), next.ids.end()));
    }
  }
}

}  // namespace

TEST(Esam, BananaAcceptsNana) {
  const Esam a = build({"banana"});
  EXPECT_TRUE(a.locate("nana").has_value());
  EXPECT_FALSE(a.locate("nanb").has_value());
  EXPECT_EQ(a.locate(""), Esam::kRoot);
  EXPECT_LE(a.state_count(), 2u * 6u + 1u);
}

TEST(Esam, EquivalentPatternsShareState) {
  const Esam a = build({"banana"});
  ASSERT_TRUE(a.locate("anan") && a.locate("banan"));
  EXPECT_EQ(*a.locate("anan"), *a.locate("banan"));
  EXPECT_EQ(a.state(*a.locate("anan")).max_len, 5u);
  EXPECT_NE(*a.locate("ana"), *a.locate("anan"));
}

TEST(Esam, ExtendAddsRootTransition) {
  Esam a;
  a.begin_sequence(1);
  a.extend('b');
  a.propagate_id();
  a.extend('a');
  a.propagate_id();
  EXPECT_FALSE(a.state(Esam::kRoot).next('n').has_value());
  const ExtendEvent ev = a.extend('n');
  ASSERT_TRUE(ev.created.has_value());
  EXPECT_EQ(a.state(Esam::kRoot).next('n'), ev.created);
  EXPECT_EQ(a.state(*ev.created).max_len, 3u);
}

TEST(Esam, ExistingTransitionCreatesNoState) {
  Esam a;
  a.add_sequence(1, "aa");
  const std::size_t before = a.state_count();
  a.begin_sequence(2);
  const ExtendEvent ev = a.extend('a');
  EXPECT_FALSE(ev.created.has_value());
  EXPECT_FALSE(ev.cloned.has_value());
  EXPECT_EQ(a.state_count(), before);
}

TEST(Esam, ExistingTransitionSplitsLongerClass) {
  // "ab" gives root -b-> the "ab" class; a second sequence "b" must split it.
  Esam a;
  a.add_sequence(1, "ab");
  a.begin_sequence(2);
  const ExtendEvent ev = a.extend('b');
  EXPECT_FALSE(ev.created.has_value());
  ASSERT_TRUE(ev.cloned.has_value());
  a.propagate_id();
  EXPECT_EQ(a.state(*a.locate("b")).ids, (std::vector<VectorId>{1, 2}));
  EXPECT_EQ(a.state(*a.locate("ab")).ids, (std::vector<VectorId>{1}));
}

TEST(Esam, FirstSymbolPropagatesToChainOfTwo) {
  Esam a;
  a.begin_sequence(5);
  a.extend('x');
  const auto touched = a.propagate_id();
  ASSERT_EQ(touched.size(), 2u);
  EXPECT_EQ(touched.back(), Esam::kRoot);
  EXPECT_EQ(a.state(Esam::kRoot).ids, (std::vector<VectorId>{5}));
  EXPECT_EQ(a.state(touched.front()).ids, (std::vector<VectorId>{5}));
}

TEST(Esam, DistinguishesOccurrenceSets) {
  const Esam a = build({"ac", "acab", "acba"});
  ASSERT_TRUE(a.locate("cab") && a.locate("cba"));
  EXPECT_NE(*a.locate("cab"), *a.locate("cba"));
  EXPECT_EQ(a.state(*a.locate("cab")).ids, (std::vector<VectorId>{2}));
  EXPECT_EQ(a.state(*a.locate("cba")).ids, (std::vector<VectorId>{3}));
  EXPECT_EQ(a.state(*a.locate("ac")).ids, (std::vector<VectorId>{1, 2, 3}));
}

TEST(Esam, EmptyAndDuplicateSequences) {
  Esam a;
  a.add_sequence(1, "");
  EXPECT_EQ(a.state_count(), 1u);
  EXPECT_EQ(a.state(Esam::kRoot).ids, (std::vector<VectorId>{1}));
  a.add_sequence(2, "abc");
  a.add_sequence(3, "abc");
  EXPECT_EQ(a.state(*a.locate("abc")).ids, (std::vector<VectorId>{2, 3}));
  EXPECT_EQ(a.state(Esam::kRoot).ids, (std::vector<VectorId>{1, 2, 3}));
  EXPECT_THROW(a.add_sequence(2, "x"), std::invalid_argument);
  EXPECT_THROW(a.add_sequence(0, "x"), std::invalid_argument);
}

TEST(Esam, IdSetsMatchOracleOnRandomCollections) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const std::size_t alphabet = std::vector<std::size_t>{1, 2, 3, 4, 26}[seed % 5];
    const Dataset d = random_sequences(12, 0, 15, alphabet, seed);
    const Esam a = build(d.sequences);
    expect_structural_invariants(a);
    const auto witness = witness_patterns(a);
    for (StateId u = 0; u < a.state_count(); ++u) {
      ASSERT_EQ(witness[u].size(), a.state(u).max_len) << "seed " << seed << " state " << u;
      ASSERT_EQ(a.locate(witness[u]), u);
      EXPECT_EQ(a.state(u).ids, vp_oracle(d, witness[u])) << "seed " << seed << " state " << u;
    }
  }
}

TEST(Esam, ContainmentCompleteness) {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset d = random_sequences(10, 1, 20, 3, seed);
    ASSERT_LE(d.total_length(), 200u);
    const Esam a = build(d.sequences);
    for (const auto& p : vectormaton::testing::all_substrings(d.sequences)) {
      const auto s = a.locate(p);
      ASSERT_TRUE(s.has_value()) << p;
      EXPECT_EQ(a.state(*s).ids, vp_oracle(d, p));
    }
    int absent = 0;
    while (absent < 100) {
      std::string p(rng() % 8 + 1, 'a');
      for (auto& ch : p) ch = static_cast<char>('a' + rng() % 4);
      if (!vp_oracle(d, p).empty()) continue;
      EXPECT_FALSE(a.locate(p).has_value()) << p;
      ++absent;
    }
  }
}

TEST(Esam, LinearSizeBounds) {
  std::vector<std::vector<std::string>> collections{
      {std::string(200, 'a')},
      {"abababababababababab", "babababab", "ab"},
      {std::string(50, 'a'), std::string(30, 'a'), "aab"},
  };
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    collections.push_back(random_sequences(30, 1, 30, 2 + seed % 3, seed).sequences);
  }
  for (const auto& c : collections) {
    const Esam a = build(c);
    const std::size_t m = a.total_length();
    ASSERT_GE(m, 2u);
    EXPECT_LE(a.state_count(), 2 * m + 1);
    EXPECT_LE(a.transition_count(), 3 * m);
    const double bound = 2.0 * std::pow(static_cast<double>(m), 1.5);
    EXPECT_LE(static_cast<double>(a.total_id_count()), bound);
  }
}

TEST(Esam, SuffixLinksReachRoot) {
  const Esam a = build(random_sequences(40, 1, 25, 3, 4).sequences);
  for (StateId u = 0; u < a.state_count(); ++u) {
    std::optional<StateId> cur = u;
    std::size_t steps = 0;
    std::uint32_t prev = a.state(u).max_len + 1;
    while (cur) {
      EXPECT_LT(a.state(*cur).max_len, prev);
      prev = a.state(*cur).max_len;
      if (!a.state(*cur).suffix_link) EXPECT_EQ(*cur, Esam::kRoot);
      cur = a.state(*cur).suffix_link;
      ASSERT_LT(++steps, a.state_count() + 1);
    }
  }
}

TEST(Esam, ReverseTopologicalOrder) {
  const Esam a = build(random_sequences(40, 1, 25, 3, 6).sequences);
  const auto order = a.reverse_topological_order();
  std::vector<std::size_t> pos(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (StateId u = 0; u < a.state_count(); ++u) {
    for (const auto& [c, v] : a.state(u).transitions) EXPECT_LT(pos[v], pos[u]);
  }
}

TEST(Esam, SerializeRoundTrip) {
  const Esam a = build(random_sequences(25, 0, 20, 4, 9).sequences);
  io::ByteWriter w;
  a.serialize(w);
  io::ByteReader r(w.bytes());
  const Esam back = Esam::deserialize(r);
  EXPECT_TRUE(r.at_end());
  EXPECT_TRUE(back == a);
  EXPECT_EQ(back.total_length(), a.total_length());
  EXPECT_EQ(back.sequence_count(), a.sequence_count());
  io::ByteWriter again;
  back.serialize(again);
  EXPECT_EQ(again.bytes(), w.bytes());
}
