#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vectormaton/baselines.hpp"
#include "vectormaton/index.hpp"

using namespace vectormaton;
using vectormaton::testing::random_sequences;
using vectormaton::testing::sequences_only;

namespace {

std::vector<VectorId> graph_ids(const HnswGraph* g) {
  if (!g) return {};
  auto ids = g->node_ids();
  std::sort(ids.begin(), ids.end());
  return ids;
}

HnswParams small_params() {
  HnswParams p;
  p.M = 8;
  p.ef_construction = 32;
  return p;
}

}  // namespace

TEST(OptQuery, SingleSequenceGraphs) {
  const auto opt = OptQueryIndex::build(sequences_only({"ab"}), HnswParams{});
  EXPECT_EQ(opt.pattern_count(), 3u);
  for (const char* p : {"a", "b", "ab"}) {
    EXPECT_EQ(graph_ids(opt.graph(p)), (std::vector<VectorId>{1})) << p;
  }
  EXPECT_EQ(opt.graph("ba"), nullptr);
}

TEST(OptQuery, PatternGraphsHoldMatchingRecords) {
  const auto opt = OptQueryIndex::build(sequences_only({"ac", "acab", "acba"}), HnswParams{});
  EXPECT_EQ(graph_ids(opt.graph("ac")), (std::vector<VectorId>{1, 2, 3}));
  EXPECT_EQ(graph_ids(opt.graph("cab")), (std::vector<VectorId>{2}));
  EXPECT_EQ(graph_ids(opt.graph("cba")), (std::vector<VectorId>{3}));
}

TEST(OptQuery, EnumeratesEverySubstringOccurrence) {
  const std::string s = "abcdefghij";
  const auto opt = OptQueryIndex::build(sequences_only({s}), HnswParams{});
  EXPECT_EQ(opt.enumerated_substrings(), s.size() * (s.size() + 1) / 2);
  // "aaaa" has only four distinct substrings, each inserted once.
  const auto rep = OptQueryIndex::build(sequences_only({"aaaa"}), HnswParams{});
  EXPECT_EQ(rep.enumerated_substrings(), 10u);
  EXPECT_EQ(rep.total_insertions(), 4u);
}

TEST(OptQuery, InsertionCap) {
  const Dataset d = random_sequences(20, 10, 10, 4, 1);
  EXPECT_THROW(OptQueryIndex::build(d, small_params(), 100), ResourceLimitError);
  EXPECT_NO_THROW(OptQueryIndex::build(d, small_params(), 1'000'000));
}

TEST(OptQuery, ExhaustiveEfMatchesOracle) {
  const Dataset d = random_sequences(150, 2, 10, 3, 2);
  const auto opt = OptQueryIndex::build(d, small_params());
  std::mt19937_64 rng(20);
  for (int t = 0; t < 100; ++t) {
    const auto q = vectormaton::testing::random_vector(rng, 4);
    const auto& s = d.sequences[rng() % d.size()];
    const std::string p = s.substr(rng() % s.size(), 2);
    EXPECT_EQ(opt.query(q, p, 5, d.size()), brute_force_topk(q, vp_oracle(d, p), 5, d.vectors));
  }
  EXPECT_TRUE(opt.query(std::vector<float>(4, 0.f), "zz", 5, 10).empty());
}

TEST(PreFilter, MatchesOracle) {
  const Dataset d = random_sequences(300, 0, 12, 4, 3);
  const PreFilter pre(d);
  std::mt19937_64 rng(30);
  for (int t = 0; t < 200; ++t) {
    const auto q = vectormaton::testing::random_vector(rng, 4);
    std::string p(1 + rng() % 3, 'a');
    for (auto& c : p) c = static_cast<char>('a' + rng() % 4);
    const auto want = vp_oracle(d, p);
    EXPECT_TRUE(std::ranges::equal(pre.matching_ids(p), want));
    EXPECT_EQ(pre.query(q, p, 7), brute_force_topk(q, want, 7, d.vectors));
  }
}

TEST(PreFilter, EmptyPatternIsGlobalSearch) {
  const Dataset d = random_sequences(100, 0, 6, 3, 4);
  const PreFilter pre(d);
  std::vector<VectorId> all(d.size());
  std::iota(all.begin(), all.end(), VectorId{1});
  const std::vector<float> q(4, 0.4f);
  EXPECT_EQ(pre.query(q, "", 10), brute_force_topk(q, all, 10, d.vectors));
}

TEST(PostFilter, EmptyPatternEqualsGlobalGraph) {
  const Dataset d = random_sequences(500, 1, 8, 3, 5);
  const PostFilter post(d, HnswParams{});
  std::mt19937_64 rng(50);
  for (int t = 0; t < 30; ++t) {
    const auto q = vectormaton::testing::random_vector(rng, 4);
    EXPECT_EQ(post.query(q, "", 10, 64), post.graph().search(q, 10, 64, d.vectors));
  }
}

TEST(PostFilter, LosesSelectiveFarMatches) {
  // One record carries "zz" and sits far from the query; a small pool misses it.
  Dataset d = random_sequences(400, 3, 8, 3, 6);
  d.vectors = VectorStore(4);
  std::mt19937_64 rng(60);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d.vectors.push_back(vectormaton::testing::random_vector(rng, 4));
  }
  d.vectors.push_back(std::vector<float>(4, 50.0f));
  d.sequences.push_back("zz");
  const PostFilter post(d, HnswParams{});
  const std::vector<float> q(4, 0.5f);
  EXPECT_TRUE(post.query(q, "zz", 1, 16).empty());
  const auto full = post.query(q, "zz", 1, d.size());
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].id, d.size());
}

TEST(PostFilter, FullPoolEqualsPreFilter) {
  const Dataset d = random_sequences(300, 2, 10, 3, 7);
  const PostFilter post(d, HnswParams{});
  const PreFilter pre(d);
  std::mt19937_64 rng(70);
  for (int t = 0; t < 50; ++t) {
    const auto q = vectormaton::testing::random_vector(rng, 4);
    const std::string p(1, static_cast<char>('a' + rng() % 3));
    EXPECT_EQ(post.query(q, p, 10, d.size()), pre.query(q, p, 10));
  }
}

TEST(Baselines, AgreeWithVectorMatonOnMotif) {
  const Dataset d = vectormaton::testing::motif_scenario();
  const auto& q = vectormaton::testing::kMotifQuery;
  const auto opt = OptQueryIndex::build(d, HnswParams{});
  const PreFilter pre(d);
  const PostFilter post(d, HnswParams{});
  const auto vm = VectorMatonIndex::build(d, BuildConfig{});
  const auto want = vm.query(q, "AAA", 1, 3);
  ASSERT_EQ(want.size(), 1u);
  EXPECT_EQ(want[0].id, 3u);
  EXPECT_EQ(opt.query(q, "AAA", 1, 3), want);
  EXPECT_EQ(pre.query(q, "AAA", 1), want);
  EXPECT_EQ(post.query(q, "AAA", 1, 3), want);
}
