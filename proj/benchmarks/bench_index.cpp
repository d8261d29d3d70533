#include <benchmark/benchmark.h>

#include <random>

#include "vectormaton/baselines.hpp"
#include "vectormaton/bench.hpp"
#include "vectormaton/index.hpp"

using namespace vectormaton;

namespace {

const Dataset& dataset() {
  static const Dataset d = [] {
    SyntheticSpec spec;
    spec.n = 5000;
    spec.dim = 16;
    spec.min_len = 10;
    spec.max_len = 20;
    spec.alphabet_size = 8;
    return gen_synthetic(spec);
  }();
  return d;
}

const Workload& workload() {
  static const Workload w = [] {
    WorkloadSpec spec;
    spec.count_per_length = 100;
    return gen_queries(dataset(), spec);
  }();
  return w;
}

const VectorMatonIndex& index() {
  static const VectorMatonIndex idx = VectorMatonIndex::build(dataset(), BuildConfig{});
  return idx;
}

void BM_EsamBuild(benchmark::State& state) {
  for (auto _ : state) {
    Esam a;
    for (std::size_t i = 0; i < dataset().size(); ++i) {
      a.add_sequence(static_cast<VectorId>(i + 1), dataset().sequences[i]);
    }
    benchmark::DoNotOptimize(a.state_count());
  }
}
BENCHMARK(BM_EsamBuild)->Unit(benchmark::kMillisecond);

void BM_IndexBuild(benchmark::State& state) {
  BuildConfig c;
  c.threshold = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(VectorMatonIndex::build(dataset(), c).size());
  }
}
BENCHMARK(BM_IndexBuild)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_VectorMatonQuery(benchmark::State& state) {
  const auto& idx = index();
  const auto& w = workload();
  const auto ef = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = w.queries[i++ % w.queries.size()];
    benchmark::DoNotOptimize(idx.query(q.vector, q.pattern, w.k, ef));
  }
}
BENCHMARK(BM_VectorMatonQuery)->Arg(16)->Arg(64)->Arg(256);

void BM_PreFilterQuery(benchmark::State& state) {
  static const PreFilter pre(dataset());
  const auto& w = workload();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = w.queries[i++ % w.queries.size()];
    benchmark::DoNotOptimize(pre.query(q.vector, q.pattern, w.k));
  }
}
BENCHMARK(BM_PreFilterQuery);

void BM_PostFilterQuery(benchmark::State& state) {
  static const PostFilter post(dataset(), HnswParams{});
  const auto& w = workload();
  const auto ef = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = w.queries[i++ % w.queries.size()];
    benchmark::DoNotOptimize(post.query(q.vector, q.pattern, w.k, ef));
  }
}
BENCHMARK(BM_PostFilterQuery)->Arg(64)->Arg(256);

void BM_HnswInsert(benchmark::State& state) {
  const auto& store = dataset().vectors;
  for (auto _ : state) {
    HnswGraph g;
    for (VectorId id = 1; id <= 1000; ++id) g.insert(id, store);
    benchmark::DoNotOptimize(g.size());
  }
}
BENCHMARK(BM_HnswInsert)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
