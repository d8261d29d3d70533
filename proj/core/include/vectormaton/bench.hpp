#pragma once

// Dataset files, synthetic data, query workloads and recall/throughput
// measurement.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vectormaton/core.hpp"

namespace vectormaton {

// ---------------------------------------------------------------------------
// Files
//
// Vector file: per vector a u32 LE dimension followed by that many f32 LE.
// Sequence file: one record per LF-terminated line, raw bytes.

void write_vectors(std::ostream& out, const VectorStore& vectors);
VectorStore read_vectors(std::istream& in);
void write_sequences(std::ostream& out, std::span<const std::string> sequences);
std::vector<std::string> read_sequences(std::istream& in);

Dataset load_dataset(const std::string& vectors_path, const std::string& sequences_path);
void save_dataset(const Dataset& dataset, const std::string& vectors_path,
                  const std::string& sequences_path);

// ---------------------------------------------------------------------------
// Generation

struct SyntheticSpec {
  std::size_t n = 1000;
  std::size_t dim = 16;
  std::size_t min_len = 5;
  std::size_t max_len = 20;
  std::size_t alphabet_size = 4;
  std::uint64_t seed = 42;
};

/// Symbol i of a synthetic alphabet: 'a'.. for sizes up to 26, otherwise
/// printable ASCII starting at '!'.
char alphabet_symbol(std::size_t i, std::size_t alphabet_size);

Dataset gen_synthetic(const SyntheticSpec& spec);

struct Query {
  std::vector<float> vector;
  std::string pattern;
};

struct Workload {
  std::vector<Query> queries;
  std::size_t k = 10;

  std::vector<std::size_t> pattern_lengths() const;
};

struct WorkloadSpec {
  std::size_t count_per_length = 1000;
  std::vector<std::size_t> lengths{2, 3, 4};
  std::size_t k = 10;
  std::uint64_t seed = 1;
};

/// Patterns are drawn uniformly from the occurrences of each length; vectors
/// uniformly from the bounding box of the data. Throws std::invalid_argument
/// when some length has no occurrence.
Workload gen_queries(const Dataset& dataset, const WorkloadSpec& spec);

void save_workload(const Workload& workload, const std::string& vectors_path,
                   const std::string& patterns_path);
Workload load_workload(const std::string& vectors_path, const std::string& patterns_path,
                       std::size_t k);

// ---------------------------------------------------------------------------
// Evaluation

struct EvalRow {
  std::string method;
  std::size_t ef_search = 0;
  double recall = 0.0;
  double qps = 0.0;
  double mean_latency_us = 0.0;

  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

/// A method under test. `run` receives (query vector, pattern, k, ef_search).
struct Method {
  std::string name;
  std::function<QueryResult(std::span<const float>, std::string_view, std::size_t, std::size_t)>
      run;
  /// False for methods that ignore ef_search; they get a single row.
  bool uses_ef_search = true;
};

/// Exact constrained top-k for every query (ties by id).
std::vector<QueryResult> ground_truth(const Dataset& dataset, const Workload& workload);

/// |result ∩ truth| / k. The denominator stays k when fewer than k records
/// qualify.
double recall_at_k(const QueryResult& result, const QueryResult& truth, std::size_t k);

std::vector<std::size_t> default_ef_sweep();

std::vector<EvalRow> evaluate(const Method& method, const Workload& workload,
                              std::span<const QueryResult> truth,
                              std::span<const std::size_t> ef_sweep);

/// Per-query recall at one ef_search value, in workload order.
std::vector<double> per_query_recall(const Method& method, const Workload& workload,
                                     std::span<const QueryResult> truth, std::size_t ef_search);

inline constexpr std::string_view kCsvHeader = "method,ef_search,recall,qps,mean_latency_us";

void write_csv(std::ostream& out, std::span<const EvalRow> rows);
/// Throws FormatError on a malformed header or row.
std::vector<EvalRow> read_csv(std::istream& in);

}  // namespace vectormaton
