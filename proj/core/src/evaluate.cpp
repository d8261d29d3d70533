#include <algorithm>
#include <charconv>
#include <chrono>
#include <istream>
#include <ostream>
#include <string>

#include "vectormaton/baselines.hpp"
#include "vectormaton/bench.hpp"

namespace vectormaton {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw FormatError("csv: bad numeric field '" + std::string(field) + "' on line " +
                      std::to_string(line));
  }
  return value;
}

}  // namespace

std::vector<QueryResult> ground_truth(const Dataset& dataset, const Workload& workload) {
  const PreFilter exact(dataset);
  std::vector<QueryResult> truth;
  truth.reserve(workload.queries.size());
  for (const auto& q : workload.queries) truth.push_back(exact.query(q.vector, q.pattern, workload.k));
  return truth;
}

double recall_at_k(const QueryResult& result, const QueryResult& truth, std::size_t k) {
  if (k == 0) return 0.0;
  std::vector<VectorId> want;
  for (std::size_t i = 0; i < truth.size() && i < k; ++i) want.push_back(truth[i].id);
  std::sort(want.begin(), want.end());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < result.size() && i < k; ++i) {
    if (std::binary_search(want.begin(), want.end(), result[i].id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::vector<std::size_t> default_ef_sweep() { return {8, 16, 32, 64, 128, 256, 512, 1024}; }

std::vector<double> per_query_recall(const Method& method, const Workload& workload,
                                     std::span<const QueryResult> truth, std::size_t ef_search) {
  const std::size_t ef = std::max(ef_search, workload.k);
  std::vector<double> out;
  out.reserve(workload.queries.size());
  for (std::size_t i = 0; i < workload.queries.size(); ++i) {
    const auto& q = workload.queries[i];
    out.push_back(recall_at_k(method.run(q.vector, q.pattern, workload.k, ef), truth[i], workload.k));
  }
  return out;
}

std::vector<EvalRow> evaluate(const Method& method, const Workload& workload,
                              std::span<const QueryResult> truth,
                              std::span<const std::size_t> ef_sweep) {
  if (truth.size() != workload.queries.size()) {
    throw std::invalid_argument("evaluate: ground truth size differs from workload");
  }
  std::vector<std::size_t> sweep(ef_sweep.begin(), ef_sweep.end());
  if (!method.uses_ef_search || sweep.empty()) sweep = {0};

  std::vector<EvalRow> rows;
  std::vector<QueryResult> results(workload.queries.size());
  for (std::size_t ef : sweep) {
    // ef_search below k is run at k; the row keeps the requested value.
    const std::size_t effective = std::max(ef, workload.k);
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < workload.queries.size(); ++i) {
      const auto& q = workload.queries[i];
      results[i] = method.run(q.vector, q.pattern, workload.k, effective);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    double recall_sum = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      recall_sum += recall_at_k(results[i], truth[i], workload.k);
    }
    EvalRow row;
    row.method = method.name;
    row.ef_search = ef;
    const auto n = static_cast<double>(workload.queries.size());
    row.recall = n > 0 ? recall_sum / n : 0.0;
    const double seconds = std::max(elapsed.count(), 1e-9);
    row.qps = n / seconds;
    row.mean_latency_us = n > 0 ? seconds * 1e6 / n : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, std::span<const EvalRow> rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    if (r.method.find_first_of(",\n") != std::string::npos) {
      throw std::invalid_argument("csv: method name contains a separator");
    }
    out << r.method << ',' << r.ef_search << ',' << format_double(r.recall) << ','
        << format_double(r.qps) << ',' << format_double(r.mean_latency_us) << '\n';
  }
}

std::vector<EvalRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw FormatError("csv: missing header");
  std::vector<EvalRow> rows;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 5) {
      throw FormatError("csv: expected 5 fields on line " + std::to_string(lineno));
    }
    EvalRow r;
    r.method = std::string(fields[0]);
    r.ef_search = parse_field<std::size_t>(fields[1], lineno);
    r.recall = parse_field<double>(fields[2], lineno);
    r.qps = parse_field<double>(fields[3], lineno);
    r.mean_latency_us = parse_field<double>(fields[4], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace vectormaton
