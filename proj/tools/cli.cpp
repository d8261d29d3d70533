#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "vectormaton/baselines.hpp"
#include "vectormaton/bench.hpp"
#include "vectormaton/index.hpp"

namespace vectormaton::cli {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::uint64_t parse_threshold(const std::string& text) {
  if (text == "inf" || text == "INF" || text == "infinity") return BuildConfig::kNoGraphs;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v == 0) {
    throw UsageError("--T must be a positive integer or 'inf'");
  }
  return v;
}

std::vector<float> parse_vector(std::string_view text) {
  std::vector<float> v;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string field(text.substr(0, comma));
    try {
      std::size_t used = 0;
      v.push_back(std::stof(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw UsageError("bad vector component '" + field + "'");
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (v.empty()) throw UsageError("empty vector");
  return v;
}

void print_result(std::ostream& out, const QueryResult& result) {
  for (const auto& n : result) out << n.id << '\t' << n.dist << '\n';
}

// Flags shared by `build` and `bench`.
struct BuildFlags {
  std::string threshold = "200";
  std::uint32_t M = 16;
  std::uint32_t ef_con = 200;
  std::size_t threads = 1;
  std::uint64_t seed = 0x5eed;
  bool no_reuse = false;
  std::string metric = "l2";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--T", threshold, "Skip-build threshold (integer or 'inf')");
    cmd->add_option("--M", M, "HNSW max degree")->check(CLI::Range(2u, 4096u));
    cmd->add_option("--ef-con", ef_con, "HNSW construction candidate list size");
    cmd->add_option("--threads", threads, "Build workers")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "HNSW seed");
    cmd->add_flag("--no-reuse", no_reuse, "Disable index reuse between states");
    cmd->add_option("--metric", metric, "l2 or cosine")->check(CLI::IsMember({"l2", "cosine"}));
  }

  BuildConfig config() const {
    BuildConfig c;
    c.threshold = parse_threshold(threshold);
    c.hnsw.M = M;
    c.hnsw.ef_construction = ef_con;
    c.hnsw.seed = seed;
    c.parallelism = threads;
    c.index_reuse = !no_reuse;
    return c;
  }

  Metric metric_value() const { return metric == "cosine" ? Metric::kCosine : Metric::kSquaredL2; }
};

VectorMatonIndex build_index(Dataset& dataset, const BuildFlags& flags) {
  dataset.vectors.set_metric(flags.metric_value());
  const BuildConfig config = flags.config();
  return config.parallelism > 1 ? VectorMatonIndex::build_parallel(dataset, config)
                                : VectorMatonIndex::build(dataset, config);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pattern-constrained approximate nearest neighbor search"};
  app.require_subcommand(1);

  // gen
  SyntheticSpec syn;
  WorkloadSpec wl;
  std::string gen_vectors, gen_sequences, gen_qvectors, gen_qpatterns;
  auto* gen = app.add_subcommand("gen", "Emit a synthetic dataset and optional query workload");
  gen->add_option("--n", syn.n, "Records")->check(CLI::PositiveNumber);
  gen->add_option("--dim", syn.dim, "Vector dimension")->check(CLI::PositiveNumber);
  gen->add_option("--min-len", syn.min_len, "Minimum sequence length");
  gen->add_option("--max-len", syn.max_len, "Maximum sequence length");
  gen->add_option("--alphabet", syn.alphabet_size, "Alphabet size")->check(CLI::Range(1, 94));
  gen->add_option("--seed", syn.seed, "Dataset seed");
  gen->add_option("--vectors", gen_vectors, "Output vector file")->required();
  gen->add_option("--sequences", gen_sequences, "Output sequence file")->required();
  gen->add_option("--queries-vectors", gen_qvectors, "Output query vector file");
  gen->add_option("--queries-patterns", gen_qpatterns, "Output query pattern file");
  gen->add_option("--count-per-length", wl.count_per_length, "Queries per pattern length");
  gen->add_option("--lengths", wl.lengths, "Pattern lengths")->delimiter(',');
  gen->add_option("--k", wl.k, "Result count")->check(CLI::PositiveNumber);
  gen->add_option("--query-seed", wl.seed, "Workload seed");

  // build
  BuildFlags build_flags;
  std::string build_vectors, build_sequences, build_out;
  auto* build = app.add_subcommand("build", "Build a VectorMaton snapshot");
  build->add_option("--vectors", build_vectors, "Vector file")->required();
  build->add_option("--sequences", build_sequences, "Sequence file")->required();
  build->add_option("--out", build_out, "Snapshot path")->required();
  build_flags.add_to(build);

  // query
  std::string query_snapshot, query_vector, query_pattern;
  std::size_t query_k = 10, query_ef = 64;
  auto* query = app.add_subcommand("query", "Run one constrained query against a snapshot");
  query->add_option("--snapshot", query_snapshot, "Snapshot path")->required();
  query->add_option("--vector", query_vector, "Comma-separated query vector")->required();
  query->add_option("--pattern", query_pattern, "Substring the result sequences must contain");
  query->add_option("--k", query_k, "Result count")->check(CLI::PositiveNumber);
  query->add_option("--ef-search", query_ef, "HNSW search candidate list size");

  // bench
  BuildFlags bench_flags;
  std::string bench_vectors, bench_sequences, bench_snapshot, bench_qvectors, bench_qpatterns,
      bench_out;
  WorkloadSpec bench_wl;
  bench_wl.count_per_length = 100;
  std::vector<std::string> methods{"vectormaton", "prefilter", "postfilter"};
  std::vector<std::size_t> ef_sweep = default_ef_sweep();
  std::uint64_t optquery_cap = OptQueryIndex::kDefaultInsertionCap;
  auto* bench = app.add_subcommand("bench", "Measure recall and QPS; writes CSV");
  bench->add_option("--vectors", bench_vectors, "Vector file")->required();
  bench->add_option("--sequences", bench_sequences, "Sequence file")->required();
  bench->add_option("--snapshot", bench_snapshot, "Use this snapshot instead of rebuilding");
  bench->add_option("--queries-vectors", bench_qvectors, "Query vector file");
  bench->add_option("--queries-patterns", bench_qpatterns, "Query pattern file");
  bench->add_option("--count-per-length", bench_wl.count_per_length, "Generated queries per length");
  bench->add_option("--lengths", bench_wl.lengths, "Generated pattern lengths")->delimiter(',');
  bench->add_option("--k", bench_wl.k, "Result count")->check(CLI::PositiveNumber);
  bench->add_option("--query-seed", bench_wl.seed, "Workload seed");
  bench->add_option("--methods", methods, "vectormaton,prefilter,postfilter,optquery")
      ->delimiter(',')
      ->check(CLI::IsMember({"vectormaton", "prefilter", "postfilter", "optquery"}));
  bench->add_option("--ef-search", ef_sweep, "ef_search values")->delimiter(',');
  bench->add_option("--optquery-cap", optquery_cap, "OptQuery insertion cap");
  bench->add_option("--out", bench_out, "CSV path (stdout when omitted)");
  bench_flags.add_to(bench);

  // maintain
  std::string maintain_snapshot, maintain_log, maintain_out;
  std::size_t maintain_ef = 64;
  auto* maintain = app.add_subcommand("maintain", "Apply an insert/delete/query log to a snapshot");
  maintain->add_option("--snapshot", maintain_snapshot, "Snapshot path")->required();
  maintain->add_option("--log", maintain_log, "Mutation log")->required();
  maintain->add_option("--out", maintain_out, "Write the updated snapshot here");
  maintain->add_option("--ef-search", maintain_ef, "ef_search for logged queries");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*gen) {
      const Dataset d = gen_synthetic(syn);
      save_dataset(d, gen_vectors, gen_sequences);
      out << "records " << d.size() << " total_length " << d.total_length() << '\n';
      if (!gen_qvectors.empty() || !gen_qpatterns.empty()) {
        if (gen_qvectors.empty() || gen_qpatterns.empty()) {
          throw UsageError("--queries-vectors and --queries-patterns go together");
        }
        const Workload w = gen_queries(d, wl);
        save_workload(w, gen_qvectors, gen_qpatterns);
        out << "queries " << w.queries.size() << '\n';
      }
    } else if (*build) {
      Dataset d = load_dataset(build_vectors, build_sequences);
      const auto start = std::chrono::steady_clock::now();
      const VectorMatonIndex index = build_index(d, build_flags);
      const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
      index.save(build_out);
      const IndexStats s = index.stats();
      out << "states " << s.states << " graphs " << s.graph_states << " id_sets "
          << s.total_id_set << " indexed_ids " << s.total_base << " build_seconds "
          << secs.count() << '\n';
    } else if (*query) {
      const VectorMatonIndex index = VectorMatonIndex::load(query_snapshot);
      print_result(out, index.query(parse_vector(query_vector), query_pattern, query_k, query_ef));
    } else if (*bench) {
      Dataset d = load_dataset(bench_vectors, bench_sequences);
      d.vectors.set_metric(bench_flags.metric_value());
      Workload w;
      if (!bench_qvectors.empty() || !bench_qpatterns.empty()) {
        if (bench_qvectors.empty() || bench_qpatterns.empty()) {
          throw UsageError("--queries-vectors and --queries-patterns go together");
        }
        w = load_workload(bench_qvectors, bench_qpatterns, bench_wl.k);
      } else {
        w = gen_queries(d, bench_wl);
      }
      const auto truth = ground_truth(d, w);

      std::vector<EvalRow> rows;
      for (const auto& name : methods) {
        Method m;
        m.name = name;
        std::shared_ptr<void> holder;
        if (name == "vectormaton") {
          auto idx = std::make_shared<VectorMatonIndex>(
              bench_snapshot.empty() ? build_index(d, bench_flags)
                                     : VectorMatonIndex::load(bench_snapshot));
          m.run = [idx](auto q, auto p, auto k, auto ef) { return idx->query(q, p, k, ef); };
        } else if (name == "prefilter") {
          auto pre = std::make_shared<PreFilter>(d);
          m.uses_ef_search = false;
          m.run = [pre](auto q, auto p, auto k, auto) { return pre->query(q, p, k); };
        } else if (name == "postfilter") {
          auto post = std::make_shared<PostFilter>(d, bench_flags.config().hnsw);
          m.run = [post](auto q, auto p, auto k, auto ef) { return post->query(q, p, k, ef); };
        } else {
          auto opt = std::make_shared<OptQueryIndex>(
              OptQueryIndex::build(d, bench_flags.config().hnsw, optquery_cap));
          m.run = [opt](auto q, auto p, auto k, auto ef) { return opt->query(q, p, k, ef); };
        }
        auto part = evaluate(m, w, truth, ef_sweep);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      if (bench_out.empty()) {
        write_csv(out, rows);
      } else {
        std::ofstream f(bench_out, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + bench_out + " for writing");
        write_csv(f, rows);
      }
    } else if (*maintain) {
      VectorMatonIndex index = VectorMatonIndex::load(maintain_snapshot);
      std::ifstream log(maintain_log, std::ios::binary);
      if (!log) throw FormatError("cannot open log " + maintain_log);
      std::string line;
      for (std::size_t lineno = 1; std::getline(log, line); ++lineno) {
        if (line.empty() || line[0] == '#') continue;
        // insert <v1,v2,...> <sequence>   delete <id>   query <v1,...> <k> <pattern>
        std::string_view rest = line;
        auto next_word = [&rest]() {
          const auto sp = rest.find(' ');
          std::string_view word = rest.substr(0, sp);
          rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
          return word;
        };
        const std::string_view op = next_word();
        const std::string where = "log line " + std::to_string(lineno) + ": ";
        try {
          if (op == "insert") {
            const auto v = parse_vector(next_word());
            out << "inserted " << index.insert(v, rest) << '\n';
          } else if (op == "delete") {
            const std::string id_text(next_word());
            VectorId id = 0;
            auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
            if (ec != std::errc{} || ptr != id_text.data() + id_text.size()) {
              throw FormatError("bad id '" + id_text + "'");
            }
            index.remove(id);
            out << "deleted " << id << '\n';
          } else if (op == "query") {
            const auto v = parse_vector(next_word());
            const std::string k_text(next_word());
            std::size_t k = 0;
            auto [ptr, ec] = std::from_chars(k_text.data(), k_text.data() + k_text.size(), k);
            if (ec != std::errc{} || ptr != k_text.data() + k_text.size()) {
              throw FormatError("bad k '" + k_text + "'");
            }
            const auto result = index.query(v, rest, k, std::max(maintain_ef, k));
            out << "query " << result.size() << '\n';
            print_result(out, result);
          } else {
            throw FormatError("unknown operation '" + std::string(op) + "'");
          }
        } catch (const FormatError& e) {
          throw FormatError(where + e.what());
        } catch (const std::invalid_argument& e) {
          throw FormatError(where + e.what());
        }
      }
      if (!maintain_out.empty()) index.save(maintain_out);
      const std::string check = index.check_exact_cover();
      if (!check.empty()) throw std::runtime_error("exact cover violated: " + check);
    }
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kResourceLimit;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace vectormaton::cli
