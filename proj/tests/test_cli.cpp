#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using vectormaton::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "vectormaton");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void generate(int n = 300) {
    const auto r = invoke({"gen", "--n", std::to_string(n), "--dim", "4", "--min-len", "3",
                           "--max-len", "10", "--alphabet", "4", "--vectors", path("v.bin"),
                           "--sequences", path("s.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenBuildQueryBench) {
  generate();
  auto b = invoke({"build", "--vectors", path("v.bin"), "--sequences", path("s.txt"), "--out",
                   path("idx.vmat"), "--T", "20"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NE(b.out.find("states "), std::string::npos);

  auto q = invoke({"query", "--snapshot", path("idx.vmat"), "--vector", "0.5,0.5,0.5,0.5",
                   "--pattern", "ab", "--k", "3"});
  ASSERT_EQ(q.code, 0) << q.err;
  EXPECT_NE(q.out.find('\t'), std::string::npos);

  auto unseen = invoke({"query", "--snapshot", path("idx.vmat"), "--vector", "0.5,0.5,0.5,0.5",
                        "--pattern", "zzzz"});
  EXPECT_EQ(unseen.code, 0);
  EXPECT_EQ(unseen.out, "");

  auto bench = invoke({"bench", "--vectors", path("v.bin"), "--sequences", path("s.txt"),
                       "--count-per-length", "10", "--ef-search", "10,40", "--methods",
                       "vectormaton,prefilter,postfilter,optquery", "--out", path("r.csv")});
  ASSERT_EQ(bench.code, 0) << bench.err;
  std::istringstream csv(slurp(path("r.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "method,ef_search,recall,qps,mean_latency_us");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2u + 1u + 2u + 2u);
}

TEST_F(Cli, ThreadCountDoesNotChangeSnapshot) {
  generate(800);
  for (const char* threads : {"1", "4"}) {
    auto r = invoke({"build", "--vectors", path("v.bin"), "--sequences", path("s.txt"), "--out",
                     path(std::string("t") + threads + ".vmat"), "--T", "30", "--threads", threads});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(path("t1.vmat")), slurp(path("t4.vmat")));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"build", "--vectors", "x"}).code, 2);
  EXPECT_EQ(invoke({"nonsense"}).code, 2);

  std::ofstream(path("junk.vmat"), std::ios::binary) << "not a snapshot";
  EXPECT_EQ(invoke({"query", "--snapshot", path("junk.vmat"), "--vector", "1,2"}).code, 3);

  generate(50);
  std::ofstream(path("short.txt"), std::ios::binary) << "ab\n";
  EXPECT_EQ(invoke({"build", "--vectors", path("v.bin"), "--sequences", path("short.txt"),
                    "--out", path("x.vmat")})
                .code,
            3);

  EXPECT_EQ(invoke({"bench", "--vectors", path("v.bin"), "--sequences", path("s.txt"),
                    "--count-per-length", "2", "--methods", "optquery", "--optquery-cap", "10"})
                .code,
            4);
}

TEST_F(Cli, MaintainLog) {
  generate(100);
  ASSERT_EQ(invoke({"build", "--vectors", path("v.bin"), "--sequences", path("s.txt"), "--out",
                    path("idx.vmat")})
                .code,
            0);
  std::ofstream(path("log.txt"), std::ios::binary)
      << "# a new record, then a query that must find it first\n"
      << "insert 9,9,9,9 qqqxq\n"
      << "query 9,9,9,9 1 qx\n"
      << "delete 101\n"
      << "query 9,9,9,9 1 qx\n";
  auto r = invoke({"maintain", "--snapshot", path("idx.vmat"), "--log", path("log.txt"), "--out",
                   path("after.vmat")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "inserted 101\nquery 1\n101\t0\ndeleted 101\nquery 0\n");
  EXPECT_TRUE(fs::exists(path("after.vmat")));

  std::ofstream(path("bad.txt"), std::ios::binary) << "frobnicate 1\n";
  EXPECT_EQ(invoke({"maintain", "--snapshot", path("idx.vmat"), "--log", path("bad.txt")}).code, 3);
}
