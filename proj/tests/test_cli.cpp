#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "evpq");
  std::ostringstream out, err;
  const int code = evpq::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "evpq_tests" /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
  }
  std::string dir() const { return dir_.string(); }
  json read_json(const std::string& name) const {
    std::ifstream f(dir_ / name);
    return json::parse(f);
  }
  std::string read_bytes(const fs::path& p) const {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
  }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenWritesRawFileAndManifest) {
  auto r = run({"gen", "--n", "1000", "--d", "100", "--seed", "1", "--out", "a.f32", "--out-dir", dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fs::file_size(dir_ / "a.f32"), 400000U);
  auto m = read_json("gen-manifest.json");
  EXPECT_EQ(m["config"]["seed"], 1);
  EXPECT_EQ(m["config"]["d"], 100);
  EXPECT_EQ(m["config"]["n"], 1000);

  r = run({"gen", "--n", "1000", "--d", "100", "--seed", "1", "--out", "b.f32", "--out-dir", dir()});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_bytes(dir_ / "a.f32"), read_bytes(dir_ / "b.f32"));
}

TEST_F(CliTest, GenRejectsZeroDimension) {
  auto r = run({"gen", "--d", "0", "--out-dir", dir()});
  EXPECT_EQ(r.code, evpq::cli::kValidation);
  EXPECT_NE(r.err.find("--d"), std::string::npos);
}

TEST_F(CliTest, OutputDirFromEnvironment) {
  ::setenv(evpq::cli::kOutputDirEnv, dir().c_str(), 1);
  auto r = run({"gen", "--n", "10", "--d", "4"});
  ::unsetenv(evpq::cli::kOutputDirEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "gen-manifest.json"));
}

TEST_F(CliTest, QuantizeLogsXAndVertexExponent) {
  auto r = run({"quantize", "--quantizer", "evp", "--d", "384", "--n", "50", "--out-dir", dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("x=256"), std::string::npos);
  EXPECT_NE(r.out.find("log10_vertices=181.85"), std::string::npos);
  EXPECT_EQ(read_bytes(dir_ / "codes-evp.evpq").substr(0, 4), "EVPB");
}

TEST_F(CliTest, QuantizeOneBitWritesSinglePlaneFile) {
  auto r = run({"quantize", "--quantizer", "one-bit", "--d", "100", "--n", "20", "--out-dir", dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto bytes = read_bytes(dir_ / "codes-one-bit.evpq");
  EXPECT_EQ(bytes.substr(0, 4), "EVPS");
  EXPECT_EQ(bytes.size(), 21U + 20U * 32U);  // one 256-bit plane per row
}

TEST_F(CliTest, QuantizeRejectsXAboveD) {
  auto r = run({"quantize", "--x", "400", "--d", "384", "--out-dir", dir()});
  EXPECT_EQ(r.code, evpq::cli::kValidation);
}

TEST_F(CliTest, QuantizeLoadsDataFile) {
  ASSERT_EQ(run({"gen", "--n", "30", "--d", "8", "--format", "csv", "--out", "v.csv", "--out-dir", dir()}).code, 0);
  auto r = run({"quantize", "--data", (dir_ / "v.csv").string(), "--d", "8", "--out-dir", dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("30 rows"), std::string::npos);
  r = run({"quantize", "--data", (dir_ / "missing.f32").string(), "--d", "8", "--out-dir", dir()});
  EXPECT_EQ(r.code, evpq::cli::kIo);
  r = run({"quantize", "--data", (dir_ / "v.csv").string(), "--d", "9", "--out-dir", dir()});
  EXPECT_EQ(r.code, evpq::cli::kIo);
}

TEST_F(CliTest, CorrelateEmitsShepardIsotonicAndSummary) {
  auto r = run({"correlate", "--d", "50", "--n", "300", "--pairs", "500", "--out-dir", dir(), "--pretty"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto s = read_json("spearman.json");
  ASSERT_EQ(s["results"].size(), 3U);
  for (const auto& rec : s["results"]) {
    for (const char* key : {"dataset", "quantizer", "rho", "n_pairs", "seed"}) EXPECT_TRUE(rec.contains(key));
    EXPECT_EQ(rec["n_pairs"], 500);
    const auto q = rec["quantizer"].get<std::string>();
    std::ifstream csv(dir_ / ("shepard-" + q + ".csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "proxy_value,true_distance");
    EXPECT_TRUE(fs::exists(dir_ / ("isotonic-" + q + ".csv")));
  }
  EXPECT_NE(r.out.find("one-bit"), std::string::npos);
}

TEST_F(CliTest, CorrelateNeedsEnoughDistinctPairs) {
  auto r = run({"correlate", "--d", "4", "--n", "3", "--pairs", "10", "--out-dir", dir()});
  EXPECT_EQ(r.code, evpq::cli::kValidation);
  EXPECT_NE(r.err.find("distinct pairs"), std::string::npos);
}

TEST_F(CliTest, RecallReportsEveryDepthPerQuantizer) {
  auto r = run({"recall", "--d", "32", "--n", "2000", "--sample-queries", "20", "--k", "30", "--ns",
                "30,100,500", "--out-dir", dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = read_json("recall.json");
  ASSERT_EQ(j["results"].size(), 9U);
  std::map<std::string, std::vector<double>> means;
  for (const auto& rec : j["results"]) {
    means[rec["quantizer"].get<std::string>()].push_back(rec["mean"].get<double>());
    EXPECT_EQ(rec["histogram"]["counts"].size(), 20U);
    EXPECT_EQ(rec["per_query"].size(), 20U);
  }
  ASSERT_EQ(means.size(), 3U);
  for (const auto& [q, m] : means) {
    ASSERT_EQ(m.size(), 3U);
    EXPECT_LE(m[0], m[1]) << q;
    EXPECT_LE(m[1], m[2]) << q;
  }
}

TEST_F(CliTest, RecallRejectsDepthBelowK) {
  auto r = run({"recall", "--d", "8", "--n", "100", "--sample-queries", "5", "--ns", "10", "--out-dir", dir()});
  EXPECT_EQ(r.code, evpq::cli::kValidation);
  r = run({"recall", "--d", "8", "--n", "100", "--sample-queries", "500", "--out-dir", dir()});
  EXPECT_EQ(r.code, evpq::cli::kValidation);
}

TEST_F(CliTest, BenchKernelReportsFourStatistics) {
  auto r = run({"bench", "--kernel", "b2sp", "--d", "384", "--count", "20000", "--trials", "3", "--out-dir", dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = read_json("bench-b2sp.json");
  for (const char* key : {"kernel", "d", "count", "trials", "fastest_ms", "slowest_ms", "median_ms",
                          "mean_ms", "per_op_ns", "hardware"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["trials"], 3);
}

TEST_F(CliTest, BenchFullScanIsFaster) {
  auto r = run({"bench", "--full-scan", "--d", "384", "--n", "2000", "--trials", "2", "--out-dir", dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(read_json("bench-full-scan-evp.json")["speedup"].get<double>(), 1.0);
}

TEST_F(CliTest, BenchRejectsUnknownKernel) {
  auto r = run({"bench", "--kernel", "bogus", "--out-dir", dir()});
  EXPECT_EQ(r.code, evpq::cli::kValidation);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST_F(CliTest, InfoPrintsChoiceWithoutManifest) {
  auto r = run({"info", "--d", "100"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("x=67"), std::string::npos);
  EXPECT_NE(r.out.find("log10_vertices=46.64"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, evpq::cli::kValidation);
  EXPECT_EQ(run({"frobnicate"}).code, evpq::cli::kValidation);
  EXPECT_EQ(run({"--help"}).code, 0);
}
