#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "tsis/tsis.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr
};

Run tsis_cli(const std::string& args) {
  const std::string cmd = std::string(TSIS_CLI_PATH) + " --threads 2 " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const std::string kCatalog = std::string(TSIS_DATA_DIR) + "/catalog.json";
const std::string kFixtures = std::string(TSIS_DATA_DIR) + "/fixtures";

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir = fs::temp_directory_path() / "tsis_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    ASSERT_EQ(tsis_cli("gen-corpus --seed 3 --pus 6000 --catalog " + kCatalog + " --out " + p("corpus.jsonl")).code, 0);
    ASSERT_EQ(tsis_cli("build --corpus " + p("corpus.jsonl") + " --catalog " + kCatalog + " --out " + p("atlas.json"))
                  .code,
              0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir); }
  static std::string p(const std::string& name) { return (dir / name).string(); }
  static fs::path dir;
};
fs::path Cli::dir;

TEST_F(Cli, SignaturesListing) {
  const auto r = tsis_cli("signatures");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 225u);
  EXPECT_EQ(lines.front(), "a-a");
  EXPECT_EQ(lines.back(), "ahns-ahns");
}

TEST_F(Cli, GenCorpusDeterministic) {
  ASSERT_EQ(tsis_cli("gen-corpus --seed 3 --pus 6000 --catalog " + kCatalog + " --out " + p("again.jsonl")).code, 0);
  EXPECT_EQ(slurp(p("again.jsonl")), slurp(p("corpus.jsonl")));
}

TEST_F(Cli, GenCorpusUsageErrors) {
  EXPECT_EQ(tsis_cli("gen-corpus --seed 1 --pus 10 --out " + p("x.jsonl")).code, 2);
  EXPECT_EQ(tsis_cli("gen-corpus --pus 0 --catalog " + kCatalog + " --out " + p("x.jsonl")).code, 2);
  EXPECT_EQ(tsis_cli("").code, 2);
}

TEST_F(Cli, BuildDefaultsAndErrors) {
  const auto atlas = nlohmann::json::parse(slurp(p("atlas.json")));
  EXPECT_EQ(atlas["cap"], 10);
  EXPECT_EQ(atlas["provenance"]["amplify_factor"], 3.0);

  std::ofstream(p("bad.jsonl")) << "{\"pu_id\":\"1\",\"origin\":\"x\",\"instructions\":[\"add\"]}\n"
                                << "{\"pu_id\":\"2\",\"origin\":\"x\",\"instructions\":[\"warp\"]}\n";
  const auto r = tsis_cli("build --corpus " + p("bad.jsonl") + " --catalog " + kCatalog + " --out " + p("bad.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("warp"), std::string::npos);
  EXPECT_NE(r.out.find("line 2"), std::string::npos);
  EXPECT_EQ(tsis_cli("build --corpus " + p("corpus.jsonl") + " --catalog " + kCatalog + " --reorder nope --out " +
                     p("x.json"))
                .code,
            2);
}

TEST_F(Cli, EvalWritesReport) {
  const auto r = tsis_cli("eval --corpus " + p("corpus.jsonl") + " --catalog " + kCatalog + " --atlas " +
                          p("atlas.json") + " --out-dir " + p("report"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto atlas = tsis::load_atlas(p("atlas.json"));
  std::istringstream csv(slurp(p("report/report.csv")));
  std::size_t lines = 0;
  for (std::string l; std::getline(csv, l);) ++lines;
  EXPECT_EQ(lines, 1 + atlas.by_signature.size());
  const auto j = nlohmann::json::parse(slurp(p("report/report.json")));
  EXPECT_TRUE(j["aggregates"].contains("log10_T1_over_T2"));
  EXPECT_TRUE(j["aggregates"].contains("log10_T1_over_T3"));
  EXPECT_TRUE(fs::exists(p("report/fig2_families.svg")));
  EXPECT_TRUE(fs::exists(p("report/fig3_reduction.svg")));
}

TEST_F(Cli, EvalProvenanceMismatch) {
  ASSERT_EQ(tsis_cli("gen-corpus --seed 4 --pus 500 --catalog " + kCatalog + " --out " + p("other.jsonl")).code, 0);
  const auto r = tsis_cli("eval --corpus " + p("other.jsonl") + " --catalog " + kCatalog + " --atlas " +
                          p("atlas.json") + " --out-dir " + p("r2"));
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, EvalBadInputs) {
  EXPECT_EQ(tsis_cli("eval --corpus " + p("corpus.jsonl") + " --catalog " + kCatalog + " --atlas " +
                     p("atlas.json") + " --out-dir " + p("r3") + " --formats pdf")
                .code,
            2);
  std::ofstream(p("broken.json")) << "{\"cap\": ";
  EXPECT_EQ(tsis_cli("eval --corpus " + p("corpus.jsonl") + " --catalog " + kCatalog + " --atlas " +
                     p("broken.json") + " --out-dir " + p("r3"))
                .code,
            1);
}

TEST_F(Cli, SynthDoubling) {
  const auto r = tsis_cli("synth --cases " + kFixtures + "/double.json --atlas " + p("atlas.json") + " --catalog " +
                          kCatalog);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  const std::set<std::string> doublings = {"(add x0 x0)", "(mul x0 lit_2)", "(mul lit_2 x0)"};
  EXPECT_TRUE(doublings.count(j["program"].get<std::string>())) << j["program"];
  const auto atlas = tsis::load_atlas(p("atlas.json"));
  EXPECT_EQ(j["stats"]["family_key"], atlas.by_signature.count("n-n") ? "n-n" : "baseline");
}

TEST_F(Cli, SynthNotFound) {
  const auto r = tsis_cli("synth --budget 200 --cases " + kFixtures + "/unsolvable_hashmap.json --atlas " +
                          p("atlas.json") + " --catalog " + kCatalog + " --out " + p("nf.json"));
  ASSERT_EQ(r.code, 3) << r.out;
  const auto j = nlohmann::json::parse(slurp(p("nf.json")));
  EXPECT_EQ(j["status"], "not_found");
  EXPECT_TRUE(j["stats"].contains("subsets_skipped"));
  EXPECT_FALSE(j.contains("program"));
}

TEST_F(Cli, DefaultCatalogMatchesBundledFile) {
  const auto r = tsis_cli("default-catalog");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(kCatalog));
}

}  // namespace
