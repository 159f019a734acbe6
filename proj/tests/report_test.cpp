#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>

#include "support.hpp"

namespace tsis {
namespace {

namespace fs = std::filesystem;

EvaluationReport two_row_report() {
  EvaluationReport r;
  r.rows = {{"n-n", 4, 10, 4, 2}, {"s-s", 3, 3, 3, 0}};
  r.aggregates = {7, 13, 7, 2, log10_ratio(13, 7), log10_ratio(13, 2)};
  r.provenance.puis_hash = "abc";
  return r;
}

std::vector<FamilyStatsRow> two_row_stats() { return {{"baseline", 6, 7}, {"n-n", 3, 4}, {"s-s", 2, 3}}; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(ReportCsv, HeaderAndRows) {
  EXPECT_EQ(report_csv(two_row_report()),
            "signature,n_pus,T1,T2,T3,M1,M2,M3\n"
            "n-n,4,10,4,2,2.500000,1.000000,0.500000\n"
            "s-s,3,3,3,0,1.000000,1.000000,0.000000\n");
}

TEST(ReportJson, AggregatesCarryReductions) {
  const auto j = report_json(two_row_report(), two_row_stats());
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["M1"], "2.500000");
  EXPECT_EQ(j["aggregates"]["sum_T1"], 13);
  EXPECT_EQ(j["aggregates"]["log10_T1_over_T3"], fixed6(std::log10(6.5)));
  EXPECT_EQ(j["families"].size(), 3u);
  EXPECT_EQ(j["provenance"]["puis_hash"], "abc");
}

TEST(ReductionText, Cases) {
  EXPECT_EQ(reduction_text(std::nullopt), "n/a");
  EXPECT_EQ(reduction_text(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(reduction_text(0.5), "0.500000");
}

TEST(ParseFormats, Lists) {
  const auto f = parse_formats("csv,svg");
  EXPECT_TRUE(f.csv);
  EXPECT_FALSE(f.json);
  EXPECT_TRUE(f.svg);
  EXPECT_THROW(parse_formats("csv,pdf"), InvalidParameter);
  EXPECT_THROW(parse_formats(""), InvalidParameter);
}

TEST(FamiliesSvg, BarsPerSignatureAndCumulativeCurve) {
  const auto svg = families_svg(two_row_stats());
  EXPECT_EQ(count(svg, "<rect class=\"bar subsets\""), 2u);
  EXPECT_EQ(svg.find("data-signature=\"baseline\""), std::string::npos);
  EXPECT_NE(svg.find("data-value=\"4\" cx"), std::string::npos);
  EXPECT_NE(svg.find("data-value=\"7\" cx"), std::string::npos);
  EXPECT_NE(svg.find("<polyline class=\"cumulative\""), std::string::npos);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(ReductionSvg, LogScaleAndOrder) {
  const auto svg = reduction_svg(two_row_report());
  EXPECT_NE(svg.find("data-y-scale=\"log10\""), std::string::npos);
  EXPECT_NE(svg.find("data-order=\"descending-M1\""), std::string::npos);
  EXPECT_EQ(count(svg, "<rect class=\"bar m1\""), 2u);
  EXPECT_EQ(count(svg, "<rect class=\"bar m3\""), 2u);
  EXPECT_LT(svg.find("data-signature=\"n-n\""), svg.find("data-signature=\"s-s\""));
  // Self-contained: no external references.
  EXPECT_EQ(svg.find("href"), std::string::npos);
}

TEST(ReductionSvg, EmptyReportStillValid) {
  const auto svg = reduction_svg(EvaluationReport{});
  EXPECT_NE(svg.find("data-bars=\"0\""), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(EmitReport, WritesSelectedFilesByteStably) {
  const auto dir = fs::temp_directory_path() / "tsis_report_test";
  fs::remove_all(dir);
  const auto files = emit_report(two_row_report(), two_row_stats(), dir);
  ASSERT_EQ(files.size(), 4u);
  std::vector<std::string> first;
  for (const auto& f : files) first.push_back(slurp(f));
  emit_report(two_row_report(), two_row_stats(), dir);
  for (std::size_t i = 0; i < files.size(); ++i) EXPECT_EQ(slurp(files[i]), first[i]);

  const auto csv_only = emit_report(two_row_report(), two_row_stats(), dir / "csv", parse_formats("csv"));
  ASSERT_EQ(csv_only.size(), 1u);
  EXPECT_EQ(csv_only[0].filename(), kCsvFile);
  fs::remove_all(dir);
}

TEST(EmitReport, UnwritableDirectory) {
  const auto file = fs::temp_directory_path() / "tsis_report_blocker";
  std::ofstream(file) << "x";
  EXPECT_THROW(emit_report(two_row_report(), two_row_stats(), file / "sub"), IoError);
  fs::remove(file);
}

}  // namespace
}  // namespace tsis
