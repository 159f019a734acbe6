#pragma once

// Report files for an evaluation run: CSV rows, full JSON report, and two SVG
// charts (family sizes with cumulative program units, and per-signature mean
// work on a log axis). All output is byte-stable for identical inputs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsis/error.hpp"
#include "tsis/evalharness.hpp"
#include "tsis/families.hpp"

namespace tsis {

struct ReportFormats {
  bool csv = true;
  bool json = true;
  bool svg = true;
};

// Comma-separated subset of {csv, json, svg}.
inline ReportFormats parse_formats(const std::string& text) {
  ReportFormats f{false, false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "csv") f.csv = true;
    else if (item == "json") f.json = true;
    else if (item == "svg") f.svg = true;
    else if (!item.empty()) throw InvalidParameter("unknown report format '" + item + "'");
  }
  if (!f.csv && !f.json && !f.svg) throw InvalidParameter("no report format selected");
  return f;
}

inline constexpr const char* kCsvHeader = "signature,n_pus,T1,T2,T3,M1,M2,M3";
inline constexpr const char* kCsvFile = "report.csv";
inline constexpr const char* kJsonFile = "report.json";
inline constexpr const char* kFamiliesSvgFile = "fig2_families.svg";
inline constexpr const char* kReductionSvgFile = "fig3_reduction.svg";

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string reduction_text(const std::optional<double>& r) {
  if (!r) return "n/a";
  if (std::isinf(*r)) return "inf";
  return fixed6(*r);
}

inline std::string report_csv(const EvaluationReport& report) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : report.rows) {
    out += r.signature + ',' + std::to_string(r.n_pus) + ',' + std::to_string(r.T1) + ',' +
           std::to_string(r.T2) + ',' + std::to_string(r.T3) + ',' + fixed6(r.M1()) + ',' + fixed6(r.M2()) +
           ',' + fixed6(r.M3()) + '\n';
  }
  return out;
}

inline nlohmann::json report_json(const EvaluationReport& report, const std::vector<FamilyStatsRow>& stats) {
  // Means are carried as fixed-decimal text so the file does not depend on
  // shortest-round-trip float printing.
  auto rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"signature", r.signature},
                    {"n_pus", r.n_pus},
                    {"T1", r.T1},
                    {"T2", r.T2},
                    {"T3", r.T3},
                    {"M1", fixed6(r.M1())},
                    {"M2", fixed6(r.M2())},
                    {"M3", fixed6(r.M3())}});
  auto fams = nlohmann::json::array();
  for (const auto& s : stats)
    fams.push_back({{"family", s.key}, {"subsets", s.subset_count}, {"population", s.population}});
  const auto& a = report.aggregates;
  return {{"rows", std::move(rows)},
          {"aggregates",
           {{"total_pus", a.total_pus},
            {"sum_T1", a.sum_T1},
            {"sum_T2", a.sum_T2},
            {"sum_T3", a.sum_T3},
            {"log10_T1_over_T2", reduction_text(a.reduction_T1_T2)},
            {"log10_T1_over_T3", reduction_text(a.reduction_T1_T3)}}},
          {"families", std::move(fams)},
          {"provenance", provenance_to_json(report.provenance)}};
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Smallest "nice" axis maximum (1, 2 or 5 times a power of ten) >= v.
inline double nice_ceiling(double v) {
  if (v <= 0) return 1;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * p >= v) return m * p;
  return 10 * p;
}

struct Plot {
  double width, height;
  double left = 70, right = 70, top = 40, bottom = 90;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

inline std::string svg_open(const Plot& p, const std::string& attrs) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(p.width) + "\" height=\"" + num(p.height) +
         "\" viewBox=\"0 0 " + num(p.width) + " " + num(p.height) + "\" " + attrs + ">\n" +
         "<rect x=\"0\" y=\"0\" width=\"" + num(p.width) + "\" height=\"" + num(p.height) +
         "\" fill=\"white\"/>\n";
}

inline std::string x_label(const Plot& p, double cx, const std::string& text) {
  const double y = p.top + p.plot_h() + 8;
  return "<text class=\"xlabel\" x=\"" + num(cx) + "\" y=\"" + num(y) + "\" font-size=\"9\" font-family=\"monospace\" "
         "text-anchor=\"end\" transform=\"rotate(-60 " + num(cx) + " " + num(y) + ")\">" + xml_escape(text) +
         "</text>\n";
}

}  // namespace detail

// Bars: subsets per signature family (left axis). Line: cumulative program
// units over the same signature order (right axis).
inline std::string families_svg(const std::vector<FamilyStatsRow>& stats) {
  std::vector<FamilyStatsRow> rows;
  for (const auto& s : stats)
    if (s.key != kBaselineKey) rows.push_back(s);

  detail::Plot p{std::max(480.0, 140.0 + 14.0 * static_cast<double>(rows.size())), 420};
  std::size_t max_subsets = 0;
  std::uint64_t total = 0;
  for (const auto& r : rows) {
    max_subsets = std::max(max_subsets, r.subset_count);
    total += r.population;
  }
  const double y1_max = detail::nice_ceiling(static_cast<double>(max_subsets));
  const double y2_max = detail::nice_ceiling(static_cast<double>(total));
  const double slot = rows.empty() ? p.plot_w() : p.plot_w() / static_cast<double>(rows.size());
  auto y1 = [&](double v) { return p.top + p.plot_h() * (1.0 - v / y1_max); };
  auto y2 = [&](double v) { return p.top + p.plot_h() * (1.0 - v / y2_max); };

  std::string out = detail::svg_open(
      p, "data-figure=\"family-sizes\" data-bars=\"" + std::to_string(rows.size()) +
             "\" data-y1=\"subsets\" data-y2=\"cumulative-pus\" data-y-scale=\"linear\"");
  out += "<text x=\"" + detail::num(p.width / 2) +
         "\" y=\"20\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">"
         "Instruction subsets and cumulative program units per type signature</text>\n";
  out += "<g class=\"axes\" stroke=\"black\">\n";
  out += "<line x1=\"" + detail::num(p.left) + "\" y1=\"" + detail::num(p.top) + "\" x2=\"" + detail::num(p.left) +
         "\" y2=\"" + detail::num(p.top + p.plot_h()) + "\"/>\n";
  out += "<line x1=\"" + detail::num(p.left + p.plot_w()) + "\" y1=\"" + detail::num(p.top) + "\" x2=\"" +
         detail::num(p.left + p.plot_w()) + "\" y2=\"" + detail::num(p.top + p.plot_h()) + "\"/>\n";
  out += "<line x1=\"" + detail::num(p.left) + "\" y1=\"" + detail::num(p.top + p.plot_h()) + "\" x2=\"" +
         detail::num(p.left + p.plot_w()) + "\" y2=\"" + detail::num(p.top + p.plot_h()) + "\"/>\n";
  out += "</g>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v1 = y1_max * t / 4.0, v2 = y2_max * t / 4.0;
    out += "<text class=\"y1tick\" x=\"" + detail::num(p.left - 6) + "\" y=\"" + detail::num(y1(v1) + 3) +
           "\" font-size=\"9\" font-family=\"sans-serif\" text-anchor=\"end\" fill=\"#c0392b\">" +
           detail::num(v1) + "</text>\n";
    out += "<text class=\"y2tick\" x=\"" + detail::num(p.left + p.plot_w() + 6) + "\" y=\"" +
           detail::num(y2(v2) + 3) + "\" font-size=\"9\" font-family=\"sans-serif\" fill=\"#27ae60\">" +
           detail::num(v2) + "</text>\n";
  }

  std::string points;
  std::string markers;
  std::uint64_t cumulative = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double x = p.left + slot * static_cast<double>(i);
    const double top = y1(static_cast<double>(r.subset_count));
    out += "<rect class=\"bar subsets\" data-signature=\"" + detail::xml_escape(r.key) + "\" data-value=\"" +
           std::to_string(r.subset_count) + "\" x=\"" + detail::num(x + slot * 0.15) + "\" y=\"" +
           detail::num(top) + "\" width=\"" + detail::num(slot * 0.7) + "\" height=\"" +
           detail::num(p.top + p.plot_h() - top) + "\" fill=\"#c0392b\"/>\n";
    out += detail::x_label(p, x + slot / 2, r.key);
    cumulative += r.population;
    const double cx = x + slot / 2, cy = y2(static_cast<double>(cumulative));
    points += (i ? " " : "") + detail::num(cx) + "," + detail::num(cy);
    markers += "<circle class=\"cumulative-point\" data-signature=\"" + detail::xml_escape(r.key) +
               "\" data-value=\"" + std::to_string(cumulative) + "\" cx=\"" + detail::num(cx) + "\" cy=\"" +
               detail::num(cy) + "\" r=\"2\" fill=\"#27ae60\"/>\n";
  }
  out += "<polyline class=\"cumulative\" fill=\"none\" stroke=\"#27ae60\" stroke-width=\"1.5\" points=\"" + points +
         "\"/>\n";
  out += markers;
  out += "</svg>\n";
  return out;
}

// Grouped bars of M1 (baseline), M2 (signature family) and M3 (signature
// family, reordered) per signature in report order, on a log10 Y axis.
// Zero means are drawn at the axis floor.
inline std::string reduction_svg(const EvaluationReport& report) {
  const auto& rows = report.rows;
  detail::Plot p{std::max(480.0, 140.0 + 24.0 * static_cast<double>(rows.size())), 440};

  double max_v = 0, min_pos = 0;
  for (const auto& r : rows)
    for (double v : {r.M1(), r.M2(), r.M3()}) {
      max_v = std::max(max_v, v);
      if (v > 0 && (min_pos == 0 || v < min_pos)) min_pos = v;
    }
  const int lo_exp = min_pos > 0 ? static_cast<int>(std::floor(std::log10(min_pos))) : -2;
  const int hi_exp = std::max(lo_exp + 1, max_v > 0 ? static_cast<int>(std::ceil(std::log10(max_v))) : 0);
  const double span = hi_exp - lo_exp;
  auto y = [&](double v) {
    const double e = v > 0 ? std::clamp(std::log10(v), double(lo_exp), double(hi_exp)) : lo_exp;
    return p.top + p.plot_h() * (1.0 - (e - lo_exp) / span);
  };
  const double slot = rows.empty() ? p.plot_w() : p.plot_w() / static_cast<double>(rows.size());

  std::string out = detail::svg_open(
      p, "data-figure=\"reduction\" data-bars=\"" + std::to_string(rows.size()) +
             "\" data-y-scale=\"log10\" data-y-min=\"1e" + std::to_string(lo_exp) + "\" data-y-max=\"1e" +
             std::to_string(hi_exp) + "\" data-order=\"descending-M1\"");
  out += "<text x=\"" + detail::num(p.width / 2) +
         "\" y=\"20\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">"
         "Mean leading subsets per program unit (log scale)</text>\n";
  for (int e = lo_exp; e <= hi_exp; ++e) {
    const double yy = y(std::pow(10.0, e));
    out += "<line class=\"gridline\" x1=\"" + detail::num(p.left) + "\" y1=\"" + detail::num(yy) + "\" x2=\"" +
           detail::num(p.left + p.plot_w()) + "\" y2=\"" + detail::num(yy) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text class=\"ytick\" x=\"" + detail::num(p.left - 6) + "\" y=\"" + detail::num(yy + 3) +
           "\" font-size=\"9\" font-family=\"sans-serif\" text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n";
  }
  out += "<line x1=\"" + detail::num(p.left) + "\" y1=\"" + detail::num(p.top) + "\" x2=\"" + detail::num(p.left) +
         "\" y2=\"" + detail::num(p.top + p.plot_h()) + "\" stroke=\"black\"/>\n";

  const char* names[] = {"m1", "m2", "m3"};
  const char* colors[] = {"#c0392b", "#27ae60", "#2c6fbb"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double x = p.left + slot * static_cast<double>(i);
    const double values[] = {r.M1(), r.M2(), r.M3()};
    const double bar_w = slot * 0.8 / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double top = y(values[k]);
      out += "<rect class=\"bar " + std::string(names[k]) + "\" data-signature=\"" + detail::xml_escape(r.signature) +
             "\" data-value=\"" + fixed6(values[k]) + "\" x=\"" + detail::num(x + slot * 0.1 + bar_w * k) +
             "\" y=\"" + detail::num(top) + "\" width=\"" + detail::num(bar_w) + "\" height=\"" +
             detail::num(p.top + p.plot_h() - top) + "\" fill=\"" + colors[k] + "\"/>\n";
    }
    out += detail::x_label(p, x + slot / 2, r.signature);
  }
  const double lx = p.left + 10;
  for (int k = 0; k < 3; ++k) {
    const char* label[] = {"baseline (M1)", "type signature (M2)", "type signature + reordering (M3)"};
    out += "<rect class=\"legend\" x=\"" + detail::num(lx + 190.0 * k) + "\" y=\"" + detail::num(p.top - 12) +
           "\" width=\"8\" height=\"8\" fill=\"" + colors[k] + "\"/>\n";
    out += "<text x=\"" + detail::num(lx + 190.0 * k + 12) + "\" y=\"" + detail::num(p.top - 4) +
           "\" font-size=\"9\" font-family=\"sans-serif\">" + label[k] + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace detail

// Returns the written paths in a fixed order.
inline std::vector<std::filesystem::path> emit_report(const EvaluationReport& report,
                                                      const std::vector<FamilyStatsRow>& stats,
                                                      const std::filesystem::path& out_dir,
                                                      const ReportFormats& formats = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  auto put = [&](const char* name, const std::string& content) {
    detail::write_file(out_dir / name, content);
    written.push_back(out_dir / name);
  };
  if (formats.csv) put(kCsvFile, report_csv(report));
  if (formats.json) put(kJsonFile, report_json(report, stats).dump(2) + "\n");
  if (formats.svg) {
    put(kFamiliesSvgFile, families_svg(stats));
    put(kReductionSvgFile, reduction_svg(report));
  }
  return written;
}

}  // namespace tsis
