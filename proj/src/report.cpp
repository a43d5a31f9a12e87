#include "sggmech/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sggmech/error.hpp"
#include "sggmech/json_io.hpp"

namespace sggmech {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "svg") return ReportFormat::Svg;
  throw Error(ErrorCode::UnsupportedFormat, "unsupported report format '" + std::string(s) + "'");
}

std::string render_csv(const Report& report) {
  std::string out = "condition,metric,value\n";
  for (const auto& row : report.rows) {
    out += fmt::format("{},{},{}\n", csv_field(row.condition), csv_field(row.metric), row.value);
  }
  return out;
}

std::string render_svg(const Report& report) {
  constexpr double width = 640.0, height = 480.0;
  constexpr double left = 60.0, right = 20.0, top = 50.0, bottom = 80.0;
  std::vector<const ReportRow*> bars;
  for (const auto& row : report.rows) {
    if (row.metric == report.chart_metric) bars.push_back(&row);
  }
  double peak = 0.0;
  for (const auto* b : bars) peak = std::max(peak, std::abs(b->value));
  if (!(peak > 0.0)) peak = 1.0;

  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double baseline = top + plot_h;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
  out += fmt::format("<text x=\"320\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
                     xml_escape(report.title));
  out += fmt::format("<text x=\"16\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" "
                     "transform=\"rotate(-90 16 {:.2f})\" text-anchor=\"middle\">{}</text>\n",
                     top + plot_h / 2.0, top + plot_h / 2.0, xml_escape(report.chart_metric));
  out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#333333\"/>\n", left,
                     baseline, left + plot_w, baseline);
  out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#333333\"/>\n", left, top,
                     left, baseline);
  if (!bars.empty()) {
    const double slot = plot_w / static_cast<double>(bars.size());
    const double bar_w = slot * 0.6;
    for (std::size_t i = 0; i < bars.size(); ++i) {
      const double v = std::max(bars[i]->value, 0.0);
      const double h = plot_h * v / peak;
      const double x = left + slot * static_cast<double>(i) + (slot - bar_w) / 2.0;
      const double cx = x + bar_w / 2.0;
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#4a7ab5\"/>\n", x,
                         baseline - h, bar_w, h);
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" "
                         "text-anchor=\"middle\">{:.4f}</text>\n",
                         cx, baseline - h - 6.0, bars[i]->value);
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" "
                         "text-anchor=\"middle\">{}</text>\n",
                         cx, baseline + 18.0, xml_escape(bars[i]->condition));
    }
  }
  out += "</svg>\n";
  return out;
}

void emit_report(const Report& report, ReportFormat format, const std::filesystem::path& path) {
  write_file(path, format == ReportFormat::Csv ? render_csv(report) : render_svg(report));
}

void emit_report(const Report& report, std::string_view format, const std::filesystem::path& path) {
  emit_report(report, report_format_from_string(format), path);
}

}  // namespace sggmech
