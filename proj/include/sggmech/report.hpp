#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sggmech {

struct ReportRow {
  std::string condition;
  std::string metric;
  double value = 0.0;
};

struct Report {
  std::string title;
  // Rows with this metric become bars in the SVG chart.
  std::string chart_metric;
  std::vector<ReportRow> rows;
};

enum class ReportFormat { Csv, Svg };

// "csv" or "svg"; anything else is UnsupportedFormat.
ReportFormat report_format_from_string(std::string_view s);

// condition,metric,value
std::string render_csv(const Report& report);
// Bar chart of `chart_metric` per condition on a 640x480 viewBox.
std::string render_svg(const Report& report);

void emit_report(const Report& report, ReportFormat format, const std::filesystem::path& path);
void emit_report(const Report& report, std::string_view format, const std::filesystem::path& path);

}  // namespace sggmech
