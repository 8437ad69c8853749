#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "fpaudit/fingerprint.hpp"

namespace fpaudit {

// Shortest-round-trip decimal rendering; the same double always renders to
// the same bytes, which is what the end-to-end determinism contract needs.
std::string format_double(double v);

// RFC-4180 quoting: fields containing comma, quote, or newline are quoted,
// embedded quotes doubled.
std::string csv_escape(const std::string& field);

using Cell = std::variant<std::string, double, long long>;

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<Cell>& cells);

 private:
  std::ostream& out_;
};

// Per-trial CSV with a header; every MC column carries its per-trial value
// (SEs live in the JSON summary, which aggregates).
void write_attack_csv(const AttackReport& report, std::ostream& out);

// JSON summary of an attack report (aggregates only, no per-trial rows).
std::string attack_report_json(const AttackReport& report);

// Run metadata (timestamp, label) kept out of the deterministic outputs.
void write_metadata(const std::string& dir, const std::string& label);

// Minimal self-contained SVG line plot; one polyline per series.
struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};
std::string svg_line_plot(const std::vector<SvgSeries>& series,
                          const std::string& x_label,
                          const std::string& y_label);

}  // namespace fpaudit
