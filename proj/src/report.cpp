#include "fpaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fpaudit {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  bool first = true;
  for (const auto& cell : cells) {
    if (!first) out_ << ',';
    first = false;
    if (const auto* s = std::get_if<std::string>(&cell)) {
      out_ << csv_escape(*s);
    } else if (const auto* d = std::get_if<double>(&cell)) {
      out_ << format_double(*d);
    } else {
      out_ << std::get<long long>(cell);
    }
  }
  out_ << "\r\n";
}

void write_attack_csv(const AttackReport& report, std::ostream& out) {
  CsvWriter w(out);
  w.row({std::string("mechanism"), std::string("d"), std::string("n"),
         std::string("seed"), std::string("z_bar"), std::string("z_prime_mean"),
         std::string("err_frob"), std::string("err_emp"),
         std::string("sq_err_floor"), std::string("mse_oracle"),
         std::string("posterior_gap"), std::string("residual")});
  for (const auto& r : report.rows) {
    w.row({report.mechanism_id, static_cast<long long>(report.d),
           static_cast<long long>(report.n),
           static_cast<long long>(static_cast<long long>(r.seed)), r.z_bar,
           r.z_prime_mean, r.err_frob, r.err_emp, r.sq_err_floor, r.mse_oracle,
           r.posterior_gap, r.residual});
  }
}

std::string attack_report_json(const AttackReport& report) {
  nlohmann::json j;
  j["mechanism"] = report.mechanism_id;
  j["d"] = report.d;
  j["n"] = report.n;
  j["trials"] = report.trials;
  j["z_bar_mean"] = report.z_bar.mean;
  j["z_bar_se"] = report.z_bar.se;
  j["z_prime_mean"] = report.z_prime.mean;
  j["z_prime_se"] = report.z_prime.se;
  j["floor_mean"] = report.floor.mean;
  j["floor_se"] = report.floor.se;
  j["mse_oracle_mean"] = report.mse_oracle.mean;
  j["mse_oracle_se"] = report.mse_oracle.se;
  j["gamma_median"] = report.gamma_median;
  j["gamma_q23"] = report.gamma_q23;
  j["max_residual"] = report.max_residual;
  j["dp_ceiling"] = report.dp_ceiling;
  j["tension"] = report.tension;
  return j.dump(2);
}

void write_metadata(const std::string& dir, const std::string& label) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["timestamp"] = buf;
  j["label"] = label;
  std::ofstream out(dir + "/metadata.json");
  out << j.dump(2) << "\n";
}

std::string svg_line_plot(const std::vector<SvgSeries>& series,
                          const std::string& x_label,
                          const std::string& y_label) {
  const double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!any) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        any = true;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto py = [&](double y) {
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
    << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
    << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
    << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
    << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
  o << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
    << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
    << (mt + h - mb) / 2 << ")\">" << y_label << "</text>\n";
  // Axis extremes, rendered with the deterministic formatter.
  o << "<text x=\"" << ml << "\" y=\"" << h - mb + 18
    << "\" font-size=\"12\">" << format_double(xmin) << "</text>\n";
  o << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 18
    << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(xmax)
    << "</text>\n";
  o << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb
    << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(ymin)
    << "</text>\n";
  o << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 6
    << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(ymax)
    << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    o << "<polyline fill=\"none\" stroke=\"" << colors[si % 6]
      << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << format_double(px(s.x[i])) << "," << format_double(py(s.y[i])) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << w - mr - 4 << "\" y=\"" << mt + 16 + 16 * si
      << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[si % 6]
      << "\">" << s.name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace fpaudit
