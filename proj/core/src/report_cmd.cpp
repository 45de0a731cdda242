#include "wise/harness/report_cmd.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wise/errors.hpp"

namespace wise::harness {
namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMarginLeft = 56;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 24;
constexpr int kMarginBottom = 44;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

std::string fmt(double v, int decimals = 4) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

double x_pos(int round, int max_rounds) {
  const double span = kWidth - kMarginLeft - kMarginRight;
  if (max_rounds <= 1) return kMarginLeft + span / 2.0;
  return kMarginLeft + span * (round - 1) / (max_rounds - 1);
}

double y_pos(double accuracy) {
  const double span = kHeight - kMarginTop - kMarginBottom;
  return kMarginTop + span * (1.0 - accuracy);
}

std::string polyline(const std::vector<double>& values, int max_rounds,
                     const char* color, bool dashed) {
  std::ostringstream out;
  out << "  <polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\"";
  if (dashed) out << " stroke-dasharray=\"6 4\"";
  out << " points=\"";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out << " ";
    out << fmt(x_pos(static_cast<int>(k) + 1, max_rounds), 1) << ","
        << fmt(y_pos(values[k]), 1);
  }
  out << "\"/>\n";
  return out.str();
}

std::string svg_header(const std::string& title) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n"
      << "  <text x=\"" << kWidth / 2 << "\" y=\"16\" text-anchor=\"middle\">"
      << title << "</text>\n";
  return out.str();
}

// y_max 1.0 labels fractions; an integer y_max labels counts.
std::string axes(const std::string& x_label, double y_max) {
  std::ostringstream out;
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  out << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1
      << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n"
      << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0
      << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double frac = tick / 4.0;
    const double y = y_pos(frac);
    const std::string label =
        y_max == 1.0 ? fmt(frac, 2) : fmt(frac * y_max, 0);
    out << "  <text x=\"" << x0 - 8 << "\" y=\"" << fmt(y + 4, 1)
        << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  out << "  <text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  return out.str();
}

}  // namespace

std::string calibration_table(const aggregate::CalibrationReport& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "  %-14s %14s %12s %8s\n", "agent",
                "entropy (bits)", "KL (bits)", "avg");
  out << line;
  auto emit = [&](const aggregate::AgentCalibration& a) {
    std::snprintf(line, sizeof(line), "  %-14s %14s %12s %8s\n",
                  a.agent.c_str(), fmt(a.entropy_bits).c_str(),
                  fmt(a.kl_bits).c_str(), fmt(a.avg_correct, 2).c_str());
    out << line;
  };
  for (const auto& a : report.solvers) emit(a);
  for (const auto& a : report.reflectors) emit(a);
  return out.str();
}

ReportBundle render_report(
    const std::vector<MetricsReport>& runs,
    const std::vector<aggregate::CalibrationReport>& calibrations) {
  if (runs.empty()) throw EmptyInput("report needs at least one metrics file");
  for (const auto& m : runs) m.validate();

  int max_rounds = 1;
  for (const auto& m : runs) {
    max_rounds = std::max(max_rounds,
                          static_cast<int>(m.cumulative_accuracy.size()));
    for (const auto& [rounds, items] : m.rounds_histogram) {
      (void)items;
      max_rounds = std::max(max_rounds, rounds);
    }
  }

  ReportBundle bundle;

  std::ostringstream text;
  text << "== Aggregation runs ==\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& m = runs[i];
    text << "\nrun " << i + 1 << ": " << (m.label.empty() ? "(unlabeled)" : m.label)
         << "\n";
    text << "  aggregator     " << m.aggregator << "\n";
    text << "  problems       " << m.problem_count << " (scored "
         << m.scored_count << ")\n";
    text << "  accuracy       " << fmt(m.accuracy) << "\n";
    text << "  mean rounds    " << fmt(m.mean_rounds, 2) << "\n";
    text << "  backend calls  " << m.backend_calls << "\n";
    text << "  terminations  ";
    for (const auto& [kind, count] : m.termination_counts) {
      text << " " << kind << "=" << count;
    }
    text << "\n";
    if (!m.cumulative_accuracy.empty()) {
      text << "  round   cumulative   average\n";
      for (std::size_t k = 0; k < m.cumulative_accuracy.size(); ++k) {
        char line[64];
        std::snprintf(line, sizeof(line), "  %5zu   %10s   %7s\n", k + 1,
                      fmt(m.cumulative_accuracy[k]).c_str(),
                      fmt(m.average_accuracy[k]).c_str());
        text << line;
      }
    }
    if (!m.tag_accuracy.empty()) {
      text << "  per-tag accuracy:\n";
      for (const auto& [tag, acc] : m.tag_accuracy) {
        text << "    " << tag << "  " << fmt(acc) << "\n";
      }
    }
  }

  text << "\n== Rounds to termination ==\n";
  for (int r = 1; r <= max_rounds; ++r) {
    int total = 0;
    for (const auto& m : runs) {
      auto it = m.rounds_histogram.find(r);
      if (it != m.rounds_histogram.end()) total += it->second;
    }
    text << "  " << r << ": ";
    for (int b = 0; b < std::min(total, 60); ++b) text << '#';
    text << " " << total << "\n";
  }

  if (!calibrations.empty()) {
    text << "\n== Calibration ==\n";
    for (std::size_t i = 0; i < calibrations.size(); ++i) {
      if (calibrations.size() > 1) text << "model " << i + 1 << ":\n";
      text << calibration_table(calibrations[i]);
    }
  }
  bundle.text = text.str();

  // Accuracy curves: solid cumulative, dashed average, one color per run.
  std::ostringstream acc;
  acc << svg_header("Accuracy by round");
  acc << axes("round", 1.0);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& m = runs[i];
    if (m.cumulative_accuracy.empty()) continue;
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    acc << polyline(m.cumulative_accuracy, max_rounds, color, false);
    acc << polyline(m.average_accuracy, max_rounds, color, true);
    for (std::size_t k = 0; k < m.cumulative_accuracy.size(); ++k) {
      acc << "  <circle cx=\""
          << fmt(x_pos(static_cast<int>(k) + 1, max_rounds), 1) << "\" cy=\""
          << fmt(y_pos(m.cumulative_accuracy[k]), 1) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
    const double ly = kMarginTop + 16.0 * (i + 1);
    acc << "  <text x=\"" << kWidth - kMarginRight - 4 << "\" y=\"" << fmt(ly, 1)
        << "\" text-anchor=\"end\" fill=\"" << color << "\">"
        << (m.label.empty() ? m.aggregator : m.label) << "</text>\n";
  }
  for (int r = 1; r <= max_rounds; ++r) {
    acc << "  <text x=\"" << fmt(x_pos(r, max_rounds), 1) << "\" y=\""
        << kHeight - kMarginBottom + 16 << "\" text-anchor=\"middle\">" << r
        << "</text>\n";
  }
  acc << "</svg>\n";
  bundle.accuracy_svg = acc.str();

  // Rounds histogram: grouped bars, one per run and round.
  std::ostringstream hist;
  hist << svg_header("Rounds to termination");
  int peak = 1;
  for (const auto& m : runs) {
    for (const auto& [r, items] : m.rounds_histogram) {
      (void)r;
      peak = std::max(peak, items);
    }
  }
  hist << axes("rounds", peak);
  const double span = kWidth - kMarginLeft - kMarginRight;
  const double group = span / max_rounds;
  const double bar = group / (runs.size() + 1);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    for (const auto& [r, items] : runs[i].rounds_histogram) {
      const double frac = static_cast<double>(items) / peak;
      const double h = (kHeight - kMarginTop - kMarginBottom) * frac;
      const double x = kMarginLeft + group * (r - 1) + bar * (i + 0.5);
      hist << "  <rect x=\"" << fmt(x, 1) << "\" y=\""
           << fmt(kHeight - kMarginBottom - h, 1) << "\" width=\""
           << fmt(bar, 1) << "\" height=\"" << fmt(h, 1) << "\" fill=\""
           << color << "\"/>\n";
    }
  }
  for (int r = 1; r <= max_rounds; ++r) {
    hist << "  <text x=\"" << fmt(kMarginLeft + group * (r - 0.5), 1)
         << "\" y=\"" << kHeight - kMarginBottom + 16
         << "\" text-anchor=\"middle\">" << r << "</text>\n";
  }
  hist << "</svg>\n";
  bundle.rounds_svg = hist.str();

  return bundle;
}

void write_report(const std::string& out_dir, const ReportBundle& bundle) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write = [&](const char* name, const std::string& body) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write report file: " + path.string());
    out << body;
  };
  write("report.txt", bundle.text);
  write("accuracy.svg", bundle.accuracy_svg);
  write("rounds.svg", bundle.rounds_svg);
}

}  // namespace wise::harness
