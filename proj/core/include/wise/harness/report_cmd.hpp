#pragma once

#include <string>
#include <vector>

#include "wise/aggregate/calibration.hpp"
#include "wise/harness/metrics.hpp"

namespace wise::harness {

// Report bundle rendered from one or more metrics reports: a plain-text
// summary (accuracy tables, per-round curves, termination histogram and any
// calibration tables) plus standalone vector graphics for the curves and
// the rounds histogram. Multiple runs overlay in one plot, labeled by their
// config fingerprint.
struct ReportBundle {
  std::string text;
  std::string accuracy_svg;
  std::string rounds_svg;
};

ReportBundle render_report(
    const std::vector<MetricsReport>& runs,
    const std::vector<aggregate::CalibrationReport>& calibrations = {});

// Three-column calibration table per agent (entropy, KL divergence from the
// identity, average correctness), as text.
std::string calibration_table(const aggregate::CalibrationReport& report);

// Writes report.txt, accuracy.svg and rounds.svg under out_dir.
void write_report(const std::string& out_dir, const ReportBundle& bundle);

}  // namespace wise::harness
