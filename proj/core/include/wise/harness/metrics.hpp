#pragma once

#include <map>
#include <string>
#include <vector>

namespace wise::harness {

// Accuracy and shape summary of one aggregation or simulation run.
//
// Round curves are indexed by round k (entry k-1 covers rounds <= k) over
// the answers the aggregator actually consumed (decoded or raw); items that
// terminated before round k contribute their final round. Cumulative
// accuracy counts an item once any of its solver answers up to round k is
// correct, average accuracy is the mean per-solver correctness at round k,
// so cumulative >= average holds at every k.
struct MetricsReport {
  std::string label;       // config fingerprint
  std::string aggregator;  // long aggregator name
  int problem_count = 0;
  int scored_count = 0;    // problems with ground truth
  double accuracy = 0.0;
  std::map<std::string, double> tag_accuracy;  // "modality=Image+Text" -> acc
  std::vector<double> cumulative_accuracy;
  std::vector<double> average_accuracy;
  double mean_rounds = 0.0;
  std::map<int, int> rounds_histogram;  // rounds to termination -> items
  std::map<std::string, int> termination_counts;
  // Backend calls reconstructed from transcripts: responses, judgments and
  // non-empty orchestrator summaries.
  long long backend_calls = 0;

  // Curve lengths match, values in [0,1], cumulative non-decreasing and
  // >= average at every k.
  void validate() const;
};

// Deterministic JSON round-trip (sorted keys, locale-independent floats).
std::string serialize_metrics(const MetricsReport& m);
MetricsReport deserialize_metrics(const std::string& json_text);

void write_metrics_file(const std::string& path, const MetricsReport& m);
MetricsReport read_metrics_file(const std::string& path);

}  // namespace wise::harness
