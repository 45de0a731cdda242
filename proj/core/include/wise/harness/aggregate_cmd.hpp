#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wise/aggregate/em.hpp"
#include "wise/backend/judge.hpp"
#include "wise/harness/config.hpp"
#include "wise/harness/metrics.hpp"
#include "wise/model/types.hpp"

namespace wise::harness {

struct AggregateOptions {
  AggregationFlags flags;
  aggregate::EmOptions em;
  backend::NormalizeOptions normalize;  // free-form equivalence
  std::string label;                    // carried into the metrics report
};

// Outcome for one problem. `selected` is empty when the aggregate abstained
// (all ballots abstained, or zero support everywhere); abstentions and
// unsupported picks score as incorrect.
struct ProblemVerdict {
  std::string problem_id;
  std::string selected;
  bool no_support = false;
  bool scored = false;  // ground truth was available
  bool correct = false;
  std::map<std::string, double> option_weight;  // final W-bar per option
};

struct AggregationResult {
  std::string aggregator;
  AggregationFlags flags;
  std::vector<ProblemVerdict> verdicts;
  // Fitted models for the DS aggregators: one per round, or a single pooled
  // fit. Empty for majority and weighted-majority.
  std::vector<aggregate::EmResult> round_fits;
  bool pooled = false;
  MetricsReport metrics;
};

// The whole ladder: per-round (or pooled) counts, model fit where the
// aggregator needs one, per-round decoding, Eq. 3/4 aggregation over each
// item's own rounds, scoring against ground truth. Free-form batches work
// with majority (final-round vote) and weighted-majority (answers clustered
// by judge_equivalent); the DS aggregators need option codes and raise
// ConfigError without them. Problems are matched to transcripts by id;
// a transcript without a problem record is a ConfigError.
AggregationResult aggregate_transcripts(
    const std::vector<model::DebateTranscript>& transcripts,
    const std::vector<model::Problem>& problems, const AggregateOptions& opts);

// Directory variant: reads every *.json transcript under `transcript_dir`
// (sorted by filename), EmptyInput when none are found.
AggregationResult aggregate_directory(const std::string& transcript_dir,
                                      const std::vector<model::Problem>& problems,
                                      const AggregateOptions& opts);

// JSON encoding of the result (verdicts plus fitted model parameters).
std::string serialize_aggregation(const AggregationResult& r);
void write_aggregation_file(const std::string& path, const AggregationResult& r);

// Reads the fitted models back out of a serialized aggregation result, e.g.
// to render calibration tables. Empty for majority-family results.
std::vector<aggregate::ConfusionModel> read_fitted_models(const std::string& path);

}  // namespace wise::harness
