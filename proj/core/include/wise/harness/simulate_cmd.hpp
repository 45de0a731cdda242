#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wise/harness/aggregate_cmd.hpp"
#include "wise/harness/metrics.hpp"
#include "wise/model/types.hpp"

namespace wise::harness {

// Synthetic debate generator: per item a uniform ground-truth option, per
// round each solver emits through its confusion row and each reflector
// judges each solver through the weight-class confusion. The latent weight
// of an item is tied to how often its solvers were right (mostly right -> 2,
// sometimes -> 1, never -> 0), so reflector judgments carry signal about
// answer quality the way Eq. 5 assumes.
// Latent weight source: tied to realized solver correctness (scores track
// answer quality, like reflector feedback does), or drawn from a fixed
// prior independently of the answers. The prior mode is the joint model's
// own sampling process and keeps every weight class populated, which makes
// the reflector confusions identifiable.
enum class WeightSource { Correctness, Prior };

struct SimulateSpec {
  int items = 200;
  int option_count = 5;  // K
  int solver_count = 3;
  int reflector_count = 2;
  int rounds = 1;
  // Diagonal mass per solver; off-diagonal mass spreads evenly. Size must
  // be 1 (shared) or solver_count.
  std::vector<double> solver_diagonals = {0.8};
  double reflector_diagonal = 0.8;
  WeightSource weight_source = WeightSource::Correctness;
  std::vector<double> weight_prior = {0.2, 0.3, 0.5};  // Prior mode only
  std::uint64_t seed = 0;

  void validate() const;  // positive sizes, diagonals in (0,1], prior sums 1
};

struct SyntheticBatch {
  std::vector<model::Problem> problems;          // ground truth filled in
  std::vector<model::DebateTranscript> transcripts;
  std::vector<aggregate::Matrix> solver_confusion;     // generators
  std::vector<aggregate::Matrix> reflector_confusion;  // J=3 generators
};

SyntheticBatch make_synthetic_batch(const SimulateSpec& spec);

struct SimulateOutcome {
  // Long aggregator name -> accuracy on the drawn batch.
  std::map<std::string, double> accuracy;
  // Recovery error: max row L1 distance between fitted and generating
  // confusions ("classic-ds solver", "wise-ds solver", "wise-ds reflector").
  std::map<std::string, double> recovery;
  MetricsReport metrics;      // wise-ds metrics with round curves
  std::string table;          // printable comparison table
};

// Runs all four aggregators over one synthetic draw. Identical spec (seed
// included) gives a byte-identical outcome.
SimulateOutcome simulate(const SimulateSpec& spec);

}  // namespace wise::harness
