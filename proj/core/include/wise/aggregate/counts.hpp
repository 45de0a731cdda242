#pragma once

#include <string>
#include <vector>

#include "wise/model/types.hpp"

namespace wise::aggregate {

// Which round of each debate feeds the count tensors.  Items whose debate
// terminated before the requested round reuse their final round.
struct RoundSelector {
  enum class Mode { SingleRound, Pooled };

  Mode mode = Mode::SingleRound;
  int round = 1;

  static RoundSelector single(int round) {
    return RoundSelector{Mode::SingleRound, round};
  }
  static RoundSelector pooled() { return RoundSelector{Mode::Pooled, 0}; }
};

// Vote count tensors for one batch of debates over a shared option set.
//
// solver_counts[t][i][b] is the number of times solver t answered class b on
// item i (0 or 1 in single-round mode).  reflector_counts[c][i][w] is the
// number of weight-w judgments reflector c issued on item i; failed judgments
// (weight -1) are absent, so a row sums to at most solver_count per round.
struct VoteCounts {
  int item_count = 0;
  int class_count = 0;           // K
  int weight_class_count = 0;    // J, 3 whenever reflectors are present
  int solver_count = 0;
  int reflector_count = 0;

  std::vector<std::string> item_ids;
  std::vector<std::string> class_codes;

  std::vector<std::vector<std::vector<int>>> solver_counts;
  std::vector<std::vector<std::vector<int>>> reflector_counts;

  void validate() const;

  // Copy with the reflector tensors dropped (reflector_count = 0), used when
  // fitting the solver-only model.
  VoteCounts solvers_only() const;
};

VoteCounts build_counts(const std::vector<model::DebateTranscript>& transcripts,
                        const RoundSelector& selector);

}  // namespace wise::aggregate
