#pragma once

#include <vector>

#include "wise/aggregate/em.hpp"
#include "wise/model/types.hpp"

namespace wise::aggregate {

// Per-round answers and weights in aggregation form: one answer per solver
// and an n x m weight grid.  Produced either raw from a DebateRound or by
// posterior_decode below.
struct RoundBallot {
  std::vector<model::AnswerOption> answers;
  std::vector<std::vector<int>> weights;

  int solver_count() const { return static_cast<int>(answers.size()); }
  int reflector_count() const {
    return weights.empty() ? 0 : static_cast<int>(weights.front().size());
  }
};

// Raw view of a round: parsed answers as emitted, weights as judged with
// failures mapped to 0.
RoundBallot raw_ballot(const model::DebateRound& round);

// MAP decode of a round through the fitted confusions.  Answers: r~_s =
// argmax_b zeta_b P_s[b, r_s], ties keep the emitted answer, abstentions
// stay.  Weights: w~_sj = argmax_a zeta_a P_c_j[a, w_sj], ties keep the raw
// weight, failures map to 0.  A model without reflector matrices (classic
// fit) passes weights through unchanged.
RoundBallot posterior_decode(const model::DebateRound& round,
                             const ConfusionModel& model);

}  // namespace wise::aggregate
