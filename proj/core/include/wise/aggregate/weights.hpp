#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wise/aggregate/decode.hpp"
#include "wise/aggregate/matrix.hpp"
#include "wise/model/types.hpp"

namespace wise::aggregate {

// Result of the round-discounted accumulation (Eqs. 3 and 4): per option the
// n x m tensor of discounted pair weights, the accumulated total, and the
// selected answer.
struct AggregatedWeights {
  std::vector<std::string> option_codes;
  std::vector<Matrix> pair_weight;     // per option, n x m, entries in [0, 1]
  std::vector<double> option_weight;   // w-bar per option
  int selected = -1;                   // index into option_codes
  bool no_support = false;             // every accumulated weight was zero

  const std::string& selected_code() const { return option_codes.at(selected); }
};

// Accumulates round ballots with the l / (k (k + 1)) discounting and selects
// the highest ranking answer; ties go to the lexicographically smallest
// option code, abstentions accumulate nothing and are never selected.  The
// arithmetic is exact: weights and round indices are integers, so every
// accumulated value is an integer over k (k + 1).
AggregatedWeights aggregate_rounds(const std::vector<RoundBallot>& rounds,
                                   const std::vector<std::string>& option_codes);

// Sum of the discount coefficients l / (k (k + 1)) for l = 1..k as an exact
// unreduced rational (numerator, denominator).
std::pair<long long, long long> coefficient_mass(int k);

// Most frequent non-abstaining answer; lexicographic tie-break.
model::AnswerOption majority_vote(const std::vector<model::AnswerOption>& answers);

}  // namespace wise::aggregate
