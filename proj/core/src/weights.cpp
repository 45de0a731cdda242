#include "wise/aggregate/weights.hpp"

#include <algorithm>
#include <iterator>
#include <map>

#include "wise/errors.hpp"

namespace wise::aggregate {

std::pair<long long, long long> coefficient_mass(int k) {
  if (k < 1) throw EmptyInput("coefficient mass needs k >= 1");
  long long num = 0;
  for (long long l = 1; l <= k; ++l) num += l;
  return {num, static_cast<long long>(k) * (k + 1)};
}

AggregatedWeights aggregate_rounds(const std::vector<RoundBallot>& rounds,
                                   const std::vector<std::string>& option_codes) {
  const int k = static_cast<int>(rounds.size());
  if (k == 0) throw EmptyInput("no rounds to aggregate");
  if (option_codes.empty()) throw EmptyInput("no candidate options");
  const int n = rounds.front().solver_count();
  const int m = rounds.front().reflector_count();
  const int K = static_cast<int>(option_codes.size());

  auto option_index = [&](const std::string& code) {
    const auto it = std::find(option_codes.begin(), option_codes.end(), code);
    if (it == option_codes.end()) {
      throw DimensionMismatch("answer " + code + " is not a candidate option");
    }
    return static_cast<int>(it - option_codes.begin());
  };

  // numer[a] is the n x m tensor of integer numerators over k (k + 1).
  const long long den = static_cast<long long>(k) * (k + 1);
  std::vector<std::vector<std::vector<long long>>> numer(
      K, std::vector<std::vector<long long>>(n, std::vector<long long>(m, 0)));

  for (int l = 1; l <= k; ++l) {
    const RoundBallot& round = rounds[l - 1];
    if (round.solver_count() != n || round.reflector_count() != m) {
      throw DimensionMismatch("round ballots disagree on dimensions");
    }
    for (int i = 0; i < n; ++i) {
      const auto& ans = round.answers[i];
      if (ans.is_abstain()) continue;
      const int a = option_index(ans.code());
      for (int j = 0; j < m; ++j) {
        int w = round.weights[i][j];
        if (w == model::kReflectorFailure) w = 0;
        // Debate weights live in {0, 1, 2}; larger values are accepted so the
        // accumulation stays scale-invariant, negatives are malformed.
        if (w < 0) throw InvalidLabel("negative weight");
        numer[a][i][j] += static_cast<long long>(w) * l;
      }
    }
  }

  AggregatedWeights out;
  out.option_codes = option_codes;
  out.pair_weight.reserve(K);
  std::vector<long long> totals(K, 0);
  for (int a = 0; a < K; ++a) {
    Matrix t(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        totals[a] += numer[a][i][j];
        t.at(i, j) = static_cast<double>(numer[a][i][j]) / den;
      }
    }
    out.pair_weight.push_back(std::move(t));
  }
  out.option_weight.resize(K);
  for (int a = 0; a < K; ++a) {
    out.option_weight[a] = static_cast<double>(totals[a]) / den;
  }

  int best = 0;
  for (int a = 1; a < K; ++a) {
    if (totals[a] > totals[best] ||
        (totals[a] == totals[best] && option_codes[a] < option_codes[best])) {
      best = a;
    }
  }
  out.selected = best;
  out.no_support = totals[best] == 0;
  if (out.no_support) {
    // Degenerate all-zero case: report the lexicographically smallest option.
    int smallest = 0;
    for (int a = 1; a < K; ++a) {
      if (option_codes[a] < option_codes[smallest]) smallest = a;
    }
    out.selected = smallest;
  }
  return out;
}

model::AnswerOption majority_vote(const std::vector<model::AnswerOption>& answers) {
  std::map<std::string, int> tally;
  for (const auto& a : answers) {
    if (!a.is_abstain()) tally[a.code()] += 1;
  }
  if (tally.empty()) throw NoBallots("every answer abstained");
  // std::map iterates codes in lexicographic order, so the first strict
  // maximum is also the tie-break winner.
  auto best = tally.begin();
  for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return model::AnswerOption{best->first};
}

}  // namespace wise::aggregate
