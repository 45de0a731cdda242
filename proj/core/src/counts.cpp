#include "wise/aggregate/counts.hpp"

#include <algorithm>

#include "wise/errors.hpp"

namespace wise::aggregate {

namespace {

void check_tensor(const std::vector<std::vector<std::vector<int>>>& tensor,
                  int agents, int items, int classes, int max_row_sum,
                  const char* what) {
  if (static_cast<int>(tensor.size()) != agents) {
    throw DimensionMismatch(std::string(what) + " tensor agent count mismatch");
  }
  for (const auto& per_agent : tensor) {
    if (static_cast<int>(per_agent.size()) != items) {
      throw DimensionMismatch(std::string(what) + " tensor item count mismatch");
    }
    for (const auto& row : per_agent) {
      if (static_cast<int>(row.size()) != classes) {
        throw DimensionMismatch(std::string(what) + " tensor class count mismatch");
      }
      int sum = 0;
      for (int v : row) {
        if (v < 0) throw InvalidLabel(std::string(what) + " count is negative");
        sum += v;
      }
      if (max_row_sum > 0 && sum > max_row_sum) {
        throw InvalidLabel(std::string(what) + " row exceeds vote budget");
      }
    }
  }
}

}  // namespace

void VoteCounts::validate() const {
  if (item_count < 0) throw DimensionMismatch("negative item count");
  if (static_cast<int>(item_ids.size()) != item_count) {
    throw DimensionMismatch("item id list does not match item count");
  }
  if (static_cast<int>(class_codes.size()) != class_count) {
    throw DimensionMismatch("class code list does not match class count");
  }
  check_tensor(solver_counts, solver_count, item_count, class_count,
               /*max_row_sum=*/0, "solver");
  check_tensor(reflector_counts, reflector_count, item_count,
               weight_class_count, /*max_row_sum=*/0, "reflector");
}

VoteCounts VoteCounts::solvers_only() const {
  VoteCounts out = *this;
  out.reflector_count = 0;
  out.reflector_counts.clear();
  return out;
}

VoteCounts build_counts(const std::vector<model::DebateTranscript>& transcripts,
                        const RoundSelector& selector) {
  if (transcripts.empty()) throw EmptyInput("no transcripts to count");
  if (selector.mode == RoundSelector::Mode::SingleRound && selector.round < 1) {
    throw ConfigError("round selector must be >= 1");
  }

  const auto& first = transcripts.front();
  if (first.option_codes.empty()) {
    throw ConfigError("vote counts need a fixed option set; free-form "
                      "transcripts have none");
  }
  if (first.rounds.empty()) throw EmptyInput("transcript has no rounds");
  const int n = first.rounds.front().solver_count();
  const int m = first.rounds.front().reflector_count();
  const int K = static_cast<int>(first.option_codes.size());

  VoteCounts out;
  out.item_count = static_cast<int>(transcripts.size());
  out.class_count = K;
  out.weight_class_count = model::kWeightClasses;
  out.solver_count = n;
  out.reflector_count = m;
  out.class_codes = first.option_codes;
  out.solver_counts.assign(
      n, std::vector<std::vector<int>>(out.item_count, std::vector<int>(K, 0)));
  out.reflector_counts.assign(
      m, std::vector<std::vector<int>>(
             out.item_count, std::vector<int>(model::kWeightClasses, 0)));

  for (int i = 0; i < out.item_count; ++i) {
    const auto& t = transcripts[i];
    t.validate();
    if (t.option_codes != first.option_codes) {
      throw DimensionMismatch("transcript " + t.problem_id +
                              " uses a different option set");
    }
    if (t.roster_fingerprint != first.roster_fingerprint) {
      throw ConfigError("transcript " + t.problem_id +
                        " was produced by a different roster");
    }
    out.item_ids.push_back(t.problem_id);

    const int total = static_cast<int>(t.rounds.size());
    int lo = 0;
    int hi = total - 1;
    if (selector.mode == RoundSelector::Mode::SingleRound) {
      lo = hi = std::min(selector.round, total) - 1;
    }
    for (int r = lo; r <= hi; ++r) {
      const auto& round = t.rounds[r];
      for (int s = 0; s < n; ++s) {
        const auto& ans = round.responses[s].parsed_answer;
        if (ans.is_abstain()) continue;
        const auto it = std::find(first.option_codes.begin(),
                                  first.option_codes.end(), ans.code());
        if (it == first.option_codes.end()) {
          throw DimensionMismatch("answer " + ans.code() +
                                  " is outside the shared option set");
        }
        const int b = static_cast<int>(it - first.option_codes.begin());
        out.solver_counts[s][i][b] += 1;
      }
      for (int s = 0; s < n; ++s) {
        for (int c = 0; c < m; ++c) {
          const int w = round.judgments[s][c].weight;
          if (w == model::kReflectorFailure) continue;
          out.reflector_counts[c][i][w] += 1;
        }
      }
    }
  }

  out.validate();
  return out;
}

}  // namespace wise::aggregate
