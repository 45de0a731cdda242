#pragma once

// Shared builders for transcript fixtures used across test binaries. The
// four-round 3x3 table mirrors the weight matrices of a SMART-840 debate and
// the two-agent table mirrors the EvoChart debate.

#include <string>
#include <vector>

#include "wise/model/types.hpp"

namespace wise::test {

inline model::SolverResponse make_response(int round, int solver,
                                           const std::string& answer) {
  model::SolverResponse r;
  r.round = round;
  r.solver_index = solver;
  r.raw_text = "FINAL_ANSWER: " + (answer.empty() ? "???" : answer);
  r.parsed_answer = answer.empty() ? model::AnswerOption::abstain()
                                   : model::AnswerOption(answer);
  r.parse_ok = !answer.empty();
  return r;
}

inline model::ReflectorJudgment make_judgment(int round, int solver,
                                              int reflector, int weight) {
  model::ReflectorJudgment g;
  g.round = round;
  g.solver_index = solver;
  g.reflector_index = reflector;
  g.weight = weight;
  g.feedback_text = "feedback r" + std::to_string(round) + " s" +
                    std::to_string(solver) + " j" + std::to_string(reflector);
  return g;
}

// One round from per-solver answers and an n x m weight grid. Non-terminal
// rounds carry one orchestrator summary per solver.
inline model::DebateRound make_round(int round_index,
                                     const std::vector<std::string>& answers,
                                     const std::vector<std::vector<int>>& weights,
                                     bool terminal) {
  model::DebateRound r;
  r.round_index = round_index;
  const int n = static_cast<int>(answers.size());
  for (int i = 0; i < n; ++i) {
    r.responses.push_back(make_response(round_index, i, answers[i]));
    std::vector<model::ReflectorJudgment> row;
    for (int j = 0; j < static_cast<int>(weights[i].size()); ++j) {
      row.push_back(make_judgment(round_index, i, j, weights[i][j]));
    }
    r.judgments.push_back(std::move(row));
  }
  if (!terminal) {
    for (int i = 0; i < n; ++i) {
      r.orchestrator_summaries.push_back("summary for solver " +
                                         std::to_string(i));
    }
  }
  return r;
}

// Four-round, 3-solver x 3-reflector transcript with the SMART-840 weight
// matrices; ends at the round cap without consensus.
inline model::DebateTranscript smart840_transcript() {
  model::DebateTranscript t;
  t.problem_id = "smart840-example";
  t.roster_fingerprint = "S:claude-s,gemma3,gpt-4.1|R:claude-s,gemma3,gpt-4.1|O:gpt-4o";
  t.option_codes = {"A", "B", "C", "D", "E"};
  t.rounds.push_back(make_round(
      1, {"B", "B", "B"}, {{2, 1, 2}, {0, 0, 2}, {0, 2, 2}}, false));
  t.rounds.push_back(make_round(
      2, {"D", "C", "E"}, {{0, 0, 0}, {0, 0, 0}, {2, 0, 2}}, false));
  t.rounds.push_back(make_round(
      3, {"B", "B", "A"}, {{0, 0, 0}, {0, 2, 2}, {0, 2, 2}}, false));
  t.rounds.push_back(make_round(
      4, {"D", "B", "D"}, {{2, 2, 2}, {0, 0, 2}, {2, 0, 2}}, true));
  t.termination = model::Termination::MaxRounds;
  t.wall_clock_seconds = {1.25, 1.5, 0.75, 2.0};
  return t;
}

// Four-round, 2-solver x 2-reflector free-form transcript with the EvoChart
// weight matrices; reaches consensus on "20%" in round 4.
inline model::DebateTranscript evochart_transcript() {
  model::DebateTranscript t;
  t.problem_id = "evochart-example";
  t.roster_fingerprint = "S:o4-mini,claude-s|R:o4-mini,claude-s|O:gpt-4o";
  t.option_codes = {};
  t.rounds.push_back(
      make_round(1, {"20%", "18%"}, {{2, 2}, {2, 2}}, false));
  t.rounds.push_back(
      make_round(2, {"20%", "18%"}, {{2, 2}, {2, 0}}, false));
  t.rounds.push_back(
      make_round(3, {"20%", "18%"}, {{2, 2}, {2, 2}}, false));
  t.rounds.push_back(
      make_round(4, {"20%", "20%"}, {{2, 2}, {2, 2}}, true));
  t.termination = model::Termination::Consensus;
  t.wall_clock_seconds = {0.5, 0.5, 0.5, 0.5};
  return t;
}

}  // namespace wise::test
