#include "wise/model/types.hpp"

#include <set>
#include <sstream>

#include "wise/errors.hpp"

namespace wise::model {

std::string canonical_option_code(int index, OptionCodeStyle style) {
  if (index < 0 || index >= 26) {
    throw InvalidIndex("option index " + std::to_string(index) +
                       " outside [0, 26)");
  }
  std::string code(1, static_cast<char>('A' + index));
  if (style == OptionCodeStyle::LetterDigit) code += std::to_string(index + 1);
  return code;
}

int Problem::option_index(const std::string& code) const {
  for (int i = 0; i < static_cast<int>(options.size()); ++i) {
    if (options[i].first == code) return i;
  }
  return -1;
}

void Problem::validate() const {
  if (id.empty()) throw ConfigError("problem with empty id");
  std::set<std::string> seen;
  for (const auto& [code, text] : options) {
    if (code.empty()) {
      throw ConfigError("problem " + id + ": empty option code");
    }
    if (!seen.insert(code).second) {
      throw ConfigError("problem " + id + ": duplicate option code " + code);
    }
  }
  if (ground_truth && !options.empty() && option_index(*ground_truth) < 0) {
    throw DimensionMismatch("problem " + id + ": ground truth '" +
                            *ground_truth + "' is not an option code");
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Consensus: return "consensus";
    case Termination::MaxRounds: return "max_rounds";
    case Termination::BackendFailure: return "backend_failure";
  }
  throw InvalidLabel("unknown termination");
}

Termination termination_from_string(const std::string& s) {
  if (s == "consensus") return Termination::Consensus;
  if (s == "max_rounds") return Termination::MaxRounds;
  if (s == "backend_failure") return Termination::BackendFailure;
  throw InvalidLabel("unknown termination '" + s + "'");
}

std::string to_string(Modality m) {
  return m == Modality::Text ? "text" : "vision+text";
}

void DebateTranscript::validate() const {
  if (problem_id.empty()) throw ConfigError("transcript with empty problem_id");
  int n = -1, m = -1;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const DebateRound& round = rounds[k];
    if (round.round_index != static_cast<int>(k) + 1) {
      throw DimensionMismatch("transcript " + problem_id + ": round " +
                              std::to_string(k) + " has index " +
                              std::to_string(round.round_index));
    }
    if (n < 0) {
      n = round.solver_count();
      m = round.reflector_count();
    }
    if (round.solver_count() != n ||
        static_cast<int>(round.judgments.size()) != n) {
      throw DimensionMismatch("transcript " + problem_id +
                              ": inconsistent solver count in round " +
                              std::to_string(round.round_index));
    }
    for (int i = 0; i < n; ++i) {
      const SolverResponse& r = round.responses[i];
      if (r.round != round.round_index || r.solver_index != i) {
        throw DimensionMismatch("transcript " + problem_id +
                                ": response indices out of place in round " +
                                std::to_string(round.round_index));
      }
      if (static_cast<int>(round.judgments[i].size()) != m) {
        throw DimensionMismatch("transcript " + problem_id +
                                ": ragged judgment grid in round " +
                                std::to_string(round.round_index));
      }
      for (int j = 0; j < m; ++j) {
        const ReflectorJudgment& g = round.judgments[i][j];
        if (g.round != round.round_index || g.solver_index != i ||
            g.reflector_index != j) {
          throw DimensionMismatch("transcript " + problem_id +
                                  ": judgment indices out of place in round " +
                                  std::to_string(round.round_index));
        }
        if (g.weight < -1 || g.weight > 2) {
          throw InvalidLabel("transcript " + problem_id + ": weight " +
                             std::to_string(g.weight) + " outside {-1,0,1,2}");
        }
      }
      if (!r.parsed_answer.is_abstain() && !option_codes.empty()) {
        bool known = false;
        for (const auto& c : option_codes) {
          if (c == r.parsed_answer.code()) { known = true; break; }
        }
        if (!known) {
          throw DimensionMismatch("transcript " + problem_id + ": answer '" +
                                  r.parsed_answer.code() +
                                  "' is not a listed option code");
        }
      }
    }
    const bool terminal = (k + 1 == rounds.size());
    const std::size_t want_summaries = terminal ? 0 : static_cast<std::size_t>(n);
    if (round.orchestrator_summaries.size() != want_summaries) {
      throw DimensionMismatch("transcript " + problem_id +
                              ": orchestrator summary count mismatch in round " +
                              std::to_string(round.round_index));
    }
  }
  if (termination == Termination::Consensus) {
    if (rounds.empty()) {
      throw ProtocolError("transcript " + problem_id +
                          ": consensus termination without rounds");
    }
    const DebateRound& last = rounds.back();
    bool ok = !last.responses.empty();
    for (const SolverResponse& r : last.responses) {
      if (r.parsed_answer.is_abstain() ||
          r.parsed_answer != last.responses.front().parsed_answer) {
        ok = false;
      }
    }
    for (const auto& row : last.judgments) {
      for (const auto& g : row) {
        if (g.weight != 2) ok = false;
      }
    }
    if (!ok) {
      throw ProtocolError("transcript " + problem_id +
                          ": consensus termination but final round lacks "
                          "unanimous answers with weight 2");
    }
  }
  if (!wall_clock_seconds.empty() &&
      wall_clock_seconds.size() != rounds.size()) {
    throw DimensionMismatch("transcript " + problem_id +
                            ": wall clock entries do not match rounds");
  }
}

std::string AgentRoster::fingerprint() const {
  std::ostringstream out;
  out << "S:";
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    if (i) out << ',';
    out << solvers[i].name;
  }
  out << "|R:";
  for (std::size_t i = 0; i < reflectors.size(); ++i) {
    if (i) out << ',';
    out << reflectors[i].name;
  }
  out << "|O:" << orchestrator.name;
  return out.str();
}

void AgentRoster::validate(bool dataset_has_images) const {
  if (solvers.empty()) throw ConfigError("roster has no solvers");
  if (reflectors.empty()) throw ConfigError("roster has no reflectors");
  if (orchestrator.name.empty()) throw ConfigError("roster has no orchestrator");
  std::vector<const AgentBinding*> all;
  for (const auto& s : solvers) all.push_back(&s);
  for (const auto& r : reflectors) all.push_back(&r);
  all.push_back(&orchestrator);
  for (const AgentBinding* a : all) {
    if (a->name.empty()) throw ConfigError("agent binding with empty name");
    if (a->backend_id.empty()) {
      throw ConfigError("agent " + a->name + " has no backend_id");
    }
  }
  if (dataset_has_images) {
    for (const auto& s : solvers) {
      if (!s.vision_capable()) {
        throw ConfigError("solver " + s.name +
                          " is text-only but the dataset contains images");
      }
    }
  }
}

}  // namespace wise::model
