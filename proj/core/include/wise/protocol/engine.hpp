#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wise/backend/completion.hpp"
#include "wise/model/types.hpp"
#include "wise/protocol/prompts.hpp"

namespace wise::protocol {

struct DebatePolicy {
  int max_rounds = 8;
  bool consensus_stop = true;
  int parallelism = 1;  // concurrent debates at the harness level

  void validate() const;  // 1 <= max_rounds <= 64, parallelism >= 1
};

// One line per backend call, for the structured run log.
struct CallLogEntry {
  std::string problem_id;
  int round = 0;
  std::string role;
  std::string agent;
  double latency_ms = 0.0;
  std::string outcome;  // "ok" or "backend_failure"
};
using CallLogFn = std::function<void(const CallLogEntry&)>;

// True iff every solver picked the same non-ABSTAIN answer and every
// reflector weight is 2.
bool check_consensus(const model::DebateRound& round);

// Joins the feedback texts with weight != -1 into the orchestrator prompt
// and returns the orchestrator's summary. All-missing input returns the
// empty summary without a backend call. BackendFailure propagates.
std::string orchestrate_feedback(
    const std::vector<model::ReflectorJudgment>& judgments,
    const PromptSet& prompts, const model::AgentBinding& orchestrator,
    backend::BackendRegistry& backends, const backend::CallContext& ctx);

// Runs the full debate: per round a solver fan-out, a reflector fan-out over
// all (solver, reflector) pairs, the consensus check, and an orchestrator
// fan-out when the debate continues. Calls within a phase run concurrently;
// rounds are sequential. A failed solver call abstains for the round, a
// failed reflector call records weight -1, a failed orchestrator call ends
// the debate with termination BackendFailure.
model::DebateTranscript run_debate(const model::Problem& p,
                                   const model::AgentRoster& roster,
                                   const DebatePolicy& policy,
                                   const PromptSet& prompts,
                                   backend::BackendRegistry& backends,
                                   const CallLogFn& log = {});

}  // namespace wise::protocol
