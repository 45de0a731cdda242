#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wise/backend/completion.hpp"
#include "wise/model/types.hpp"

namespace wise::protocol {

// The four debate prompt templates. Placeholders are bracketed regions such
// as [PROBLEM] ... [/PROBLEM]; rendering fills the region between the tags
// and keeps the tags as delimiters. The defaults are the solver, reflector
// and orchestrator prompts used throughout, with the option enumeration
// ("A1, B2, C3, D4, E5") rewritten at render time to the problem's actual
// option codes.
struct PromptSet {
  std::string solver_round1;
  std::string solver_followup;
  std::string reflector;
  std::string orchestrator;

  static PromptSet defaults();

  // Each template must contain exactly its required placeholder regions:
  // solver_round1 PROBLEM+OPTIONS, solver_followup all four, reflector
  // PROBLEM+RESPONSE, orchestrator FEEDBACK.
  void validate() const;
};

// Round 1 renders solver_round1; later rounds render solver_followup with
// the solver's own prior response and the orchestrator feedback, which both
// must be present.
backend::CompletionRequest build_solver_task(
    const model::Problem& p, int round,
    const std::optional<std::string>& prior_response,
    const std::optional<std::string>& orchestrator_feedback,
    const PromptSet& prompts);

// Images are attached only when the reflector binding is vision-capable.
backend::CompletionRequest build_reflector_task(
    const model::Problem& p, const model::SolverResponse& response,
    const model::AgentBinding& reflector, const PromptSet& prompts);

// Orchestrator input is the concatenation of feedback blocks (weights != -1
// already filtered by the caller); the orchestrator is text-only.
backend::CompletionRequest build_orchestrator_task(
    const std::vector<std::string>& feedbacks, const PromptSet& prompts);

// Exposed for tests: fills one [TAG] ... [/TAG] region.
std::string fill_region(const std::string& text, const std::string& tag,
                        const std::string& content);

}  // namespace wise::protocol
