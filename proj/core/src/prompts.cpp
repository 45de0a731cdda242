#include "wise/protocol/prompts.hpp"

#include <array>

#include "wise/errors.hpp"

namespace wise::protocol {
namespace {

constexpr const char* kSolverRound1 =
    "Please describe the problem, including the images if available. Your "
    "description of the image should be detailed and accurate so that an LLM "
    "without access to the image can solve the problem. After this, please "
    "solve this question with explanation of the intermediate steps. You must "
    "select an answer from one of the five options:\n"
    "Puzzle: [PROBLEM]...[/PROBLEM]\n"
    "\n"
    "Options: [OPTIONS] ... [/OPTIONS].\n"
    "\n"
    "Write the final answer option as one of A1, B2, C3, D4, E5.";

constexpr const char* kReflector =
    "Following are the solutions of LLM in solving a math puzzle. The problem "
    "statement and the LLM solution are provided below. The problem may "
    "contain an image that needs to be used to understand the LLM's answer. "
    "You should not solve the problem yourself. Instead, please check if the "
    "solutions below are logically and mathematically consistent and the "
    "final answer is correct?\n"
    "\n"
    "[PROBLEM] ... [/PROBLEM].\n"
    "\n"
    "[RESPONSE] ... [/RESPONSE].\n"
    "\n"
    "Your Task: Provide a detailed explanation of your assessment so that it "
    "can be used as feedback to LLM to improve the solution, including any "
    "mistakes in understanding the given image (if any).\n"
    "\n"
    "Your response should end with a single line in the format:\n"
    "\n"
    "FINAL_SCORE: <value>\n"
    "\n"
    "where <value> is 0 if final answer is the wrong, 1 if you are unable to "
    "confirm, and 2 if the final answer is correct.";

constexpr const char* kOrchestrator =
    "The following are the feedback received from LLMs on a puzzle solution. "
    "There could be significant differences in the feedback provided by "
    "different LLMs, especially the LLMs may select different answer options. "
    "Your task is to pay attention to these differences in the feedback and "
    "the selected answer options. Please summarize all the feedback and "
    "provide a set of actionable questions for the solver to revise its "
    "solution in the next round. It is possible that the previous solution "
    "might have overlooked details in the given image (if any), and thus your "
    "summary should emphasize the importance of re-evaluating the image.\n"
    "\n"
    "[FEEDBACK] [/FEEDBACK]\n"
    "\n"
    "[FEEDBACK] [/FEEDBACK]\n"
    "...";

constexpr const char* kSolverFollowup =
    "Following is the feedback received on your previous solution. If there "
    "was a mistake in your previous solution, use this feedback and the list "
    "of actionable steps provided to reconsider and re-evaluate your "
    "solution. You should re-evaluate your understanding the given image (if "
    "any) and the problem statement using the feedback. Specifically, based "
    "on the provided feedback, please provide a detailed explanation of the "
    "given image (if any). Please provide the final answer option and "
    "explanation of the intermediate steps, as well as details of how the "
    "feedbacks were addressed in your revised final answer. Your final answer "
    "should be reported in your final line and must select one of the answer "
    "options: A1, B2, C3, D4, E5.\n"
    "\n"
    "[PROBLEM] ... [/PROBLEM] [OPTIONS] ... [/OPTIONS]\n"
    "\n"
    "[RESPONSE] ... [/RESPONSE]\n"
    "[FEEDBACK] ... [/FEEDBACK]";

constexpr const char* kEnumeration = "A1, B2, C3, D4, E5";

bool contains_region(const std::string& text, const std::string& tag) {
  return text.find("[" + tag + "]") != std::string::npos &&
         text.find("[/" + tag + "]") != std::string::npos;
}

void require_regions(const std::string& name, const std::string& text,
                     const std::vector<std::string>& required) {
  static const std::array<const char*, 4> all = {"PROBLEM", "OPTIONS",
                                                 "RESPONSE", "FEEDBACK"};
  for (const char* tag : all) {
    const bool want =
        std::find(required.begin(), required.end(), tag) != required.end();
    if (want && !contains_region(text, tag)) {
      throw ConfigError(name + " template lacks [" + tag + "] region");
    }
    if (!want && text.find("[" + std::string(tag) + "]") != std::string::npos) {
      throw ConfigError(name + " template has unexpected [" + tag +
                        "] region");
    }
  }
}

std::string replace_all(std::string text, const std::string& from,
                        const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string number_word(int n) {
  static const std::array<const char*, 11> words = {
      "zero", "one", "two",   "three", "four", "five",
      "six",  "seven", "eight", "nine",  "ten"};
  if (n >= 0 && n <= 10) return words[static_cast<std::size_t>(n)];
  return std::to_string(n);
}

std::string option_codes_list(const model::Problem& p) {
  std::string out;
  for (std::size_t i = 0; i < p.options.size(); ++i) {
    if (i) out += ", ";
    out += p.options[i].first;
  }
  return out;
}

std::string options_block(const model::Problem& p) {
  std::string out;
  for (std::size_t i = 0; i < p.options.size(); ++i) {
    if (i) out += "\n";
    out += p.options[i].first + ": " + p.options[i].second;
  }
  return out;
}

// Adapts a solver template written for five lettered options to the actual
// option set: rewrites the code enumeration and the option count, and for
// free-form problems replaces option selection with a FINAL_ANSWER format
// instruction and drops the Options region.
std::string adapt_solver_template(std::string text, const model::Problem& p) {
  const int k = p.option_count();
  if (p.free_form()) {
    text = replace_all(
        text, " You must select an answer from one of the five options:", "");
    text = replace_all(
        text,
        "Your final answer should be reported in your final line and must "
        "select one of the answer options: A1, B2, C3, D4, E5.",
        "Your final answer should be reported in your final line in the "
        "format FINAL_ANSWER: <answer>.");
    text = replace_all(text, "Write the final answer option as one of A1, "
                             "B2, C3, D4, E5.",
                       "Write the final answer on the last line in the "
                       "format FINAL_ANSWER: <answer>.");
    text = replace_all(text, "\nOptions: [OPTIONS] ... [/OPTIONS].\n", "");
    text = replace_all(text, " [OPTIONS] ... [/OPTIONS]", "");
    return text;
  }
  text = replace_all(text, kEnumeration, option_codes_list(p));
  if (k != 5) {
    text = replace_all(text, "one of the five options",
                       "one of the " + number_word(k) + " options");
  }
  return text;
}

}  // namespace

std::string fill_region(const std::string& text, const std::string& tag,
                        const std::string& content) {
  const std::string open = "[" + tag + "]";
  const std::string close = "[/" + tag + "]";
  const auto a = text.find(open);
  if (a == std::string::npos) {
    throw ConfigError("template lacks [" + tag + "] region");
  }
  const auto b = text.find(close, a);
  if (b == std::string::npos) {
    throw ConfigError("template lacks [/" + tag + "] region");
  }
  return text.substr(0, a + open.size()) + content + text.substr(b);
}

PromptSet PromptSet::defaults() {
  PromptSet p;
  p.solver_round1 = kSolverRound1;
  p.solver_followup = kSolverFollowup;
  p.reflector = kReflector;
  p.orchestrator = kOrchestrator;
  return p;
}

void PromptSet::validate() const {
  require_regions("solver_round1", solver_round1, {"PROBLEM", "OPTIONS"});
  require_regions("solver_followup", solver_followup,
                  {"PROBLEM", "OPTIONS", "RESPONSE", "FEEDBACK"});
  require_regions("reflector", reflector, {"PROBLEM", "RESPONSE"});
  require_regions("orchestrator", orchestrator, {"FEEDBACK"});
}

backend::CompletionRequest build_solver_task(
    const model::Problem& p, int round,
    const std::optional<std::string>& prior_response,
    const std::optional<std::string>& orchestrator_feedback,
    const PromptSet& prompts) {
  if (round < 1) throw ProtocolError("solver round must be >= 1");
  backend::CompletionRequest req;
  if (round == 1) {
    std::string text = adapt_solver_template(prompts.solver_round1, p);
    text = fill_region(text, "PROBLEM", p.question);
    if (!p.free_form()) text = fill_region(text, "OPTIONS", options_block(p));
    req.user_text = text;
  } else {
    if (!prior_response || !orchestrator_feedback) {
      throw ProtocolError("follow-up round needs prior response and feedback");
    }
    std::string text = adapt_solver_template(prompts.solver_followup, p);
    text = fill_region(text, "PROBLEM", p.question);
    if (!p.free_form()) text = fill_region(text, "OPTIONS", options_block(p));
    text = fill_region(text, "RESPONSE", *prior_response);
    text = fill_region(text, "FEEDBACK", *orchestrator_feedback);
    req.user_text = text;
  }
  req.image_refs = p.image_refs;
  return req;
}

backend::CompletionRequest build_reflector_task(
    const model::Problem& p, const model::SolverResponse& response,
    const model::AgentBinding& reflector, const PromptSet& prompts) {
  backend::CompletionRequest req;
  std::string text = fill_region(prompts.reflector, "PROBLEM", p.question);
  text = fill_region(text, "RESPONSE", response.raw_text);
  req.user_text = text;
  if (reflector.vision_capable()) req.image_refs = p.image_refs;
  return req;
}

backend::CompletionRequest build_orchestrator_task(
    const std::vector<std::string>& feedbacks, const PromptSet& prompts) {
  if (feedbacks.empty()) {
    throw ProtocolError("orchestrator task needs at least one feedback");
  }
  // The template shows the repeated-block shape ("[FEEDBACK] [/FEEDBACK]"
  // twice plus an ellipsis); the whole region is replaced by one filled
  // block per feedback.
  const std::string& tmpl = prompts.orchestrator;
  const auto first = tmpl.find("[FEEDBACK]");
  auto last = tmpl.rfind("[/FEEDBACK]");
  if (first == std::string::npos || last == std::string::npos) {
    throw ConfigError("orchestrator template lacks [FEEDBACK] region");
  }
  last += std::string("[/FEEDBACK]").size();
  auto tail = tmpl.substr(last);
  if (tail.compare(0, 4, "\n...") == 0) tail = tail.substr(4);

  std::string blocks;
  for (std::size_t i = 0; i < feedbacks.size(); ++i) {
    if (i) blocks += "\n\n";
    blocks += "[FEEDBACK]" + feedbacks[i] + "[/FEEDBACK]";
  }
  backend::CompletionRequest req;
  req.user_text = tmpl.substr(0, first) + blocks + tail;
  return req;
}

}  // namespace wise::protocol
