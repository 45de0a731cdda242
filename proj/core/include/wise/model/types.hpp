#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wise::model {

// Sentinel weight emitted when a reflector fails to produce a usable score.
// Treated as missing data everywhere; never a class of its own.
inline constexpr int kReflectorFailure = -1;

// Number of reflector weight classes {0, 1, 2}.
inline constexpr int kWeightClasses = 3;

enum class OptionCodeStyle { LetterDigit, Letter };

// Canonical code for option `index`: "A1", "B2", ... in LetterDigit style,
// "A", "B", ... in Letter style. Valid for index in [0, 26).
std::string canonical_option_code(int index, OptionCodeStyle style);

// One candidate answer: either a valid option code of the owning problem,
// a verbatim free-form answer, or the abstain sentinel. Abstentions carry
// no ballot and are scored as incorrect.
class AnswerOption {
 public:
  AnswerOption() = default;
  explicit AnswerOption(std::string code) : code_(std::move(code)) {}

  static AnswerOption abstain() { return AnswerOption(); }

  bool is_abstain() const { return code_.empty(); }
  const std::string& code() const { return code_; }

  friend bool operator==(const AnswerOption&, const AnswerOption&) = default;

 private:
  std::string code_;  // empty == abstain
};

// One task instance. K == 0 (empty options) means free-form answers.
struct Problem {
  std::string id;
  std::string question;
  std::vector<std::string> image_refs;
  // Ordered candidate options as (code, text) pairs.
  std::vector<std::pair<std::string, std::string>> options;
  std::optional<std::string> ground_truth;
  std::map<std::string, std::string> tags;

  int option_count() const { return static_cast<int>(options.size()); }
  bool free_form() const { return options.empty(); }
  bool has_images() const { return !image_refs.empty(); }

  // Index of `code` in the option list, or -1 if absent.
  int option_index(const std::string& code) const;

  // Throws DimensionMismatch / ConfigError when an invariant is violated:
  // duplicate or empty option codes, ground truth not among the codes.
  void validate() const;
};

struct SolverResponse {
  int round = 0;        // 1-based
  int solver_index = 0;
  std::string raw_text;
  AnswerOption parsed_answer;
  bool parse_ok = false;

  friend bool operator==(const SolverResponse&, const SolverResponse&) = default;
};

struct ReflectorJudgment {
  int round = 0;
  int solver_index = 0;
  int reflector_index = 0;
  int weight = kReflectorFailure;  // in {-1, 0, 1, 2}
  std::string feedback_text;

  bool missing() const { return weight == kReflectorFailure; }

  friend bool operator==(const ReflectorJudgment&, const ReflectorJudgment&) = default;
};

// One debate round: n solver responses, an n x m judgment grid (the weight
// and feedback matrices), and one orchestrator summary per solver (empty
// list on the terminal round).
struct DebateRound {
  int round_index = 0;  // 1-based
  std::vector<SolverResponse> responses;
  std::vector<std::vector<ReflectorJudgment>> judgments;  // [solver][reflector]
  std::vector<std::string> orchestrator_summaries;

  int solver_count() const { return static_cast<int>(responses.size()); }
  int reflector_count() const {
    return judgments.empty() ? 0 : static_cast<int>(judgments.front().size());
  }

  // Weight of judgment (solver i, reflector j).
  int weight(int i, int j) const { return judgments.at(i).at(j).weight; }

  friend bool operator==(const DebateRound&, const DebateRound&) = default;
};

enum class Termination { Consensus, MaxRounds, BackendFailure };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct DebateTranscript {
  std::string problem_id;
  std::string roster_fingerprint;
  // Option codes of the problem, in order; empty for free-form problems.
  // Stored so aggregation can run from transcripts alone.
  std::vector<std::string> option_codes;
  std::vector<DebateRound> rounds;
  Termination termination = Termination::MaxRounds;
  std::vector<double> wall_clock_seconds;  // one entry per round

  int round_count() const { return static_cast<int>(rounds.size()); }

  // Grid shape, index consistency and round monotonicity checks.
  void validate() const;

  friend bool operator==(const DebateTranscript&, const DebateTranscript&) = default;
};

enum class Modality { Text, VisionText };

std::string to_string(Modality m);

struct GenerationParams {
  int max_tokens = 4096;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

// One agent slot: display/model name, the backend it is served by, and its
// modality. The same model name may appear in several roles.
struct AgentBinding {
  std::string name;
  std::string backend_id;
  Modality modality = Modality::VisionText;
  GenerationParams params;

  bool vision_capable() const { return modality == Modality::VisionText; }

  friend bool operator==(const AgentBinding&, const AgentBinding&) = default;
};

struct AgentRoster {
  std::vector<AgentBinding> solvers;
  std::vector<AgentBinding> reflectors;
  AgentBinding orchestrator;

  int solver_count() const { return static_cast<int>(solvers.size()); }
  int reflector_count() const { return static_cast<int>(reflectors.size()); }

  // "S:a,b|R:c|O:d" — stable identity used to detect mixed-roster inputs.
  std::string fingerprint() const;

  // n >= 1, m >= 1; with `dataset_has_images`, every solver must be
  // vision-capable.
  void validate(bool dataset_has_images = false) const;
};

}  // namespace wise::model
