#pragma once

#include <cstdint>
#include <string>

#include "wise/model/types.hpp"
#include "wise/protocol/engine.hpp"
#include "wise/protocol/prompts.hpp"

namespace wise::harness {

enum class Aggregator { Majority, WeightedMajority, ClassicDs, WiseDs };

// Accepts the long names (majority, weighted-majority, classic-ds, wise-ds)
// and the CLI short forms (wmajority, ds). ConfigError otherwise.
Aggregator aggregator_from_string(const std::string& s);
std::string to_string(Aggregator a);

struct AggregationFlags {
  Aggregator aggregator = Aggregator::WiseDs;
  bool raw_answers = false;    // aggregate raw instead of decoded answers
  bool pooled_counts = false;  // one EM fit on pooled counts, reused per round
};

// Full description of a harness run. Parsed from a sectioned config file:
//
//   [dataset]
//   path = problems.jsonl
//
//   [roster]                       ; repeated keys accumulate
//   solver = gpt-4o @ scripted
//   solver = claude @ scripted text
//   reflector = gpt-4o @ scripted
//   orchestrator = gpt-4o @ scripted
//   replay = fixtures/replay.jsonl ; backend id "scripted" replays this file
//
//   [policy]
//   max_rounds = 8
//   parallelism = 4
//   consensus_stop = true
//   out = runs/demo
//   resume = false
//   seed = 0
//
//   [prompts]                      ; template file overrides, all optional
//   solver_round1 = prompts/solver1.txt
//
//   [aggregation]
//   aggregator = wise-ds
//   raw_answers = false
//   pooled_counts = false
//
// Roster entries are "name @ backend_id" with an optional trailing modality
// token (text, vision). Unknown sections or keys are ConfigErrors so a typo
// cannot silently disable an option.
struct RunConfig {
  std::string dataset_path;
  model::AgentRoster roster;
  protocol::DebatePolicy policy;
  protocol::PromptSet prompts = protocol::PromptSet::defaults();
  AggregationFlags aggregation;
  std::string replay_path;  // required iff a roster entry uses "scripted"
  std::string output_dir = "out";
  bool resume = false;
  std::uint64_t seed = 0;

  void validate() const;

  // Stable label for reports: roster fingerprint plus aggregator name.
  std::string fingerprint() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace wise::harness
