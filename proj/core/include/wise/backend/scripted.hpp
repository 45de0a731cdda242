#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wise/backend/completion.hpp"

namespace wise::backend {

// One replay record. `agent` is required; the other constraints are optional
// and, when present, must match the call's context. Unset fields match any
// call.
struct ReplayRecord {
  std::string agent;
  std::string reply;
  std::optional<std::string> role;
  std::optional<int> round;
  std::optional<int> solver;
};

// Replay file loaders: JSON lines with fields agent, reply and optional
// role/round/solver. Blank lines and #-comments are skipped.
std::vector<ReplayRecord> parse_replay_jsonl(const std::string& text);
std::vector<ReplayRecord> load_replay_file(const std::string& path);

// Deterministic backend for replay tests: every call pops the first not yet
// consumed record (in file order) whose agent name and constraints match.
// Exhaustion or a call nothing matches is a loud BackendFailure, so a replay
// fixture that drifts from the engine's call pattern fails instead of
// silently answering out of turn.
class ScriptedBackend : public ChatBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<ReplayRecord> records);

  void push(ReplayRecord record);
  std::size_t remaining() const;

  using ChatBackend::complete;
  std::string complete(const model::AgentBinding& binding,
                       const CompletionRequest& req,
                       const CallContext& ctx) override;

 private:
  mutable std::mutex mu_;
  std::vector<ReplayRecord> records_;
  std::vector<bool> consumed_;
};

}  // namespace wise::backend
