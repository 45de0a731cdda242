#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wise/model/types.hpp"

namespace wise::backend {

struct CompletionRequest {
  std::string system_text;
  std::string user_text;
  std::vector<std::string> image_refs;
  int max_tokens = 4096;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;

  void validate() const;
};

// Where in the debate a call originates. Backends may ignore it; the
// scripted backend uses it to match replay records deterministically under
// concurrent fan-out.
struct CallContext {
  std::string role;      // "solver", "reflector", "orchestrator" or empty
  int round = 0;         // 1-based, 0 when not applicable
  int solver_index = -1; // judged solver for reflector/orchestrator calls
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  // Returns the model's reply text or throws BackendFailure. Implementations
  // must be safe to call from many threads at once.
  virtual std::string complete(const model::AgentBinding& binding,
                               const CompletionRequest& req,
                               const CallContext& ctx) = 0;

  std::string complete(const model::AgentBinding& binding,
                       const CompletionRequest& req) {
    return complete(binding, req, CallContext{});
  }
};

// Resolves AgentBinding.backend_id to a concrete backend.
class BackendRegistry {
 public:
  void add(const std::string& id, std::shared_ptr<ChatBackend> backend);
  bool has(const std::string& id) const;
  ChatBackend& get(const std::string& id) const;  // ConfigError when unknown

  std::string complete(const model::AgentBinding& binding,
                       const CompletionRequest& req,
                       const CallContext& ctx = {}) const;

 private:
  std::map<std::string, std::shared_ptr<ChatBackend>> backends_;
};

}  // namespace wise::backend
