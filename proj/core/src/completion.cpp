#include "wise/backend/completion.hpp"

#include "wise/errors.hpp"

namespace wise::backend {

void CompletionRequest::validate() const {
  if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
  if (temperature < 0) throw ConfigError("temperature must be non-negative");
}

void BackendRegistry::add(const std::string& id,
                          std::shared_ptr<ChatBackend> backend) {
  if (!backend) throw ConfigError("null backend for id " + id);
  backends_[id] = std::move(backend);
}

bool BackendRegistry::has(const std::string& id) const {
  return backends_.count(id) > 0;
}

ChatBackend& BackendRegistry::get(const std::string& id) const {
  auto it = backends_.find(id);
  if (it == backends_.end()) throw ConfigError("unknown backend '" + id + "'");
  return *it->second;
}

std::string BackendRegistry::complete(const model::AgentBinding& binding,
                                      const CompletionRequest& req,
                                      const CallContext& ctx) const {
  return get(binding.backend_id).complete(binding, req, ctx);
}

}  // namespace wise::backend
