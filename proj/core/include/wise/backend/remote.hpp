#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <random>
#include <string>

#include "wise/backend/completion.hpp"

namespace wise::backend {

struct RemoteOptions {
  // Resolved from WISE_BACKEND_<ID>_URL / _KEY when left empty.
  std::string base_url;
  std::string api_key;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};  // doubled per retry
  double jitter_frac = 0.2;
  std::uint64_t jitter_seed = 0;
  int max_in_flight = 8;
  std::chrono::seconds read_timeout{120};
  // Injectable for tests; null means std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep_fn;
};

// Messages-style chat-completion client over HTTP(S). Transient failures
// (transport errors, 429, 5xx) are retried with exponential backoff and
// +-20% jitter; other HTTP errors and retry exhaustion raise BackendFailure.
class RemoteBackend : public ChatBackend {
 public:
  explicit RemoteBackend(const std::string& id, RemoteOptions opts = {});

  using ChatBackend::complete;
  std::string complete(const model::AgentBinding& binding,
                       const CompletionRequest& req,
                       const CallContext& ctx) override;

  // "WISE_BACKEND_<ID>_URL" with the id uppercased and non-alphanumerics
  // mapped to underscores.
  static std::string env_var_name(const std::string& id, const std::string& kind);

  const std::string& base_url() const { return base_url_; }

 private:
  std::chrono::milliseconds jittered(std::chrono::milliseconds base);
  void sleep(std::chrono::milliseconds d);

  std::string id_;
  RemoteOptions opts_;
  std::string base_url_;   // scheme://host[:port]
  std::string path_prefix_;

  std::mutex rng_mu_;
  std::mt19937_64 rng_;

  std::mutex slots_mu_;
  std::condition_variable slots_cv_;
  int slots_free_;
};

}  // namespace wise::backend
