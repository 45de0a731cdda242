#include "wise/backend/remote.hpp"

#include <cctype>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "wise/errors.hpp"

namespace wise::backend {
namespace {

using nlohmann::json;

std::string getenv_or(const std::string& name, const std::string& fallback) {
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : fallback;
}

bool transient_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

json build_body(const model::AgentBinding& binding,
                const CompletionRequest& req) {
  json messages = json::array();
  if (!req.system_text.empty()) {
    messages.push_back({{"role", "system"}, {"content", req.system_text}});
  }
  if (req.image_refs.empty()) {
    messages.push_back({{"role", "user"}, {"content", req.user_text}});
  } else {
    json parts = json::array();
    parts.push_back({{"type", "text"}, {"text", req.user_text}});
    for (const auto& ref : req.image_refs) {
      parts.push_back(
          {{"type", "image_url"}, {"image_url", {{"url", ref}}}});
    }
    messages.push_back({{"role", "user"}, {"content", std::move(parts)}});
  }
  json body{{"model", binding.name},
            {"messages", std::move(messages)},
            {"max_tokens", req.max_tokens},
            {"temperature", req.temperature}};
  if (req.seed) body["seed"] = *req.seed;
  return body;
}

std::string extract_content(const std::string& response_body) {
  try {
    const json doc = json::parse(response_body);
    return doc.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const json::exception& e) {
    throw BackendFailure(std::string("malformed completion response: ") +
                         e.what());
  }
}

}  // namespace

std::string RemoteBackend::env_var_name(const std::string& id,
                                        const std::string& kind) {
  std::string out = "WISE_BACKEND_";
  for (char c : id) {
    out += std::isalnum(static_cast<unsigned char>(c))
               ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
               : '_';
  }
  return out + "_" + kind;
}

RemoteBackend::RemoteBackend(const std::string& id, RemoteOptions opts)
    : id_(id),
      opts_(std::move(opts)),
      rng_(opts_.jitter_seed),
      slots_free_(opts_.max_in_flight) {
  if (opts_.base_url.empty()) {
    opts_.base_url = getenv_or(env_var_name(id, "URL"), "");
  }
  if (opts_.api_key.empty()) {
    opts_.api_key = getenv_or(env_var_name(id, "KEY"), "");
  }
  if (opts_.base_url.empty()) {
    throw ConfigError("backend '" + id + "': no base URL (set " +
                      env_var_name(id, "URL") + ")");
  }
  if (opts_.attempts < 1) throw ConfigError("attempts must be >= 1");
  if (opts_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");

  // Split scheme://host[:port] from any path prefix such as /v1.
  const std::string& url = opts_.base_url;
  auto scheme_end = url.find("://");
  auto path_start = scheme_end == std::string::npos
                        ? url.find('/')
                        : url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_url_ = url;
  } else {
    base_url_ = url.substr(0, path_start);
    path_prefix_ = url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
      path_prefix_.pop_back();
    }
  }
}

std::chrono::milliseconds RemoteBackend::jittered(
    std::chrono::milliseconds base) {
  std::lock_guard<std::mutex> lock(rng_mu_);
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  const double factor = 1.0 + opts_.jitter_frac * (2.0 * u - 1.0);
  return std::chrono::milliseconds(
      static_cast<long long>(static_cast<double>(base.count()) * factor));
}

void RemoteBackend::sleep(std::chrono::milliseconds d) {
  if (opts_.sleep_fn) {
    opts_.sleep_fn(d);
  } else {
    std::this_thread::sleep_for(d);
  }
}

std::string RemoteBackend::complete(const model::AgentBinding& binding,
                                    const CompletionRequest& req,
                                    const CallContext&) {
  req.validate();
  if (!req.image_refs.empty() && !binding.vision_capable()) {
    throw ConfigError("agent " + binding.name +
                      " is text-only but received images");
  }

  // Max-in-flight slot; released on every exit path.
  {
    std::unique_lock<std::mutex> lock(slots_mu_);
    slots_cv_.wait(lock, [this] { return slots_free_ > 0; });
    --slots_free_;
  }
  struct SlotRelease {
    RemoteBackend* self;
    ~SlotRelease() {
      std::lock_guard<std::mutex> lock(self->slots_mu_);
      ++self->slots_free_;
      self->slots_cv_.notify_one();
    }
  } release{this};

  const std::string body = build_body(binding, req).dump();
  const std::string path = path_prefix_ + "/chat/completions";
  httplib::Headers headers;
  if (!opts_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + opts_.api_key);
  }

  std::string last_error;
  std::chrono::milliseconds backoff = opts_.initial_backoff;
  for (int attempt = 1; attempt <= opts_.attempts; ++attempt) {
    httplib::Client client(base_url_);
    client.set_read_timeout(opts_.read_timeout);
    client.set_connection_timeout(std::chrono::seconds(10));

    auto res = client.Post(path, headers, body, "application/json");
    if (res && res->status == 200) return extract_content(res->body);

    bool transient;
    if (!res) {
      transient = true;
      last_error = "transport error (" + httplib::to_string(res.error()) + ")";
    } else {
      transient = transient_status(res->status);
      last_error = "HTTP " + std::to_string(res->status);
    }
    if (!transient) {
      throw BackendFailure("backend '" + id_ + "': " + last_error);
    }
    if (attempt < opts_.attempts) {
      sleep(jittered(backoff));
      backoff *= 2;
    }
  }
  throw BackendFailure("backend '" + id_ + "': retries exhausted after " +
                       std::to_string(opts_.attempts) + " attempts (" +
                       last_error + ")");
}

}  // namespace wise::backend
