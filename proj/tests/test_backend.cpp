#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "wise/backend/judge.hpp"
#include "wise/backend/remote.hpp"
#include "wise/backend/scripted.hpp"
#include "wise/backend/synthetic.hpp"
#include "wise/errors.hpp"

using namespace wise;
using namespace wise::backend;

namespace {

model::AgentBinding binding(const std::string& name,
                            const std::string& backend_id = "scripted") {
  model::AgentBinding b;
  b.name = name;
  b.backend_id = backend_id;
  return b;
}

CompletionRequest request(const std::string& user_text = "hello") {
  CompletionRequest req;
  req.user_text = user_text;
  return req;
}

}  // namespace

TEST_CASE("scripted backend replays queued replies in order") {
  ScriptedBackend sb({{"solver-a", "FINAL_ANSWER: B2", {}, {}, {}},
                      {"solver-a", "second", {}, {}, {}},
                      {"solver-b", "other", {}, {}, {}}});
  CHECK(sb.remaining() == 3);
  CHECK(sb.complete(binding("solver-a"), request()) == "FINAL_ANSWER: B2");
  CHECK(sb.complete(binding("solver-b"), request()) == "other");
  CHECK(sb.complete(binding("solver-a"), request()) == "second");
  CHECK(sb.remaining() == 0);
}

TEST_CASE("scripted backend exhaustion is a BackendFailure") {
  ScriptedBackend sb({{"solver-a", "once", {}, {}, {}}});
  CHECK(sb.complete(binding("solver-a"), request()) == "once");
  CHECK_THROWS_AS(sb.complete(binding("solver-a"), request()), BackendFailure);
  CHECK_THROWS_AS(sb.complete(binding("unknown"), request()), BackendFailure);
}

TEST_CASE("scripted records honor context constraints") {
  ScriptedBackend sb;
  sb.push({"agent", "round-2 reply", "solver", 2, {}});
  sb.push({"agent", "round-1 reply", "solver", 1, {}});
  sb.push({"agent", "reflector on solver 1", "reflector", 1, 1});

  CallContext solver_r1{"solver", 1, 0};
  CallContext solver_r2{"solver", 2, 0};
  CallContext reflector{"reflector", 1, 1};
  CHECK(sb.complete(binding("agent"), request(), solver_r1) == "round-1 reply");
  CHECK(sb.complete(binding("agent"), request(), reflector) ==
        "reflector on solver 1");
  CHECK(sb.complete(binding("agent"), request(), solver_r2) == "round-2 reply");
  // A context no remaining record matches fails loudly.
  CHECK_THROWS_AS(sb.complete(binding("agent"), request(), solver_r1),
                  BackendFailure);
}

TEST_CASE("scripted replay files parse jsonl with comments") {
  const std::string text =
      "# fixture\n"
      "{\"agent\": \"a\", \"reply\": \"r1\", \"role\": \"solver\", "
      "\"round\": 1, \"solver\": 0}\n"
      "\n"
      "{\"agent\": \"a\", \"reply\": \"r2\"}\n";
  ScriptedBackend sb(parse_replay_jsonl(text));
  CHECK(sb.remaining() == 2);
  CHECK(sb.complete(binding("a"), request(), {"solver", 1, 0}) == "r1");
  CHECK(sb.complete(binding("a"), request()) == "r2");

  CHECK_THROWS_AS(backend::parse_replay_jsonl("{\"reply\": \"no agent\"}\n"),
                  ParseError);
  CHECK_THROWS_AS(backend::parse_replay_jsonl("not json\n"), ParseError);
  CHECK_THROWS_AS(backend::load_replay_file("/nonexistent/replay.jsonl"),
                  ConfigError);
}

TEST_CASE("scripted backend is safe under concurrent fan-out") {
  ScriptedBackend sb;
  const int n = 64;
  for (int i = 0; i < n; ++i) {
    sb.push({"agent", "reply-" + std::to_string(i), "solver", 1, i});
  }
  std::vector<std::string> got(n);
  std::vector<std::thread> threads;
  for (int i = 0; i < n; ++i) {
    threads.emplace_back([&, i] {
      got[i] = sb.complete(binding("agent"), request(), {"solver", 1, i});
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 0; i < n; ++i) {
    CHECK(got[i] == "reply-" + std::to_string(i));
  }
}

TEST_CASE("synthetic emitter validation") {
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Solver;
  spec.confusion = {{0.5, 0.5}, {0.25, 0.75}};
  CHECK_NOTHROW(spec.validate());

  SUBCASE("row sum off") {
    spec.confusion[0][0] = 0.6;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
  SUBCASE("negative entry") {
    spec.confusion[0] = {1.5, -0.5};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
  SUBCASE("ragged") {
    spec.confusion[0] = {1.0};
    CHECK_THROWS_AS(spec.validate(), DimensionMismatch);
  }
  SUBCASE("reflector must be 3x3") {
    spec.kind = SyntheticKind::Reflector;
    CHECK_THROWS_AS(spec.validate(), DimensionMismatch);
  }
}

TEST_CASE("identity confusion is degenerate") {
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Solver;
  spec.confusion = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  spec.rng_seed = 7;
  SyntheticEmitter e(spec);
  for (int i = 0; i < 100; ++i) {
    CHECK(synthetic_solver_emit(e, 2) == 2);
  }

  SyntheticAgentSpec rspec;
  rspec.kind = SyntheticKind::Reflector;
  rspec.confusion = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  SyntheticEmitter r(rspec);
  CHECK(synthetic_reflector_emit(r, 1) == 1);
}

TEST_CASE("emitters reject bad labels and kinds") {
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Solver;
  spec.confusion = {{1, 0}, {0, 1}};
  SyntheticEmitter e(spec);
  CHECK_THROWS_AS(synthetic_solver_emit(e, -1), InvalidLabel);
  CHECK_THROWS_AS(synthetic_solver_emit(e, 2), InvalidLabel);
  CHECK_THROWS_AS(synthetic_reflector_emit(e, 0), ConfigError);
}

TEST_CASE("uniform 4x4 frequencies converge") {
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Solver;
  spec.confusion.assign(4, std::vector<double>(4, 0.25));
  spec.rng_seed = 20240823;
  SyntheticEmitter e(spec);
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[synthetic_solver_emit(e, 1)];
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(counts[j] / double(draws) - 0.25) < 0.01);
  }
}

TEST_CASE("skewed solver row frequency") {
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Solver;
  spec.confusion = {{0.9, 0.1, 0, 0, 0},
                    {0.1, 0.9, 0, 0, 0},
                    {0, 0, 1, 0, 0},
                    {0, 0, 0, 1, 0},
                    {0, 0, 0, 0, 1}};
  spec.rng_seed = 99;
  SyntheticEmitter e(spec);
  int zeros = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    if (synthetic_solver_emit(e, 0) == 0) ++zeros;
  }
  CHECK(std::abs(zeros / double(draws) - 0.9) < 0.02);
}

TEST_CASE("uniform 3x3 reflector frequencies") {
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Reflector;
  spec.confusion.assign(3, std::vector<double>(3, 1.0 / 3.0));
  spec.rng_seed = 5;
  SyntheticEmitter e(spec);
  std::vector<int> counts(3, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[synthetic_reflector_emit(e, 2)];
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(counts[j] / double(draws) - 1.0 / 3.0) < 0.01);
  }
}

TEST_CASE("skewed reflector row frequency") {
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Reflector;
  spec.confusion = {{0.8, 0.15, 0.05},
                    {0.1, 0.8, 0.1},
                    {0.05, 0.15, 0.8}};
  spec.rng_seed = 11;
  SyntheticEmitter e(spec);
  int twos = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    if (synthetic_reflector_emit(e, 2) == 2) ++twos;
  }
  CHECK(std::abs(twos / double(draws) - 0.8) < 0.02);
}

TEST_CASE("fixed seeds give bit-identical emission streams") {
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Solver;
  spec.confusion = {{0.4, 0.3, 0.2, 0.1},
                    {0.1, 0.4, 0.3, 0.2},
                    {0.2, 0.1, 0.4, 0.3},
                    {0.3, 0.2, 0.1, 0.4}};
  spec.rng_seed = 424242;
  SyntheticEmitter a(spec), b(spec);
  for (int i = 0; i < 5000; ++i) {
    CHECK(a.emit(i % 4) == b.emit(i % 4));
  }
}

TEST_CASE("emission frequencies pass a chi-square test") {
  // alpha = 0.01 critical values: df=3 -> 11.345, df=2 -> 9.210.
  SyntheticAgentSpec spec;
  spec.kind = SyntheticKind::Solver;
  spec.confusion = {{0.4, 0.3, 0.2, 0.1},
                    {0.1, 0.4, 0.3, 0.2},
                    {0.2, 0.1, 0.4, 0.3},
                    {0.3, 0.2, 0.1, 0.4}};
  spec.rng_seed = 1234;
  SyntheticEmitter e(spec);
  const int draws = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < draws; ++i) ++counts[e.emit(0)];
  double chi2 = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double expected = spec.confusion[0][j] * draws;
    chi2 += (counts[j] - expected) * (counts[j] - expected) / expected;
  }
  CHECK(chi2 < 11.345);

  SyntheticAgentSpec rspec;
  rspec.kind = SyntheticKind::Reflector;
  rspec.confusion = {{0.05, 0.15, 0.80},
                     {0.10, 0.80, 0.10},
                     {0.80, 0.15, 0.05}};
  rspec.rng_seed = 4321;
  SyntheticEmitter r(rspec);
  std::vector<int> rcounts(3, 0);
  for (int i = 0; i < draws; ++i) ++rcounts[r.emit(0)];
  double rchi2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double expected = rspec.confusion[0][j] * draws;
    rchi2 += (rcounts[j] - expected) * (rcounts[j] - expected) / expected;
  }
  CHECK(rchi2 < 9.210);
}

TEST_CASE("normalized equivalence judge") {
  CHECK(judge_equivalent("20%", "20"));
  CHECK_FALSE(judge_equivalent("18", "20"));
  CHECK(judge_equivalent("6.26dm", "6.26 dm"));
  CHECK(judge_equivalent("  42 KG ", "42"));
  CHECK(judge_equivalent("3.5h", "3.5"));
  CHECK(judge_equivalent("20", "20.0"));
  CHECK(judge_equivalent("1e3", "1000"));
  CHECK(judge_equivalent("  The   Blue Line ", "the blue line"));
  CHECK_FALSE(judge_equivalent("blue", "red"));
  // Bare unit words are answers, not suffixes to strip.
  CHECK(judge_equivalent("m", "m"));
  CHECK_FALSE(judge_equivalent("m", "s"));
  // Near-equal numbers inside relative tolerance.
  CHECK(judge_equivalent("0.333333333", "0.333333334"));
  CHECK_FALSE(judge_equivalent("0.3334", "0.3333"));
  CHECK_THROWS_AS(judge_equivalent("", "20"), EmptyInput);
  CHECK_THROWS_AS(judge_equivalent("20", ""), EmptyInput);
}

TEST_CASE("normalized judge is reflexive and symmetric") {
  const std::vector<std::string> samples = {
      "20%", "18", "6.26dm", "B2", "the answer", "0.0", "-3.5cm", "x y  z"};
  for (const auto& a : samples) {
    CHECK(judge_equivalent(a, a));
    for (const auto& b : samples) {
      CHECK(judge_equivalent(a, b) == judge_equivalent(b, a));
    }
  }
}

TEST_CASE("model judge parses yes/no verdicts") {
  ScriptedBackend sb({{"judge", "YES", {}, {}, {}},
                      {"judge", "No.", {}, {}, {}},
                      {"judge", "I think **yes**, they match.", {}, {}, {}},
                      {"judge", "maybe", {}, {}, {}}});
  auto b = binding("judge");
  CHECK(judge_equivalent_model("20%", "20", sb, b));
  CHECK_FALSE(judge_equivalent_model("18", "20", sb, b));
  CHECK(judge_equivalent_model("a", "b", sb, b));
  CHECK_THROWS_AS(judge_equivalent_model("a", "b", sb, b), JudgeError);
  CHECK_THROWS_AS(judge_equivalent_model("", "x", sb, b), EmptyInput);
}

TEST_CASE("remote env var names") {
  CHECK(RemoteBackend::env_var_name("openai-main", "URL") ==
        "WISE_BACKEND_OPENAI_MAIN_URL");
  CHECK(RemoteBackend::env_var_name("local", "KEY") ==
        "WISE_BACKEND_LOCAL_KEY");
}

TEST_CASE("remote backend requires a base url") {
  RemoteOptions opts;  // no URL, env unset for this id
  CHECK_THROWS_AS(RemoteBackend("no-such-backend-xyz", opts), ConfigError);
}

namespace {

// Local chat-completions stub with a programmable failure prefix.
class StubServer {
 public:
  explicit StubServer(int fail_first = 0, int fail_status = 500)
      : fail_first_(fail_first), fail_status_(fail_status) {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle(req, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
  }

  int requests_seen() const { return requests_.load(); }
  nlohmann::json last_body() {
    std::lock_guard<std::mutex> lock(mu_);
    return last_body_;
  }
  std::string last_auth() {
    std::lock_guard<std::mutex> lock(mu_);
    return last_auth_;
  }
  int max_concurrency() const { return max_concurrent_.load(); }
  void set_delay(std::chrono::milliseconds d) { delay_ = d; }
  void set_reply_body(std::string body) {
    std::lock_guard<std::mutex> lock(mu_);
    reply_body_ = std::move(body);
  }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    const int now = ++concurrent_;
    int snapshot = max_concurrent_.load();
    while (now > snapshot &&
           !max_concurrent_.compare_exchange_weak(snapshot, now)) {
    }
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    const int seen = ++requests_;
    {
      std::lock_guard<std::mutex> lock(mu_);
      last_body_ = nlohmann::json::parse(req.body, nullptr, false);
      auto it = req.headers.find("Authorization");
      last_auth_ = it == req.headers.end() ? "" : it->second;
    }
    if (seen <= fail_first_) {
      res.status = fail_status_;
      res.set_content("overloaded", "text/plain");
    } else {
      std::string body;
      {
        std::lock_guard<std::mutex> lock(mu_);
        body = reply_body_;
      }
      res.set_content(body, "application/json");
    }
    --concurrent_;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int fail_first_;
  int fail_status_;
  std::atomic<int> requests_{0};
  std::atomic<int> concurrent_{0};
  std::atomic<int> max_concurrent_{0};
  std::chrono::milliseconds delay_{0};
  std::mutex mu_;
  nlohmann::json last_body_;
  std::string last_auth_;
  std::string reply_body_ =
      "{\"choices\": [{\"message\": {\"role\": \"assistant\", "
      "\"content\": \"FINAL_ANSWER: B2\"}}]}";
};

RemoteOptions fast_opts(const StubServer& server,
                        std::vector<std::chrono::milliseconds>* sleeps) {
  RemoteOptions opts;
  opts.base_url = server.base_url();
  opts.api_key = "test-key";
  opts.jitter_seed = 17;
  opts.sleep_fn = [sleeps](std::chrono::milliseconds d) {
    if (sleeps) sleeps->push_back(d);
  };
  return opts;
}

}  // namespace

TEST_CASE("remote backend success path and request shape") {
  StubServer server;
  RemoteOptions opts = fast_opts(server, nullptr);
  RemoteBackend rb("stub", opts);

  auto b = binding("model-x", "stub");
  b.params.seed = 77;
  CompletionRequest req;
  req.system_text = "sys";
  req.user_text = "solve it";
  req.max_tokens = 123;
  req.temperature = 0.5;
  req.seed = 77;
  CHECK(rb.complete(b, req, {}) == "FINAL_ANSWER: B2");
  CHECK(server.requests_seen() == 1);
  CHECK(server.last_auth() == "Bearer test-key");

  const nlohmann::json body = server.last_body();
  CHECK(body.at("model") == "model-x");
  CHECK(body.at("max_tokens") == 123);
  CHECK(body.at("temperature") == 0.5);
  CHECK(body.at("seed") == 77);
  CHECK(body.at("messages").size() == 2);
  CHECK(body.at("messages")[0].at("role") == "system");
  CHECK(body.at("messages")[1].at("content") == "solve it");
}

TEST_CASE("remote backend sends image parts for vision requests") {
  StubServer server;
  RemoteBackend rb("stub", fast_opts(server, nullptr));
  auto b = binding("model-x", "stub");
  CompletionRequest req = request("describe");
  req.image_refs = {"data:image/png;base64,AAAA"};
  CHECK(rb.complete(b, req, {}) == "FINAL_ANSWER: B2");
  const nlohmann::json body = server.last_body();
  const auto& content = body.at("messages")[0].at("content");
  CHECK(content.is_array());
  CHECK(content[0].at("type") == "text");
  CHECK(content[1].at("type") == "image_url");

  b.modality = model::Modality::Text;
  CHECK_THROWS_AS(rb.complete(b, req, {}), ConfigError);
}

TEST_CASE("remote backend retries transient faults with backoff") {
  StubServer server(/*fail_first=*/2);
  std::vector<std::chrono::milliseconds> sleeps;
  RemoteBackend rb("stub", fast_opts(server, &sleeps));
  CHECK(rb.complete(binding("m", "stub"), request(), {}) ==
        "FINAL_ANSWER: B2");
  CHECK(server.requests_seen() == 3);
  REQUIRE(sleeps.size() == 2);
  // 1s then 2s, each with +-20% jitter.
  CHECK(sleeps[0].count() >= 800);
  CHECK(sleeps[0].count() <= 1200);
  CHECK(sleeps[1].count() >= 1600);
  CHECK(sleeps[1].count() <= 2400);
}

TEST_CASE("remote backend gives up after the attempt cap") {
  StubServer server(/*fail_first=*/100);
  std::vector<std::chrono::milliseconds> sleeps;
  RemoteBackend rb("stub", fast_opts(server, &sleeps));
  CHECK_THROWS_AS(rb.complete(binding("m", "stub"), request(), {}),
                  BackendFailure);
  CHECK(server.requests_seen() == 3);
  CHECK(sleeps.size() == 2);
}

TEST_CASE("remote backend does not retry non-transient errors") {
  StubServer server(/*fail_first=*/100, /*fail_status=*/404);
  std::vector<std::chrono::milliseconds> sleeps;
  RemoteBackend rb("stub", fast_opts(server, &sleeps));
  CHECK_THROWS_AS(rb.complete(binding("m", "stub"), request(), {}),
                  BackendFailure);
  CHECK(server.requests_seen() == 1);
  CHECK(sleeps.empty());
}

TEST_CASE("remote backend rejects malformed completion bodies") {
  StubServer server;
  server.set_reply_body("{\"unexpected\": true}");
  RemoteBackend rb("stub", fast_opts(server, nullptr));
  CHECK_THROWS_AS(rb.complete(binding("m", "stub"), request(), {}),
                  BackendFailure);
}

TEST_CASE("remote backend caps in-flight requests") {
  StubServer server;
  server.set_delay(std::chrono::milliseconds(50));
  RemoteOptions opts = fast_opts(server, nullptr);
  opts.max_in_flight = 2;
  RemoteBackend rb("stub", opts);

  std::vector<std::thread> threads;
  for (int i = 0; i < 6; ++i) {
    threads.emplace_back(
        [&] { rb.complete(binding("m", "stub"), request(), {}); });
  }
  for (auto& t : threads) t.join();
  CHECK(server.requests_seen() == 6);
  CHECK(server.max_concurrency() <= 2);
}
