#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "support/fixtures.hpp"
#include "wise/backend/judge.hpp"
#include "wise/backend/scripted.hpp"
#include "wise/errors.hpp"
#include "wise/harness/aggregate_cmd.hpp"
#include "wise/harness/config.hpp"
#include "wise/harness/dataset.hpp"
#include "wise/harness/metrics.hpp"
#include "wise/harness/report_cmd.hpp"
#include "wise/harness/run_cmd.hpp"
#include "wise/harness/simulate_cmd.hpp"
#include "wise/model/transcript_io.hpp"

using namespace wise;
using namespace wise::harness;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("wise-harness-" + tag + "-" + std::to_string(counter.fetch_add(1)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

model::Problem mc_problem(const std::string& id,
                          const std::vector<std::string>& codes,
                          const std::string& truth) {
  model::Problem p;
  p.id = id;
  p.question = "question " + id;
  for (const auto& c : codes) p.options.emplace_back(c, "text " + c);
  p.ground_truth = truth;
  return p;
}

model::Problem free_form_problem(const std::string& id,
                                 const std::string& truth) {
  model::Problem p;
  p.id = id;
  p.question = "question " + id;
  p.ground_truth = truth;
  return p;
}

}  // namespace

TEST_CASE("dataset loader handles the documented record shapes") {
  const std::string text =
      "# comment\n"
      "{\"id\": \"s1\", \"question\": \"How many?\", "
      "\"options\": {\"A\": \"6.5\", \"B\": \"7\", \"C\": \"7.25\", "
      "\"D\": \"7.5\", \"E\": \"7.75\"}, \"answer\": \"C\", "
      "\"tags\": {\"grade\": \"5\", \"modality\": \"Image+Text\"}}\n"
      "\n"
      "{\"id\": \"f1\", \"question\": \"Peak share?\", "
      "\"images\": [\"img/f1.png\"], \"answer\": \"20\"}\n";
  const auto problems = parse_dataset(text);
  REQUIRE(problems.size() == 2);

  CHECK(problems[0].id == "s1");
  CHECK(problems[0].option_count() == 5);
  CHECK(problems[0].options[2].first == "C");
  CHECK(problems[0].options[2].second == "7.25");
  CHECK(*problems[0].ground_truth == "C");
  CHECK(problems[0].tags.at("modality") == "Image+Text");
  CHECK_FALSE(problems[0].free_form());

  CHECK(problems[1].free_form());
  CHECK(problems[1].has_images());
  CHECK(problems[1].image_refs == std::vector<std::string>{"img/f1.png"});
}

TEST_CASE("dataset schema errors report line numbers and abort the load") {
  const std::string good =
      "{\"id\": \"a\", \"question\": \"q\", \"options\": {\"A\": \"1\", "
      "\"B\": \"2\"}, \"answer\": \"A\"}";

  SUBCASE("answer outside the option codes") {
    const std::string bad =
        "{\"id\": \"b\", \"question\": \"q\", \"options\": {\"A\": \"1\", "
        "\"B\": \"2\"}, \"answer\": \"Z\"}";
    try {
      parse_dataset(good + "\n" + bad + "\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(parse_dataset("{not json\n"), ParseError);
  }
  SUBCASE("unknown field") {
    CHECK_THROWS_AS(
        parse_dataset("{\"id\": \"a\", \"question\": \"q\", \"extra\": 1}\n"),
        ParseError);
  }
  SUBCASE("every bad line is listed") {
    try {
      parse_dataset("{\n" + good + "\n{\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 1") != std::string::npos);
      CHECK(msg.find("line 3") != std::string::npos);
      CHECK(msg.find("2 invalid record") != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_dataset("fixtures/does-not-exist.jsonl"), ConfigError);
  }
}

TEST_CASE("config file round-trip") {
  const RunConfig cfg = load_config("fixtures/harness.ini");
  cfg.validate();

  CHECK(cfg.dataset_path == "fixtures/harness_dataset.jsonl");
  REQUIRE(cfg.roster.solver_count() == 2);
  CHECK(cfg.roster.solvers[0].name == "alpha");
  CHECK(cfg.roster.solvers[0].backend_id == "scripted");
  CHECK(cfg.roster.solvers[0].modality == model::Modality::VisionText);
  REQUIRE(cfg.roster.reflector_count() == 1);
  CHECK(cfg.roster.reflectors[0].name == "gamma");
  CHECK(cfg.roster.orchestrator.name == "delta");
  CHECK(cfg.roster.orchestrator.modality == model::Modality::Text);
  CHECK(cfg.replay_path == "fixtures/harness_replay.jsonl");
  CHECK(cfg.policy.max_rounds == 8);
  CHECK(cfg.policy.parallelism == 1);
  CHECK(cfg.output_dir == "harness-out");
  CHECK_FALSE(cfg.resume);
  CHECK(cfg.seed == 7);
  CHECK(cfg.aggregation.aggregator == Aggregator::WiseDs);
  CHECK_FALSE(cfg.aggregation.raw_answers);
  CHECK(cfg.fingerprint().find("wise-ds") != std::string::npos);
  CHECK(cfg.fingerprint().find("alpha") != std::string::npos);
}

TEST_CASE("config rejections") {
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[policy]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("path = x\n"), ConfigError);  // no section
  CHECK_THROWS_AS(parse_config("[policy]\nmax_rounds = soon\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[roster]\nsolver = no-backend\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[roster]\nsolver = a @ b c d\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[aggregation]\naggregator = mean\n"),
                  ConfigError);
  CHECK_THROWS_AS(load_config("fixtures/does-not-exist.ini"), ConfigError);

  // Scripted roster without a replay file fails validation.
  RunConfig cfg = parse_config(
      "[dataset]\npath = d.jsonl\n[roster]\nsolver = a @ scripted\n"
      "reflector = b @ scripted\norchestrator = c @ scripted\n");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("aggregator names accept long and CLI short forms") {
  CHECK(aggregator_from_string("majority") == Aggregator::Majority);
  CHECK(aggregator_from_string("weighted-majority") ==
        Aggregator::WeightedMajority);
  CHECK(aggregator_from_string("wmajority") == Aggregator::WeightedMajority);
  CHECK(aggregator_from_string("classic-ds") == Aggregator::ClassicDs);
  CHECK(aggregator_from_string("ds") == Aggregator::ClassicDs);
  CHECK(aggregator_from_string("wise-ds") == Aggregator::WiseDs);
  CHECK(to_string(Aggregator::ClassicDs) == "classic-ds");
  CHECK_THROWS_AS(aggregator_from_string("mean"), ConfigError);
}

TEST_CASE("cmd_run writes one schema-valid transcript per problem") {
  TempDir out("run");
  RunConfig cfg = load_config("fixtures/harness.ini");
  cfg.output_dir = out.path.string();
  const auto problems = load_dataset(cfg.dataset_path);
  auto registry = build_registry(cfg);

  std::ostringstream progress;
  const RunSummary summary = run_batch(cfg, problems, registry, progress);
  CHECK(summary.total == 2);
  CHECK(summary.ran == 2);
  CHECK(summary.skipped == 0);
  CHECK(summary.failures == 0);
  CHECK(summary.exit_code() == 0);
  // 2 solvers + 2 judgments per problem, consensus in round 1.
  CHECK(summary.backend_calls == 8);
  CHECK(progress.str().find("q1") != std::string::npos);

  for (const auto& id : {"q1", "q2"}) {
    const auto t =
        model::read_transcript_file((out.path / (std::string(id) + ".transcript.json")).string());
    t.validate();
    CHECK(t.round_count() == 1);
    CHECK(t.termination == model::Termination::Consensus);
    CHECK(t.option_codes == std::vector<std::string>{"A", "B", "C", "D"});
  }
  CHECK(fs::exists(out.path / "calls.jsonl"));
  CHECK_FALSE(fs::exists(out.path / "failures.json"));

  SUBCASE("resume skips complete transcripts with zero backend calls") {
    cfg.resume = true;
    std::ostringstream again;
    const RunSummary second = run_batch(cfg, problems, registry, again);
    CHECK(second.ran == 0);
    CHECK(second.skipped == 2);
    CHECK(second.backend_calls == 0);
    CHECK(second.exit_code() == 0);
  }

  SUBCASE("aggregating the stored run scores both problems correct") {
    TempDir reports("reports");
    for (const char* name : {"majority", "wmajority", "ds", "wise-ds"}) {
      AggregateOptions opts;
      opts.flags.aggregator = aggregator_from_string(name);
      opts.label = cfg.fingerprint();
      const auto result =
          aggregate_directory(out.path.string(), problems, opts);
      REQUIRE(result.verdicts.size() == 2);
      for (const auto& v : result.verdicts) CHECK(v.correct);
      CHECK(result.metrics.accuracy == 1.0);
      CHECK(result.metrics.scored_count == 2);
      CHECK(result.metrics.rounds_histogram.at(1) == 2);
      CHECK(result.metrics.termination_counts.at("consensus") == 2);
      CHECK(result.metrics.backend_calls == 8);
      CHECK(result.metrics.tag_accuracy.at("modality=Text") == 1.0);

      const fs::path file =
          reports.path / (std::string("aggregate-") + name + ".json");
      write_aggregation_file(file.string(), result);
      if (opts.flags.aggregator == Aggregator::ClassicDs ||
          opts.flags.aggregator == Aggregator::WiseDs) {
        const auto models = read_fitted_models(file.string());
        REQUIRE(models.size() == 1);
        models.front().validate();
      } else {
        CHECK(read_fitted_models(file.string()).empty());
      }
    }
  }
}

TEST_CASE("parallel run completes every debate") {
  TempDir out("parallel");
  RunConfig cfg = load_config("fixtures/harness.ini");
  cfg.output_dir = out.path.string();
  cfg.policy.parallelism = 4;

  std::vector<model::Problem> problems;
  auto sb = std::make_shared<backend::ScriptedBackend>();
  for (int i = 0; i < 10; ++i) {
    problems.push_back(
        mc_problem("p" + std::to_string(i), {"A", "B", "C", "D"}, "B"));
    // Identical replies per slot make any worker interleaving equivalent.
    sb->push({"alpha", "loop.\nFINAL_ANSWER: B", "solver", 1, 0});
    sb->push({"beta", "loop.\nFINAL_ANSWER: B", "solver", 1, 1});
    sb->push({"gamma", "ok.\nFINAL_SCORE: 2", "reflector", 1, 0});
    sb->push({"gamma", "ok.\nFINAL_SCORE: 2", "reflector", 1, 1});
  }
  backend::BackendRegistry registry;
  registry.add("scripted", sb);

  std::ostringstream progress;
  const RunSummary summary = run_batch(cfg, problems, registry, progress);
  CHECK(summary.ran == 10);
  CHECK(summary.failures == 0);
  CHECK(sb->remaining() == 0);
  for (const auto& p : problems) {
    const auto t =
        model::read_transcript_file((out.path / (p.id + ".transcript.json")).string());
    t.validate();
    CHECK(t.termination == model::Termination::Consensus);
  }
}

TEST_CASE("scripted EvoChart run matches the committed golden transcript") {
  TempDir out("golden");
  RunConfig cfg = load_config("fixtures/harness_evochart.ini");
  cfg.output_dir = out.path.string();
  const auto problems = load_dataset(cfg.dataset_path);
  auto registry = build_registry(cfg);

  std::ostringstream progress;
  const RunSummary summary = run_batch(cfg, problems, registry, progress);
  CHECK(summary.ran == 1);
  CHECK(summary.failures == 0);

  auto t = model::read_transcript_file((out.path / "chart-1.transcript.json").string());
  t.wall_clock_seconds.assign(t.wall_clock_seconds.size(), 0.0);
  CHECK(model::serialize_transcript(t) ==
        slurp("fixtures/evochart_golden.json"));
}

TEST_CASE("a failed orchestrator marks the run partially failed") {
  TempDir out("fail");
  RunConfig cfg = load_config("fixtures/harness.ini");
  cfg.output_dir = out.path.string();
  const auto problems = load_dataset(cfg.dataset_path);

  // Round 1 disagrees, so the debate needs the orchestrator; the replay has
  // no records for it and the debate dies with BackendFailure.
  auto sb = std::make_shared<backend::ScriptedBackend>();
  sb->push({"alpha", "FINAL_ANSWER: B", "solver", 1, 0});
  sb->push({"beta", "FINAL_ANSWER: C", "solver", 1, 1});
  sb->push({"gamma", "fine.\nFINAL_SCORE: 2", "reflector", 1, 0});
  sb->push({"gamma", "shaky.\nFINAL_SCORE: 1", "reflector", 1, 1});
  sb->push({"alpha", "FINAL_ANSWER: B", "solver", 1, 0});
  sb->push({"beta", "FINAL_ANSWER: B", "solver", 1, 1});
  sb->push({"gamma", "fine.\nFINAL_SCORE: 2", "reflector", 1, 0});
  sb->push({"gamma", "fine.\nFINAL_SCORE: 2", "reflector", 1, 1});
  backend::BackendRegistry registry;
  registry.add("scripted", sb);

  std::ostringstream progress;
  const RunSummary summary = run_batch(cfg, problems, registry, progress);
  CHECK(summary.ran == 2);
  CHECK(summary.failures == 1);
  CHECK(summary.failed_ids == std::vector<std::string>{"q1"});
  CHECK(summary.exit_code() == 1);
  CHECK(fs::exists(out.path / "failures.json"));
  const auto t = model::read_transcript_file((out.path / "q1.transcript.json").string());
  CHECK(t.termination == model::Termination::BackendFailure);
}

TEST_CASE("weighted majority on the four-round fixture selects D") {
  const auto t = test::smart840_transcript();
  const auto p = mc_problem(t.problem_id, {"A", "B", "C", "D", "E"}, "D");

  AggregateOptions opts;
  opts.flags.aggregator = Aggregator::WeightedMajority;
  const auto result = aggregate_transcripts({t}, {p}, opts);
  REQUIRE(result.verdicts.size() == 1);
  const auto& v = result.verdicts.front();
  CHECK(v.selected == "D");
  CHECK(v.correct);
  CHECK(v.option_weight.at("D") == doctest::Approx(2.00).epsilon(1e-12));
  CHECK(v.option_weight.at("B") == doctest::Approx(1.55).epsilon(1e-12));
  CHECK(v.option_weight.at("A") == doctest::Approx(0.60).epsilon(1e-12));
  CHECK(v.option_weight.at("E") == doctest::Approx(0.40).epsilon(1e-12));
  CHECK(result.metrics.cumulative_accuracy.size() == 4);
  CHECK(result.metrics.accuracy == 1.0);
}

TEST_CASE("majority on the free-form fixture judges 20% equal to 20") {
  const auto t = test::evochart_transcript();
  const auto p = free_form_problem(t.problem_id, "20");

  AggregateOptions opts;
  opts.flags.aggregator = Aggregator::Majority;
  const auto result = aggregate_transcripts({t}, {p}, opts);
  CHECK(result.verdicts.front().selected == "20%");
  CHECK(result.verdicts.front().correct);
  CHECK(result.metrics.accuracy == 1.0);

  SUBCASE("weighted majority clusters the free-form answers") {
    AggregateOptions wopts;
    wopts.flags.aggregator = Aggregator::WeightedMajority;
    const auto wresult = aggregate_transcripts({t}, {p}, wopts);
    const auto& v = wresult.verdicts.front();
    CHECK(v.selected == "20%");
    CHECK(v.correct);
    CHECK(v.option_weight.at("20%") == doctest::Approx(2.8).epsilon(1e-12));
    CHECK(v.option_weight.at("18%") == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("the DS aggregators refuse free-form batches") {
    for (auto a : {Aggregator::ClassicDs, Aggregator::WiseDs}) {
      AggregateOptions dopts;
      dopts.flags.aggregator = a;
      CHECK_THROWS_AS(aggregate_transcripts({t}, {p}, dopts), ConfigError);
    }
  }
}

TEST_CASE("aggregate batch rejections") {
  const auto p = mc_problem("x", {"A", "B"}, "A");
  AggregateOptions opts;
  opts.flags.aggregator = Aggregator::Majority;

  SUBCASE("empty directory") {
    TempDir dir("empty");
    CHECK_THROWS_AS(aggregate_directory(dir.path.string(), {p}, opts),
                    EmptyInput);
  }
  SUBCASE("missing directory") {
    CHECK_THROWS_AS(aggregate_directory("no-such-dir", {p}, opts), ConfigError);
  }
  SUBCASE("mixed rosters abort with a diagnostic") {
    auto a = test::smart840_transcript();
    auto b = test::smart840_transcript();
    b.problem_id = "other";
    b.roster_fingerprint = "S:x|R:y|O:z";
    try {
      aggregate_transcripts({a, b}, {p}, opts);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("mixed rosters") != std::string::npos);
    }
  }
  SUBCASE("transcript without a problem record") {
    const auto t = test::smart840_transcript();
    CHECK_THROWS_AS(aggregate_transcripts({t}, {p}, opts), ConfigError);
  }
  SUBCASE("duplicate transcripts for one problem") {
    const auto t = test::smart840_transcript();
    CHECK_THROWS_AS(aggregate_transcripts({t, t}, {p}, opts), ConfigError);
  }
}

TEST_CASE("metrics reports round-trip and enforce the curve invariants") {
  const auto t = test::smart840_transcript();
  const auto p = mc_problem(t.problem_id, {"A", "B", "C", "D", "E"}, "D");
  AggregateOptions opts;
  opts.flags.aggregator = Aggregator::WeightedMajority;
  opts.label = "round-trip";
  const auto metrics = aggregate_transcripts({t}, {p}, opts).metrics;

  const std::string bytes = serialize_metrics(metrics);
  const MetricsReport back = deserialize_metrics(bytes);
  CHECK(serialize_metrics(back) == bytes);
  CHECK(back.label == "round-trip");
  CHECK(back.aggregator == "weighted-majority");
  CHECK(back.rounds_histogram.at(4) == 1);

  MetricsReport broken = metrics;
  broken.cumulative_accuracy.back() = 0.0;  // below the average curve
  CHECK_THROWS_AS(broken.validate(), DimensionMismatch);
  MetricsReport ragged = metrics;
  ragged.average_accuracy.pop_back();
  CHECK_THROWS_AS(ragged.validate(), DimensionMismatch);

  TempDir dir("metrics");
  const auto file = dir.path / "metrics.json";
  write_metrics_file(file.string(), metrics);
  CHECK(serialize_metrics(read_metrics_file(file.string())) == bytes);
}

TEST_CASE("cumulative accuracy dominates every round and the final answer") {
  // Three problems with different per-round correctness patterns.
  auto mk = [](const std::string& id, const std::vector<std::string>& r1,
               const std::vector<std::string>& r2) {
    model::DebateTranscript t;
    t.problem_id = id;
    t.roster_fingerprint = "S:a,b|R:c|O:d";
    t.option_codes = {"A", "B", "C"};
    t.rounds.push_back(test::make_round(1, r1, {{1}, {1}}, false));
    t.rounds.push_back(test::make_round(2, r2, {{2}, {2}}, true));
    t.termination = model::Termination::MaxRounds;
    return t;
  };
  const std::vector<model::DebateTranscript> ts = {
      mk("m1", {"B", "C"}, {"B", "B"}),   // right from round 1
      mk("m2", {"C", "C"}, {"B", "C"}),   // becomes right in round 2
      mk("m3", {"C", "C"}, {"C", "C"})};  // never right
  const std::vector<model::Problem> ps = {mc_problem("m1", {"A", "B", "C"}, "B"),
                                          mc_problem("m2", {"A", "B", "C"}, "B"),
                                          mc_problem("m3", {"A", "B", "C"}, "B")};
  for (const char* name : {"majority", "wmajority", "ds", "wise-ds"}) {
    AggregateOptions opts;
    opts.flags.aggregator = aggregator_from_string(name);
    const auto result = aggregate_transcripts(ts, ps, opts);
    const auto& m = result.metrics;
    m.validate();
    REQUIRE(m.cumulative_accuracy.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(m.cumulative_accuracy[k] >= m.average_accuracy[k]);
    }
    // Fraction of items with any correct answer by the last round bounds
    // the final accuracy of the aggregator itself.
    CHECK(m.cumulative_accuracy.back() >= m.accuracy);
  }
}

TEST_CASE("scoring parity: option equality agrees with the normalized judge") {
  for (auto style : {model::OptionCodeStyle::Letter,
                     model::OptionCodeStyle::LetterDigit}) {
    std::vector<std::string> codes;
    for (int i = 0; i < 6; ++i) {
      codes.push_back(model::canonical_option_code(i, style));
    }
    for (const auto& a : codes) {
      for (const auto& b : codes) {
        CHECK((a == b) == backend::judge_equivalent(a, b));
      }
    }
  }
}

TEST_CASE("simulate: identity agents score 100% everywhere") {
  SimulateSpec spec;
  spec.items = 60;
  spec.option_count = 4;
  spec.solver_count = 3;
  spec.reflector_count = 2;
  spec.solver_diagonals = {1.0};
  spec.reflector_diagonal = 1.0;
  spec.seed = 3;
  const auto out = simulate(spec);
  for (const auto& [name, acc] : out.accuracy) {
    INFO(name);
    CHECK(acc == 1.0);
  }
  CHECK(out.recovery.at("classic-ds solver") < 0.05);
  CHECK(out.recovery.at("wise-ds solver") < 0.05);
}

TEST_CASE("simulate: heterogeneous solvers keep the ladder ordered") {
  SimulateSpec spec;
  spec.solver_diagonals = {0.8, 0.6, 0.4};
  spec.seed = 5;
  const auto out = simulate(spec);
  CHECK(out.accuracy.at("wise-ds") >= out.accuracy.at("classic-ds"));
  CHECK(out.accuracy.at("classic-ds") >= out.accuracy.at("majority"));
  CHECK(out.table.find("wise-ds") != std::string::npos);
  CHECK(out.table.find("max row L1") != std::string::npos);
}

TEST_CASE("simulate: uniform agents sit near chance") {
  SimulateSpec spec;
  spec.solver_diagonals = {0.2};  // 1/K: every row uniform
  spec.reflector_diagonal = 1.0 / 3.0;
  spec.seed = 11;
  const auto out = simulate(spec);
  for (const auto& [name, acc] : out.accuracy) {
    INFO(name);
    CHECK(acc > 0.2 - 0.11);
    CHECK(acc < 0.2 + 0.11);
  }
}

TEST_CASE("simulate: pooled eight-round emissions recover the generators") {
  SimulateSpec spec;
  spec.rounds = 8;
  spec.solver_diagonals = {0.8, 0.7, 0.6};
  spec.seed = 2;
  const auto out = simulate(spec);
  CHECK(out.recovery.at("classic-ds solver") < 0.15);
  CHECK(out.recovery.at("wise-ds solver") < 0.15);
  CHECK(out.accuracy.at("wise-ds") >= out.accuracy.at("majority"));
  CHECK(out.metrics.cumulative_accuracy.size() == 8);
}

TEST_CASE("simulate is reproducible for a fixed seed") {
  SimulateSpec spec;
  spec.items = 80;
  spec.seed = 21;
  const auto a = simulate(spec);
  const auto b = simulate(spec);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.recovery == b.recovery);
  CHECK(a.table == b.table);
  CHECK(serialize_metrics(a.metrics) == serialize_metrics(b.metrics));
}

TEST_CASE("prior-drawn weights keep every weight class populated") {
  SimulateSpec spec;
  spec.items = 120;
  spec.rounds = 4;
  spec.weight_source = WeightSource::Prior;
  spec.seed = 9;
  const auto batch = make_synthetic_batch(spec);
  // Count distinct raw judgment values: all of {0, 1, 2} must occur.
  std::array<int, 3> seen{0, 0, 0};
  for (const auto& t : batch.transcripts) {
    for (const auto& round : t.rounds) {
      for (const auto& row : round.judgments) {
        for (const auto& g : row) seen[g.weight] += 1;
      }
    }
  }
  CHECK(seen[0] > 0);
  CHECK(seen[1] > 0);
  CHECK(seen[2] > 0);
}

TEST_CASE("report renders text tables and vector graphics") {
  SimulateSpec spec;
  spec.items = 50;
  spec.rounds = 3;
  spec.seed = 4;
  const auto out = simulate(spec);

  aggregate::ConfusionModel model;
  model.class_codes = {"A", "B", "C"};
  model.answer_prior = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  model.weight_prior = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  model.solver_confusion = {aggregate::Matrix::uniform_rows(3, 3)};
  model.reflector_confusion = {aggregate::Matrix::uniform_rows(3, 3)};
  const auto calibration = aggregate::calibration_report(model);

  const auto bundle = render_report({out.metrics}, {calibration});
  CHECK(bundle.text.find("accuracy") != std::string::npos);
  CHECK(bundle.text.find("round") != std::string::npos);
  CHECK(bundle.text.find("solver 0") != std::string::npos);
  CHECK(bundle.accuracy_svg.rfind("<svg", 0) == 0);
  CHECK(bundle.accuracy_svg.find("polyline") != std::string::npos);
  CHECK(bundle.rounds_svg.find("<rect") != std::string::npos);

  SUBCASE("two runs overlay with distinct labels") {
    MetricsReport other = out.metrics;
    other.label = "second-config";
    const auto overlay = render_report({out.metrics, other});
    CHECK(overlay.accuracy_svg.find(out.metrics.label) != std::string::npos);
    CHECK(overlay.accuracy_svg.find("second-config") != std::string::npos);
  }
  SUBCASE("files land under the output directory") {
    TempDir dir("report");
    write_report(dir.path.string(), bundle);
    CHECK(fs::exists(dir.path / "report.txt"));
    CHECK(fs::exists(dir.path / "accuracy.svg"));
    CHECK(fs::exists(dir.path / "rounds.svg"));
    CHECK(slurp(dir.path / "accuracy.svg") == bundle.accuracy_svg);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(render_report({}), EmptyInput);
  }
}

TEST_CASE("build_registry resolves scripted and rejects unconfigured remotes") {
  RunConfig cfg = load_config("fixtures/harness.ini");
  auto registry = build_registry(cfg);
  CHECK(registry.has("scripted"));

  RunConfig remote = cfg;
  for (auto& b : remote.roster.solvers) b.backend_id = "nonexistent-remote";
  remote.replay_path.clear();
  CHECK_THROWS_AS(build_registry(remote), ConfigError);
}
