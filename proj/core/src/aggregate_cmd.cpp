#include "wise/harness/aggregate_cmd.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wise/aggregate/counts.hpp"
#include "wise/aggregate/decode.hpp"
#include "wise/aggregate/weights.hpp"
#include "wise/errors.hpp"
#include "wise/model/transcript_io.hpp"

namespace wise::harness {
namespace {

using aggregate::RoundBallot;
using model::AnswerOption;
using model::DebateTranscript;
using nlohmann::json;

struct Scorer {
  const model::Problem* problem;
  const backend::NormalizeOptions* norm;

  bool scored() const { return problem->ground_truth.has_value(); }

  bool correct(const std::string& answer) const {
    if (answer.empty() || !scored()) return false;
    if (!problem->free_form()) return answer == *problem->ground_truth;
    return backend::judge_equivalent(answer, *problem->ground_truth, *norm);
  }
};

// Batch consistency: one roster, one option-code vector (possibly empty for
// free-form), unique problem ids.
void check_batch(const std::vector<DebateTranscript>& ts) {
  if (ts.empty()) throw EmptyInput("no transcripts to aggregate");
  std::set<std::string> ids;
  for (const auto& t : ts) {
    t.validate();
    if (t.rounds.empty()) {
      throw EmptyInput("transcript " + t.problem_id + " has no rounds");
    }
    if (!ids.insert(t.problem_id).second) {
      throw ConfigError("duplicate transcript for problem " + t.problem_id);
    }
    if (t.roster_fingerprint != ts.front().roster_fingerprint) {
      throw ConfigError("mixed rosters in one batch: \"" +
                        ts.front().roster_fingerprint + "\" vs \"" +
                        t.roster_fingerprint + "\" (problem " + t.problem_id +
                        ")");
    }
    if (t.option_codes != ts.front().option_codes) {
      throw DimensionMismatch("mixed option sets in one batch (problem " +
                              t.problem_id + ")");
    }
  }
}

const model::Problem& problem_for(const std::vector<model::Problem>& problems,
                                  const std::string& id) {
  for (const auto& p : problems) {
    if (p.id == id) return p;
  }
  throw ConfigError("transcript for unknown problem id: " + id);
}

std::vector<AnswerOption> raw_answers(const model::DebateRound& round) {
  std::vector<AnswerOption> out;
  out.reserve(round.responses.size());
  for (const auto& r : round.responses) out.push_back(r.parsed_answer);
  return out;
}

// Answers the aggregator consumed, one string per solver ("" = abstain);
// the round curves in the metrics report are computed over these.
using UsedAnswers = std::vector<std::vector<std::string>>;  // [round][solver]

UsedAnswers used_from_ballots(const std::vector<RoundBallot>& ballots) {
  UsedAnswers used;
  used.reserve(ballots.size());
  for (const auto& b : ballots) {
    std::vector<std::string> row;
    row.reserve(b.answers.size());
    for (const auto& a : b.answers) row.push_back(a.code());
    used.push_back(std::move(row));
  }
  return used;
}

std::map<std::string, double> weight_map(const aggregate::AggregatedWeights& w) {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < w.option_codes.size(); ++i) {
    out[w.option_codes[i]] = w.option_weight[i];
  }
  return out;
}

struct ItemOutcome {
  ProblemVerdict verdict;
  UsedAnswers used;
};

ItemOutcome majority_item(const DebateTranscript& t, const Scorer& scorer) {
  ItemOutcome out;
  out.verdict.problem_id = t.problem_id;
  const auto& final_round = t.rounds.back();
  const auto answers = raw_answers(final_round);
  try {
    out.verdict.selected = aggregate::majority_vote(answers).code();
  } catch (const NoBallots&) {
    out.verdict.selected.clear();
  }
  int votes = 0;
  std::map<std::string, int> tally;
  for (const auto& a : answers) {
    if (a.is_abstain()) continue;
    ++tally[a.code()];
    ++votes;
  }
  for (const auto& [code, n] : tally) {
    out.verdict.option_weight[code] = static_cast<double>(n) / votes;
  }
  out.verdict.no_support = votes == 0;
  for (const auto& round : t.rounds) {
    std::vector<std::string> row;
    for (const auto& a : raw_answers(round)) row.push_back(a.code());
    out.used.push_back(std::move(row));
  }
  out.verdict.scored = scorer.scored();
  out.verdict.correct = scorer.correct(out.verdict.selected);
  return out;
}

// Candidate set for free-form weighted majority: the distinct answers of
// this debate, clustered by judge_equivalent, first appearance as the
// cluster representative.
std::vector<RoundBallot> clustered_ballots(const DebateTranscript& t,
                                           const backend::NormalizeOptions& norm,
                                           std::vector<std::string>* codes) {
  auto rep_for = [&](const std::string& ans) -> std::string {
    for (const auto& r : *codes) {
      if (backend::judge_equivalent(ans, r, norm)) return r;
    }
    codes->push_back(ans);
    return ans;
  };
  std::vector<RoundBallot> ballots;
  for (const auto& round : t.rounds) {
    RoundBallot b = aggregate::raw_ballot(round);
    for (auto& a : b.answers) {
      if (!a.is_abstain()) a = AnswerOption(rep_for(a.code()));
    }
    ballots.push_back(std::move(b));
  }
  return ballots;
}

ItemOutcome weighted_item(const DebateTranscript& t, const Scorer& scorer,
                          const backend::NormalizeOptions& norm) {
  ItemOutcome out;
  out.verdict.problem_id = t.problem_id;
  std::vector<std::string> codes = t.option_codes;
  std::vector<RoundBallot> ballots;
  if (!codes.empty()) {
    for (const auto& round : t.rounds) {
      ballots.push_back(aggregate::raw_ballot(round));
    }
  } else {
    codes.clear();
    ballots = clustered_ballots(t, norm, &codes);
  }
  out.used = used_from_ballots(ballots);
  if (codes.empty()) {
    // Free-form debate where every solver abstained every round.
    out.verdict.no_support = true;
  } else {
    const auto agg = aggregate::aggregate_rounds(ballots, codes);
    out.verdict.no_support = agg.no_support;
    out.verdict.option_weight = weight_map(agg);
    if (!agg.no_support) out.verdict.selected = agg.selected_code();
  }
  out.verdict.scored = scorer.scored();
  out.verdict.correct = scorer.correct(out.verdict.selected);
  return out;
}

}  // namespace

AggregationResult aggregate_transcripts(
    const std::vector<DebateTranscript>& transcripts,
    const std::vector<model::Problem>& problems, const AggregateOptions& opts) {
  check_batch(transcripts);
  opts.em.validate();

  AggregationResult result;
  result.aggregator = to_string(opts.flags.aggregator);
  result.flags = opts.flags;
  result.pooled = opts.flags.pooled_counts;

  const bool needs_model = opts.flags.aggregator == Aggregator::ClassicDs ||
                           opts.flags.aggregator == Aggregator::WiseDs;
  if (needs_model && transcripts.front().option_codes.empty()) {
    throw ConfigError("the " + result.aggregator +
                      " aggregator needs option codes; free-form transcripts "
                      "only support majority and weighted-majority");
  }

  int max_rounds = 0;
  for (const auto& t : transcripts) {
    max_rounds = std::max(max_rounds, t.round_count());
  }

  // One fit per round, or a single pooled fit reused for every round.
  std::vector<const aggregate::ConfusionModel*> model_for_round;
  if (needs_model) {
    const bool classic = opts.flags.aggregator == Aggregator::ClassicDs;
    const int fits = opts.flags.pooled_counts ? 1 : max_rounds;
    for (int f = 0; f < fits; ++f) {
      const auto selector = opts.flags.pooled_counts
                                ? aggregate::RoundSelector::pooled()
                                : aggregate::RoundSelector::single(f + 1);
      auto counts = aggregate::build_counts(transcripts, selector);
      if (classic) counts = counts.solvers_only();
      result.round_fits.push_back(classic
                                      ? aggregate::classic_ds_em(counts, opts.em)
                                      : aggregate::wise_ds_em(counts, opts.em));
    }
    for (int r = 0; r < max_rounds; ++r) {
      model_for_round.push_back(
          &result.round_fits[opts.flags.pooled_counts ? 0 : r].model);
    }
  }

  std::vector<ItemOutcome> outcomes;
  std::vector<const model::Problem*> matched;
  for (const auto& t : transcripts) {
    const auto& p = problem_for(problems, t.problem_id);
    matched.push_back(&p);
    const Scorer scorer{&p, &opts.normalize};
    if (opts.flags.aggregator == Aggregator::Majority) {
      outcomes.push_back(majority_item(t, scorer));
    } else if (opts.flags.aggregator == Aggregator::WeightedMajority) {
      outcomes.push_back(weighted_item(t, scorer, opts.normalize));
    } else {
      ItemOutcome out;
      out.verdict.problem_id = t.problem_id;
      std::vector<RoundBallot> ballots;
      for (int r = 0; r < t.round_count(); ++r) {
        RoundBallot b =
            aggregate::posterior_decode(t.rounds[r], *model_for_round[r]);
        if (opts.flags.raw_answers) b.answers = raw_answers(t.rounds[r]);
        ballots.push_back(std::move(b));
      }
      out.used = used_from_ballots(ballots);
      const auto agg = aggregate::aggregate_rounds(ballots, t.option_codes);
      out.verdict.no_support = agg.no_support;
      out.verdict.option_weight = weight_map(agg);
      if (!agg.no_support) out.verdict.selected = agg.selected_code();
      out.verdict.scored = scorer.scored();
      out.verdict.correct = scorer.correct(out.verdict.selected);
      outcomes.push_back(std::move(out));
    }
  }

  // Metrics over the same answers the aggregator consumed.
  MetricsReport& m = result.metrics;
  m.label = opts.label;
  m.aggregator = result.aggregator;
  m.problem_count = static_cast<int>(transcripts.size());
  double round_sum = 0.0;
  std::map<std::string, std::pair<int, int>> tag_hits;  // tag -> (correct, total)
  int correct_total = 0;
  std::vector<double> cum(max_rounds, 0.0), avg(max_rounds, 0.0);
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    const auto& t = transcripts[i];
    const auto& out = outcomes[i];
    const Scorer scorer{matched[i], &opts.normalize};
    round_sum += t.round_count();
    ++m.rounds_histogram[t.round_count()];
    ++m.termination_counts[model::to_string(t.termination)];
    for (const auto& round : t.rounds) {
      m.backend_calls += round.solver_count();
      for (const auto& row : round.judgments) {
        m.backend_calls += static_cast<long long>(row.size());
      }
      for (const auto& s : round.orchestrator_summaries) {
        if (!s.empty()) ++m.backend_calls;
      }
    }
    if (!out.verdict.scored) continue;
    ++m.scored_count;
    if (out.verdict.correct) ++correct_total;
    for (const auto& [key, value] : matched[i]->tags) {
      auto& [hit, total] = tag_hits[key + "=" + value];
      ++total;
      if (out.verdict.correct) ++hit;
    }
    bool any_correct = false;
    for (int k = 0; k < max_rounds; ++k) {
      const int r = std::min<int>(k, static_cast<int>(out.used.size()) - 1);
      int correct_here = 0;
      for (const auto& ans : out.used[r]) {
        if (scorer.correct(ans)) ++correct_here;
      }
      if (correct_here > 0) any_correct = true;
      cum[k] += any_correct ? 1.0 : 0.0;
      if (!out.used[r].empty()) {
        avg[k] += static_cast<double>(correct_here) / out.used[r].size();
      }
    }
  }
  if (m.scored_count > 0) {
    m.accuracy = static_cast<double>(correct_total) / m.scored_count;
    for (auto& v : cum) v /= m.scored_count;
    for (auto& v : avg) v /= m.scored_count;
  } else {
    std::fill(cum.begin(), cum.end(), 0.0);
    std::fill(avg.begin(), avg.end(), 0.0);
  }
  m.cumulative_accuracy = std::move(cum);
  m.average_accuracy = std::move(avg);
  m.mean_rounds = round_sum / transcripts.size();
  for (const auto& [tag, counts] : tag_hits) {
    m.tag_accuracy[tag] =
        static_cast<double>(counts.first) / counts.second;
  }
  m.validate();

  for (auto& out : outcomes) result.verdicts.push_back(std::move(out.verdict));
  return result;
}

AggregationResult aggregate_directory(const std::string& transcript_dir,
                                      const std::vector<model::Problem>& problems,
                                      const AggregateOptions& opts) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(transcript_dir)) {
    throw ConfigError("not a transcript directory: " + transcript_dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(transcript_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<DebateTranscript> transcripts;
  for (const auto& f : files) {
    transcripts.push_back(model::read_transcript_file(f.string()));
  }
  if (transcripts.empty()) {
    throw EmptyInput("no transcripts found in " + transcript_dir);
  }
  return aggregate_transcripts(transcripts, problems, opts);
}

namespace {

json matrix_to_json(const aggregate::Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

aggregate::Matrix matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j.at(0).size()) : 0;
  aggregate::Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m.at(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

json model_to_json(const aggregate::EmResult& fit) {
  json j;
  j["class_codes"] = fit.model.class_codes;
  j["answer_prior"] = fit.model.answer_prior;
  j["weight_prior"] = fit.model.weight_prior;
  json solvers = json::array();
  for (const auto& m : fit.model.solver_confusion) solvers.push_back(matrix_to_json(m));
  j["solver_confusion"] = std::move(solvers);
  json reflectors = json::array();
  for (const auto& m : fit.model.reflector_confusion) {
    reflectors.push_back(matrix_to_json(m));
  }
  j["reflector_confusion"] = std::move(reflectors);
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["log_likelihood"] = fit.log_likelihood_trace.empty()
                            ? 0.0
                            : fit.log_likelihood_trace.back();
  return j;
}

}  // namespace

std::string serialize_aggregation(const AggregationResult& r) {
  json j;
  j["aggregator"] = r.aggregator;
  j["raw_answers"] = r.flags.raw_answers;
  j["pooled"] = r.pooled;
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    json jv;
    jv["id"] = v.problem_id;
    jv["selected"] = v.selected;
    jv["no_support"] = v.no_support;
    jv["scored"] = v.scored;
    jv["correct"] = v.correct;
    jv["option_weight"] = v.option_weight;
    verdicts.push_back(std::move(jv));
  }
  j["verdicts"] = std::move(verdicts);
  json fits = json::array();
  for (const auto& fit : r.round_fits) fits.push_back(model_to_json(fit));
  j["fits"] = std::move(fits);
  j["metrics"] = json::parse(serialize_metrics(r.metrics));
  return j.dump(2) + "\n";
}

void write_aggregation_file(const std::string& path, const AggregationResult& r) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write aggregation file: " + tmp.string());
    out << serialize_aggregation(r);
  }
  fs::rename(tmp, target);
}

std::vector<aggregate::ConfusionModel> read_fitted_models(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open aggregation file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("aggregation file: ") + e.what(), e.byte);
  }
  std::vector<aggregate::ConfusionModel> models;
  try {
    for (const auto& fit : j.at("fits")) {
      aggregate::ConfusionModel m;
      m.class_codes = fit.at("class_codes").get<std::vector<std::string>>();
      m.answer_prior = fit.at("answer_prior").get<std::vector<double>>();
      m.weight_prior = fit.at("weight_prior").get<std::vector<double>>();
      for (const auto& mat : fit.at("solver_confusion")) {
        m.solver_confusion.push_back(matrix_from_json(mat));
      }
      for (const auto& mat : fit.at("reflector_confusion")) {
        m.reflector_confusion.push_back(matrix_from_json(mat));
      }
      m.validate();
      models.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("aggregation file: ") + e.what());
  }
  return models;
}

}  // namespace wise::harness
