#include "wise/model/transcript_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wise/errors.hpp"

namespace wise::model {
namespace {

using nlohmann::json;

json response_to_json(const SolverResponse& r) {
  return json{{"round", r.round},
              {"solver", r.solver_index},
              {"raw_text", r.raw_text},
              {"answer", r.parsed_answer.code()},
              {"parse_ok", r.parse_ok}};
}

SolverResponse response_from_json(const json& j) {
  SolverResponse r;
  r.round = j.at("round").get<int>();
  r.solver_index = j.at("solver").get<int>();
  r.raw_text = j.at("raw_text").get<std::string>();
  r.parsed_answer = AnswerOption(j.at("answer").get<std::string>());
  r.parse_ok = j.at("parse_ok").get<bool>();
  return r;
}

json judgment_to_json(const ReflectorJudgment& g) {
  return json{{"round", g.round},
              {"solver", g.solver_index},
              {"reflector", g.reflector_index},
              {"weight", g.weight},
              {"feedback", g.feedback_text}};
}

ReflectorJudgment judgment_from_json(const json& j) {
  ReflectorJudgment g;
  g.round = j.at("round").get<int>();
  g.solver_index = j.at("solver").get<int>();
  g.reflector_index = j.at("reflector").get<int>();
  g.weight = j.at("weight").get<int>();
  g.feedback_text = j.at("feedback").get<std::string>();
  return g;
}

json round_to_json(const DebateRound& r) {
  json responses = json::array();
  for (const auto& x : r.responses) responses.push_back(response_to_json(x));
  json judgments = json::array();
  for (const auto& row : r.judgments) {
    json jrow = json::array();
    for (const auto& g : row) jrow.push_back(judgment_to_json(g));
    judgments.push_back(std::move(jrow));
  }
  return json{{"round", r.round_index},
              {"responses", std::move(responses)},
              {"judgments", std::move(judgments)},
              {"orchestrator_summaries", r.orchestrator_summaries}};
}

DebateRound round_from_json(const json& j) {
  DebateRound r;
  r.round_index = j.at("round").get<int>();
  for (const auto& x : j.at("responses")) {
    r.responses.push_back(response_from_json(x));
  }
  for (const auto& row : j.at("judgments")) {
    std::vector<ReflectorJudgment> grow;
    for (const auto& g : row) grow.push_back(judgment_from_json(g));
    r.judgments.push_back(std::move(grow));
  }
  r.orchestrator_summaries =
      j.at("orchestrator_summaries").get<std::vector<std::string>>();
  return r;
}

}  // namespace

std::string serialize_transcript(const DebateTranscript& t) {
  t.validate();
  json rounds = json::array();
  for (const auto& r : t.rounds) rounds.push_back(round_to_json(r));
  // nlohmann::json keeps object keys sorted, which is what makes the
  // encoding byte-stable across runs.
  json doc{{"schema_version", kTranscriptSchemaVersion},
           {"problem_id", t.problem_id},
           {"roster_fingerprint", t.roster_fingerprint},
           {"option_codes", t.option_codes},
           {"rounds", std::move(rounds)},
           {"termination", to_string(t.termination)},
           {"wall_clock_seconds", t.wall_clock_seconds}};
  return doc.dump(2) + "\n";
}

DebateTranscript deserialize_transcript(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("transcript: ") + e.what(),
                     e.byte > 0 ? static_cast<std::size_t>(e.byte - 1)
                                : ParseError::npos);
  }
  try {
    int version = doc.at("schema_version").get<int>();
    if (version != kTranscriptSchemaVersion) {
      throw ParseError("transcript: unsupported schema_version " +
                       std::to_string(version));
    }
    DebateTranscript t;
    t.problem_id = doc.at("problem_id").get<std::string>();
    t.roster_fingerprint = doc.at("roster_fingerprint").get<std::string>();
    t.option_codes = doc.at("option_codes").get<std::vector<std::string>>();
    for (const auto& r : doc.at("rounds")) t.rounds.push_back(round_from_json(r));
    t.termination =
        termination_from_string(doc.at("termination").get<std::string>());
    t.wall_clock_seconds =
        doc.at("wall_clock_seconds").get<std::vector<double>>();
    t.validate();
    return t;
  } catch (const json::exception& e) {
    throw ParseError(std::string("transcript: ") + e.what());
  }
}

void write_transcript_file(const std::string& path, const DebateTranscript& t) {
  const std::string body = serialize_transcript(t);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp + " for writing");
    out << body;
    if (!out.flush()) throw ConfigError("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("rename " + tmp + " -> " + path + ": " + ec.message());
  }
}

DebateTranscript read_transcript_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_transcript(buf.str());
}

}  // namespace wise::model
