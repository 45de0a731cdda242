#include "wise/harness/config.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "wise/errors.hpp"

namespace wise::harness {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on")
    return true;
  if (value == "false" || value == "0" || value == "no" || value == "off")
    return false;
  throw ConfigError("config key " + key + ": not a boolean: " + value);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not an integer: " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not an unsigned integer: " + value);
  }
}

// "name @ backend_id [text|vision]"
model::AgentBinding parse_binding(const std::string& role,
                                  const std::string& value) {
  const auto at = value.find('@');
  if (at == std::string::npos) {
    throw ConfigError("roster " + role + " entry needs \"name @ backend\": " +
                      value);
  }
  model::AgentBinding b;
  b.name = trim(value.substr(0, at));
  auto rest = split_ws(trim(value.substr(at + 1)));
  if (b.name.empty() || rest.empty()) {
    throw ConfigError("roster " + role + " entry needs \"name @ backend\": " +
                      value);
  }
  b.backend_id = rest[0];
  if (rest.size() > 1) {
    const std::string& mod = rest[1];
    if (mod == "text") {
      b.modality = model::Modality::Text;
    } else if (mod == "vision") {
      b.modality = model::Modality::VisionText;
    } else {
      throw ConfigError("roster " + role + ": unknown modality token " + mod);
    }
  }
  if (rest.size() > 2) {
    throw ConfigError("roster " + role + ": trailing tokens in " + value);
  }
  return b;
}

std::string read_text_file(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + what + " file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Aggregator aggregator_from_string(const std::string& s) {
  if (s == "majority") return Aggregator::Majority;
  if (s == "weighted-majority" || s == "wmajority")
    return Aggregator::WeightedMajority;
  if (s == "classic-ds" || s == "ds") return Aggregator::ClassicDs;
  if (s == "wise-ds") return Aggregator::WiseDs;
  throw ConfigError("unknown aggregator: " + s);
}

std::string to_string(Aggregator a) {
  switch (a) {
    case Aggregator::Majority: return "majority";
    case Aggregator::WeightedMajority: return "weighted-majority";
    case Aggregator::ClassicDs: return "classic-ds";
    case Aggregator::WiseDs: return "wise-ds";
  }
  throw InvalidLabel("unknown aggregator");
}

void RunConfig::validate() const {
  if (dataset_path.empty()) throw ConfigError("config: dataset path not set");
  if (output_dir.empty()) throw ConfigError("config: output directory not set");
  roster.validate();
  policy.validate();
  prompts.validate();
  bool needs_replay = false;
  auto check = [&](const model::AgentBinding& b) {
    if (b.backend_id == "scripted") needs_replay = true;
  };
  for (const auto& b : roster.solvers) check(b);
  for (const auto& b : roster.reflectors) check(b);
  check(roster.orchestrator);
  if (needs_replay && replay_path.empty()) {
    throw ConfigError("config: roster uses the scripted backend but [roster] "
                      "replay is not set");
  }
}

std::string RunConfig::fingerprint() const {
  return roster.fingerprint() + "#" + to_string(aggregation.aggregator);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool have_orchestrator = false;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of(";#");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = "config line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "dataset" && section != "roster" && section != "policy" &&
          section != "prompts" && section != "aggregation") {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    if (key.empty()) throw ConfigError(where + ": empty key");

    if (section == "dataset") {
      if (key == "path") cfg.dataset_path = value;
      else throw ConfigError(where + ": unknown [dataset] key " + key);
    } else if (section == "roster") {
      if (key == "solver") {
        cfg.roster.solvers.push_back(parse_binding("solver", value));
      } else if (key == "reflector") {
        cfg.roster.reflectors.push_back(parse_binding("reflector", value));
      } else if (key == "orchestrator") {
        if (have_orchestrator)
          throw ConfigError(where + ": duplicate orchestrator");
        cfg.roster.orchestrator = parse_binding("orchestrator", value);
        have_orchestrator = true;
      } else if (key == "replay") {
        cfg.replay_path = value;
      } else {
        throw ConfigError(where + ": unknown [roster] key " + key);
      }
    } else if (section == "policy") {
      if (key == "max_rounds") cfg.policy.max_rounds = parse_int(key, value);
      else if (key == "parallelism") cfg.policy.parallelism = parse_int(key, value);
      else if (key == "consensus_stop") cfg.policy.consensus_stop = parse_bool(key, value);
      else if (key == "out") cfg.output_dir = value;
      else if (key == "resume") cfg.resume = parse_bool(key, value);
      else if (key == "seed") cfg.seed = parse_u64(key, value);
      else throw ConfigError(where + ": unknown [policy] key " + key);
    } else if (section == "prompts") {
      if (key == "solver_round1")
        cfg.prompts.solver_round1 = read_text_file(value, "prompt");
      else if (key == "solver_followup")
        cfg.prompts.solver_followup = read_text_file(value, "prompt");
      else if (key == "reflector")
        cfg.prompts.reflector = read_text_file(value, "prompt");
      else if (key == "orchestrator")
        cfg.prompts.orchestrator = read_text_file(value, "prompt");
      else throw ConfigError(where + ": unknown [prompts] key " + key);
    } else {  // aggregation
      if (key == "aggregator")
        cfg.aggregation.aggregator = aggregator_from_string(value);
      else if (key == "raw_answers")
        cfg.aggregation.raw_answers = parse_bool(key, value);
      else if (key == "pooled_counts")
        cfg.aggregation.pooled_counts = parse_bool(key, value);
      else throw ConfigError(where + ": unknown [aggregation] key " + key);
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path, "config"));
}

}  // namespace wise::harness
