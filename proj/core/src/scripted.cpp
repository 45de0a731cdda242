#include "wise/backend/scripted.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wise/errors.hpp"

namespace wise::backend {

ScriptedBackend::ScriptedBackend(std::vector<ReplayRecord> records)
    : records_(std::move(records)), consumed_(records_.size(), false) {}

std::vector<ReplayRecord> parse_replay_jsonl(const std::string& text) {
  std::vector<ReplayRecord> records;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = line;
    const auto first = stripped.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (stripped[first] == '#') continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(stripped);
      ReplayRecord r;
      r.agent = j.at("agent").get<std::string>();
      r.reply = j.at("reply").get<std::string>();
      if (j.contains("role")) r.role = j.at("role").get<std::string>();
      if (j.contains("round")) r.round = j.at("round").get<int>();
      if (j.contains("solver")) r.solver = j.at("solver").get<int>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("replay line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return records;
}

std::vector<ReplayRecord> load_replay_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open replay file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_replay_jsonl(buf.str());
}

void ScriptedBackend::push(ReplayRecord record) {
  std::lock_guard<std::mutex> lock(mu_);
  records_.push_back(std::move(record));
  consumed_.push_back(false);
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t n = 0;
  for (bool c : consumed_) {
    if (!c) ++n;
  }
  return n;
}

std::string ScriptedBackend::complete(const model::AgentBinding& binding,
                                      const CompletionRequest& req,
                                      const CallContext& ctx) {
  req.validate();
  std::lock_guard<std::mutex> lock(mu_);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (consumed_[i]) continue;
    const ReplayRecord& r = records_[i];
    if (r.agent != binding.name) continue;
    if (r.role && *r.role != ctx.role) continue;
    if (r.round && *r.round != ctx.round) continue;
    if (r.solver && *r.solver != ctx.solver_index) continue;
    consumed_[i] = true;
    return r.reply;
  }
  std::ostringstream what;
  what << "scripted backend: no reply queued for agent '" << binding.name
       << "'";
  if (!ctx.role.empty()) {
    what << " (role " << ctx.role << ", round " << ctx.round;
    if (ctx.solver_index >= 0) what << ", solver " << ctx.solver_index;
    what << ")";
  }
  throw BackendFailure(what.str());
}

}  // namespace wise::backend
