#include "wise/harness/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wise/errors.hpp"

namespace wise::harness {
namespace {

using nlohmann::json;

void check_fraction(double v, const std::string& what) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0 + 1e-12) {
    throw NonFinite("metrics: " + what + " outside [0,1]");
  }
}

}  // namespace

void MetricsReport::validate() const {
  if (problem_count < 0 || scored_count < 0 || scored_count > problem_count) {
    throw DimensionMismatch("metrics: inconsistent problem counts");
  }
  if (scored_count > 0) check_fraction(accuracy, "accuracy");
  for (const auto& [tag, acc] : tag_accuracy) check_fraction(acc, "tag " + tag);
  if (cumulative_accuracy.size() != average_accuracy.size()) {
    throw DimensionMismatch("metrics: round curve lengths differ");
  }
  double prev = 0.0;
  for (std::size_t k = 0; k < cumulative_accuracy.size(); ++k) {
    const std::string at = " at round " + std::to_string(k + 1);
    check_fraction(cumulative_accuracy[k], "cumulative accuracy" + at);
    check_fraction(average_accuracy[k], "average accuracy" + at);
    if (cumulative_accuracy[k] + 1e-12 < prev) {
      throw DimensionMismatch("metrics: cumulative accuracy decreases" + at);
    }
    if (cumulative_accuracy[k] + 1e-12 < average_accuracy[k]) {
      throw DimensionMismatch("metrics: cumulative < average accuracy" + at);
    }
    prev = cumulative_accuracy[k];
  }
  if (mean_rounds < 0.0) throw DimensionMismatch("metrics: negative mean rounds");
  for (const auto& [rounds, items] : rounds_histogram) {
    if (rounds < 1 || items < 0) {
      throw DimensionMismatch("metrics: invalid rounds histogram entry");
    }
  }
  if (backend_calls < 0) throw DimensionMismatch("metrics: negative call count");
}

std::string serialize_metrics(const MetricsReport& m) {
  m.validate();
  json j;
  j["label"] = m.label;
  j["aggregator"] = m.aggregator;
  j["problem_count"] = m.problem_count;
  j["scored_count"] = m.scored_count;
  j["accuracy"] = m.accuracy;
  j["tag_accuracy"] = m.tag_accuracy;
  j["cumulative_accuracy"] = m.cumulative_accuracy;
  j["average_accuracy"] = m.average_accuracy;
  j["mean_rounds"] = m.mean_rounds;
  json hist = json::object();
  for (const auto& [rounds, items] : m.rounds_histogram) {
    hist[std::to_string(rounds)] = items;
  }
  j["rounds_histogram"] = std::move(hist);
  j["termination_counts"] = m.termination_counts;
  j["backend_calls"] = m.backend_calls;
  return j.dump(2) + "\n";
}

MetricsReport deserialize_metrics(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("metrics: ") + e.what(), e.byte);
  }
  MetricsReport m;
  try {
    m.label = j.at("label").get<std::string>();
    m.aggregator = j.at("aggregator").get<std::string>();
    m.problem_count = j.at("problem_count").get<int>();
    m.scored_count = j.at("scored_count").get<int>();
    m.accuracy = j.at("accuracy").get<double>();
    m.tag_accuracy = j.at("tag_accuracy").get<std::map<std::string, double>>();
    m.cumulative_accuracy = j.at("cumulative_accuracy").get<std::vector<double>>();
    m.average_accuracy = j.at("average_accuracy").get<std::vector<double>>();
    m.mean_rounds = j.at("mean_rounds").get<double>();
    for (const auto& [rounds, items] : j.at("rounds_histogram").items()) {
      m.rounds_histogram[std::stoi(rounds)] = items.get<int>();
    }
    m.termination_counts =
        j.at("termination_counts").get<std::map<std::string, int>>();
    m.backend_calls = j.at("backend_calls").get<long long>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("metrics: ") + e.what());
  }
  m.validate();
  return m;
}

void write_metrics_file(const std::string& path, const MetricsReport& m) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write metrics file: " + tmp.string());
    out << serialize_metrics(m);
  }
  fs::rename(tmp, target);
}

MetricsReport read_metrics_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open metrics file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_metrics(buf.str());
}

}  // namespace wise::harness
