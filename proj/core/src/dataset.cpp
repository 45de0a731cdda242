#include "wise/harness/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wise/errors.hpp"

namespace wise::harness {
namespace {

// ordered_json keeps the options map in file order, which fixes the option
// indices used everywhere downstream.
using ojson = nlohmann::ordered_json;

model::Problem record_to_problem(const ojson& j) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "id" && key != "question" && key != "images" &&
        key != "options" && key != "answer" && key != "tags") {
      throw ParseError("unknown field \"" + key + "\"");
    }
  }
  model::Problem p;
  p.id = j.at("id").get<std::string>();
  p.question = j.at("question").get<std::string>();
  if (j.contains("images")) {
    for (const auto& img : j.at("images")) {
      p.image_refs.push_back(img.get<std::string>());
    }
  }
  if (j.contains("options")) {
    const auto& opts = j.at("options");
    if (!opts.is_object()) throw ParseError("options must be a code->text map");
    for (const auto& [code, text] : opts.items()) {
      p.options.emplace_back(code, text.get<std::string>());
    }
  }
  if (j.contains("answer")) p.ground_truth = j.at("answer").get<std::string>();
  if (j.contains("tags")) {
    for (const auto& [key, value] : j.at("tags").items()) {
      p.tags[key] = value.get<std::string>();
    }
  }
  p.validate();
  return p;
}

}  // namespace

std::vector<model::Problem> parse_dataset(const std::string& text) {
  std::vector<model::Problem> problems;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    try {
      problems.push_back(record_to_problem(ojson::parse(line)));
    } catch (const std::exception& e) {
      errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "dataset has " + std::to_string(errors.size()) +
                      " invalid record(s):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ParseError(msg);
  }
  return problems;
}

std::vector<model::Problem> load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

}  // namespace wise::harness
