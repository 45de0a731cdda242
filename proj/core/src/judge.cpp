#include "wise/backend/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "wise/errors.hpp"

namespace wise::backend {
namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string collapse_ws(const std::string& s) {
  std::string out;
  bool in_ws = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out += ' ';
    in_ws = false;
    out += c;
  }
  return out;
}

// Strips one trailing unit suffix when what precedes it still ends in a
// digit or decimal point ("6.26dm" -> "6.26", "20 %" -> "20") but leaves
// bare words alone ("m" stays "m", "kg" stays "kg").
std::string strip_unit(const std::string& s, const NormalizeOptions& opts) {
  std::vector<std::string> suffixes = opts.unit_suffixes;
  std::stable_sort(suffixes.begin(), suffixes.end(),
                   [](const std::string& a, const std::string& b) {
                     return a.size() > b.size();
                   });
  for (const std::string& suf : suffixes) {
    if (suf.empty() || s.size() <= suf.size()) continue;
    if (s.compare(s.size() - suf.size(), suf.size(), suf) != 0) continue;
    std::string head = trim(s.substr(0, s.size() - suf.size()));
    if (head.empty()) continue;
    const char last = head.back();
    if (std::isdigit(static_cast<unsigned char>(last)) || last == '.') {
      return head;
    }
  }
  return s;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::string normalize_answer(const std::string& s,
                             const NormalizeOptions& opts) {
  std::string out = lower(trim(s));
  out = strip_unit(out, opts);
  return collapse_ws(out);
}

bool judge_equivalent(const std::string& predicted,
                      const std::string& ground_truth,
                      const NormalizeOptions& opts) {
  if (predicted.empty() || ground_truth.empty()) {
    throw EmptyInput("judge_equivalent requires nonempty answers");
  }
  const std::string a = normalize_answer(predicted, opts);
  const std::string b = normalize_answer(ground_truth, opts);
  const auto na = parse_number(a);
  const auto nb = parse_number(b);
  if (na && nb) {
    const double scale = std::max(std::abs(*na), std::abs(*nb));
    if (scale == 0.0) return true;
    return std::abs(*na - *nb) <= opts.numeric_rel_tol * scale;
  }
  return a == b;
}

bool judge_equivalent_model(const std::string& predicted,
                            const std::string& ground_truth,
                            ChatBackend& backend,
                            const model::AgentBinding& binding) {
  if (predicted.empty() || ground_truth.empty()) {
    throw EmptyInput("judge_equivalent requires nonempty answers");
  }
  CompletionRequest req;
  req.system_text =
      "You judge whether a predicted answer matches a ground-truth answer.";
  req.user_text = "Predicted answer: " + predicted +
                  "\nGround-truth answer: " + ground_truth +
                  "\nDo they denote the same answer? Reply with exactly YES "
                  "or NO.";
  req.max_tokens = 8;
  CallContext ctx;
  ctx.role = "judge";
  const std::string reply = backend.complete(binding, req, ctx);

  std::istringstream in(lower(reply));
  std::string tok;
  while (in >> tok) {
    std::string word;
    for (char c : tok) {
      if (std::isalpha(static_cast<unsigned char>(c))) word += c;
    }
    if (word == "yes") return true;
    if (word == "no") return false;
  }
  throw JudgeError("unparseable judge verdict: " + reply);
}

}  // namespace wise::backend
