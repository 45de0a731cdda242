#include "wise/protocol/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace wise::protocol {
namespace {

bool is_md(char c) {
  return c == '*' || c == '`' || c == '_' || c == '#' || c == '>';
}

char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::vector<std::string> split_lines(const std::string& raw) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : raw) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

// Strips whitespace and markdown emphasis from both ends, then trailing
// sentence periods.
std::string strip_decoration(std::string s) {
  auto is_edge = [](char c) {
    return c == ' ' || c == '\t' || is_md(c);
  };
  std::size_t a = 0, b = s.size();
  while (a < b && is_edge(s[a])) ++a;
  while (b > a && is_edge(s[b - 1])) --b;
  s = s.substr(a, b - a);
  while (!s.empty() && s.back() == '.') s.pop_back();
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

// Matches "<decoration>final<sep>answer<spaces>:" (or "score") at the start
// of a line; returns the text after the colon, or nullopt.
bool match_marker(const std::string& line, const std::string& second_word,
                  std::string* value_out) {
  std::size_t i = 0;
  while (i < line.size() &&
         (line[i] == ' ' || line[i] == '\t' || is_md(line[i]))) {
    ++i;
  }
  static const std::string first = "final";
  for (char c : first) {
    if (i >= line.size() || lower(line[i]) != c) return false;
    ++i;
  }
  while (i < line.size() &&
         (line[i] == ' ' || line[i] == '_' || line[i] == '-')) {
    ++i;
  }
  for (char c : second_word) {
    if (i >= line.size() || lower(line[i]) != c) return false;
    ++i;
  }
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                             line[i] == '*' || line[i] == '`')) {
    ++i;
  }
  if (i >= line.size() || line[i] != ':') return false;
  *value_out = line.substr(i + 1);
  return true;
}

// Maps a candidate token to one of the problem's option codes. Accepts the
// exact code ("B2", "B"), a bare letter for letter-digit codes, and a
// letter-digit form for bare-letter codes when the digit is consistent.
int map_token_to_option(std::string token, const model::Problem& p) {
  token = strip_decoration(token);
  while (!token.empty() && (token.back() == ',' || token.back() == ';' ||
                            token.back() == ')' || token.back() == ':')) {
    token.pop_back();
  }
  if (token.empty() || token.size() > 3) return -1;
  std::string upper;
  for (char c : token) {
    upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  if (!std::isalpha(static_cast<unsigned char>(upper[0]))) return -1;
  for (std::size_t i = 1; i < upper.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(upper[i]))) return -1;
  }

  for (int i = 0; i < p.option_count(); ++i) {
    std::string code = p.options[static_cast<std::size_t>(i)].first;
    std::transform(code.begin(), code.end(), code.begin(), [](unsigned char c) {
      return static_cast<char>(std::toupper(c));
    });
    if (code == upper) return i;
    if (upper.size() == 1 && !code.empty() && code[0] == upper[0]) return i;
    if (upper.size() > 1 && code.size() == 1 && code[0] == upper[0]) {
      // "B2" against bare-letter codes: digit must equal position + 1.
      const int digit = std::stoi(upper.substr(1));
      if (digit == i + 1) return i;
      return -1;
    }
  }
  return -1;
}

model::AnswerOption option_at(const model::Problem& p, int index) {
  return model::AnswerOption(p.options[static_cast<std::size_t>(index)].first);
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '(' || c == ':' || c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

model::AnswerOption parse_answer_impl(const std::string& raw,
                                      const model::Problem& p) {
  const std::vector<std::string> lines = split_lines(raw);

  // Rule 1: FINAL_ANSWER marker, bottom-up over the whole text.
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string value;
    if (!match_marker(*it, "answer", &value)) continue;
    value = strip_decoration(value);
    if (value.empty()) return model::AnswerOption::abstain();
    if (p.free_form()) return model::AnswerOption(value);
    // "B2 (12)" or "D4: 6.0" carry the code in the first token.
    const auto toks = tokens_of(value);
    if (toks.empty()) return model::AnswerOption::abstain();
    const int idx = map_token_to_option(toks.front(), p);
    return idx < 0 ? model::AnswerOption::abstain() : option_at(p, idx);
  }
  if (p.free_form()) return model::AnswerOption::abstain();

  std::vector<std::string> tail;  // last three non-empty lines, last first
  for (auto it = lines.rbegin(); it != lines.rend() && tail.size() < 3; ++it) {
    if (!strip_decoration(*it).empty()) tail.push_back(*it);
  }

  // Rule 2: a standalone option code. Letter-digit codes must be the only
  // code-like token on their line; a bare letter must be the whole line.
  for (const std::string& line : tail) {
    const std::string whole = strip_decoration(line);
    if (whole.size() == 1) {
      const int idx = map_token_to_option(whole, p);
      if (idx >= 0) return option_at(p, idx);
    }
    int found = -1;
    bool unique = true;
    for (const std::string& tok : tokens_of(line)) {
      const std::string t = strip_decoration(tok);
      if (t.size() < 2) continue;  // bare letters handled above
      const int idx = map_token_to_option(t, p);
      if (idx < 0) continue;
      if (found >= 0 && idx != found) unique = false;
      found = idx;
    }
    if (found >= 0 && unique) return option_at(p, found);
  }

  // Rule 3: "the answer is <code>".
  for (const std::string& line : tail) {
    std::string low;
    for (char c : line) low += lower(c);
    const auto pos = low.find("answer is");
    if (pos == std::string::npos) continue;
    const auto toks = tokens_of(line.substr(pos + 9));
    if (!toks.empty()) {
      const int idx = map_token_to_option(toks.front(), p);
      if (idx >= 0) return option_at(p, idx);
    }
  }
  return model::AnswerOption::abstain();
}

}  // namespace

model::AnswerOption parse_final_answer(const std::string& raw,
                                       const model::Problem& p) noexcept {
  try {
    return parse_answer_impl(raw, p);
  } catch (...) {
    return model::AnswerOption::abstain();
  }
}

int parse_final_score(const std::string& raw) noexcept {
  try {
    const std::vector<std::string> lines = split_lines(raw);
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
      std::string value;
      if (!match_marker(*it, "score", &value)) continue;
      value = strip_decoration(value);
      if (value == "0" || value == "1" || value == "2") return value[0] - '0';
      return -1;
    }
    return -1;
  } catch (...) {
    return -1;
  }
}

}  // namespace wise::protocol
