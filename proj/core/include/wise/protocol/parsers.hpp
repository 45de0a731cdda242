#pragma once

#include <string>

#include "wise/model/types.hpp"

namespace wise::protocol {

// Total: never throws, any failure is ABSTAIN. Grammar, in priority order,
// scanning from the bottom of the text:
//   1. a FINAL_ANSWER: marker line (tolerant of case, "Final Answer:",
//      markdown emphasis);
//   2. a standalone option code in the last three non-empty lines;
//   3. "the answer is <code>" in the last three non-empty lines.
// Free-form problems use only the marker and return the trimmed text after
// it; option answers are mapped through letter or letter-digit forms.
model::AnswerOption parse_final_answer(const std::string& raw,
                                       const model::Problem& p) noexcept;

// Total: value of the last FINAL_SCORE: line when it is 0, 1 or 2;
// missing or malformed lines give -1 (reflector failure).
int parse_final_score(const std::string& raw) noexcept;

}  // namespace wise::protocol
