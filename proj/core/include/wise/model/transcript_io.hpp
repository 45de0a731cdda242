#pragma once

#include <string>

#include "wise/model/types.hpp"

namespace wise::model {

// Bumped on any incompatible change to the transcript layout.
inline constexpr int kTranscriptSchemaVersion = 1;

// Deterministic JSON encoding: same transcript, same bytes. Keys are emitted
// in sorted order and no floating point formatting depends on locale.
std::string serialize_transcript(const DebateTranscript& t);

// Strict inverse of serialize_transcript. Rejects unknown schema versions and
// malformed documents with ParseError; the result is validate()d.
DebateTranscript deserialize_transcript(const std::string& json_text);

// File helpers. Writing goes through a temp file and atomic rename so a
// crashed run never leaves a half-written transcript behind.
void write_transcript_file(const std::string& path, const DebateTranscript& t);
DebateTranscript read_transcript_file(const std::string& path);

}  // namespace wise::model
