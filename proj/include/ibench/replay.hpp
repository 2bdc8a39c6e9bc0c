#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ibench/episode.hpp"
#include "ibench/trust.hpp"

namespace ibench {

// Human-readable renderings of persisted records: numbered player/judge
// turns for proof transcripts, street blocks for poker hands, compressed
// action strings for trust matches.
std::string render_transcript(const Transcript& transcript);
std::string render_match(const MatchRecord& record);
std::string render_hand(const nlohmann::json& hand_record);

// Sniffs the record type per line and renders each. Read-only. Throws
// ConfigError with the line number on parse errors and on schema_version
// mismatches.
std::string render_file(const std::filesystem::path& path);

}  // namespace ibench
