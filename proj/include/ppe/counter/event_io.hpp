#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ppe/counter/line_counter.hpp"

namespace ppe {

/// Reads the "count" lines of an events JSONL file; other line types are
/// ignored. Throws IoError or ParseError (1-based line).
std::vector<CountEvent> parse_count_events(const std::string& text);
std::vector<CountEvent> load_count_events(const std::filesystem::path& path);

}  // namespace ppe
