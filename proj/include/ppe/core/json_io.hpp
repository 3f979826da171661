#pragma once

#include <filesystem>

#include <json.hpp>

#include "ppe/core/types.hpp"

namespace ppe {

void to_json(nlohmann::json& j, const BBox& b);
void from_json(const nlohmann::json& j, BBox& b);
void to_json(nlohmann::json& j, const DirectedLine& l);
void from_json(const nlohmann::json& j, DirectedLine& l);
void to_json(nlohmann::json& j, const ZoneConfig& z);
void from_json(const nlohmann::json& j, ZoneConfig& z);

/// Reads and validates a ZoneConfig document. Throws IoError / ParseError / ConfigError.
ZoneConfig load_zone_config(const std::filesystem::path& path);

/// Reads a whole JSON document from disk.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace ppe
