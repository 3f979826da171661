#include "ppe/core/json_io.hpp"

#include <fstream>

#include "ppe/core/errors.hpp"

namespace ppe {

void to_json(nlohmann::json& j, const BBox& b) {
    j = nlohmann::json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

void from_json(const nlohmann::json& j, BBox& b) {
    b.x = j.at("x").get<double>();
    b.y = j.at("y").get<double>();
    b.w = j.at("w").get<double>();
    b.h = j.at("h").get<double>();
}

void to_json(nlohmann::json& j, const DirectedLine& l) {
    j = nlohmann::json{{"a", {l.a.x, l.a.y}},
                       {"b", {l.b.x, l.b.y}},
                       {"direction", l.direction == CrossingDirection::AtoLeft ? "AtoLeft" : "AtoRight"}};
}

void from_json(const nlohmann::json& j, DirectedLine& l) {
    auto point = [](const nlohmann::json& p) {
        if (!p.is_array() || p.size() != 2) throw ParseError("line endpoint must be [x, y]");
        return Point{p[0].get<double>(), p[1].get<double>()};
    };
    l.a = point(j.at("a"));
    l.b = point(j.at("b"));
    const auto dir = j.at("direction").get<std::string>();
    if (dir == "AtoLeft")
        l.direction = CrossingDirection::AtoLeft;
    else if (dir == "AtoRight")
        l.direction = CrossingDirection::AtoRight;
    else
        throw ParseError("unknown line direction '" + dir + "'");
}

void to_json(nlohmann::json& j, const ZoneConfig& z) {
    j = nlohmann::json{{"camera_id", z.camera_id},
                       {"detection_area", z.detection_area},
                       {"entry_line", z.entry_line},
                       {"exit_line", z.exit_line}};
    if (z.line_hysteresis_px != 0.0) j["line_hysteresis_px"] = z.line_hysteresis_px;
}

void from_json(const nlohmann::json& j, ZoneConfig& z) {
    z.camera_id = j.at("camera_id").get<std::string>();
    z.detection_area = j.at("detection_area").get<BBox>();
    z.entry_line = j.at("entry_line").get<DirectedLine>();
    z.exit_line = j.at("exit_line").get<DirectedLine>();
    z.line_hysteresis_px = j.value("line_hysteresis_px", 0.0);
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

ZoneConfig load_zone_config(const std::filesystem::path& path) {
    const auto doc = read_json_file(path);
    ZoneConfig z;
    try {
        z = doc.get<ZoneConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    z.validate();
    return z;
}

}  // namespace ppe
