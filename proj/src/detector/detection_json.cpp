#include "ppe/detector/detection_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ppe/core/errors.hpp"

namespace ppe {
namespace {

nlohmann::ordered_json number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15)
        return static_cast<std::int64_t>(v);
    return v;
}

}  // namespace

nlohmann::ordered_json detection_to_json(const Detection& d) {
    nlohmann::ordered_json j;
    j["x"] = number(d.bbox.x);
    j["y"] = number(d.bbox.y);
    j["w"] = number(d.bbox.w);
    j["h"] = number(d.bbox.h);
    j["confidence"] = d.confidence;
    j["class"] = to_string(d.cls);
    if (d.feature) j["feature"] = *d.feature;
    return j;
}

Detection detection_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("detection must be an object");
    Detection d;
    try {
        d.bbox = {j.at("x").get<double>(), j.at("y").get<double>(), j.at("w").get<double>(),
                  j.at("h").get<double>()};
        d.confidence = j.at("confidence").get<double>();
        d.cls = head_class_from_string(j.at("class").get<std::string>());
        if (auto it = j.find("feature"); it != j.end() && !it->is_null())
            d.feature = it->get<std::vector<float>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("detection: ") + e.what());
    }
    if (d.bbox.w < 0 || d.bbox.h < 0) throw ParseError("detection has negative size");
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) throw ParseError("confidence outside [0,1]");
    return d;
}

nlohmann::ordered_json detections_to_json(const std::vector<Detection>& ds) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& d : ds) arr.push_back(detection_to_json(d));
    return arr;
}

std::optional<std::int64_t> ReplayLog::last_frame() const {
    if (frames.empty()) return std::nullopt;
    return frames.rbegin()->first;
}

ReplayLog parse_replay_log(const std::string& text) {
    ReplayLog log;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(e.what(), lineno);
        }
        ReplayEntry entry;
        std::int64_t frame = 0;
        try {
            frame = j.at("frame").get<std::int64_t>();
            if (auto it = j.find("ts_ms"); it != j.end()) entry.timestamp_ms = it->get<std::int64_t>();
            for (const auto& d : j.at("detections")) entry.detections.push_back(detection_from_json(d));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), lineno);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (!log.frames.emplace(frame, std::move(entry)).second)
            throw DuplicateFrameIndex("frame " + std::to_string(frame) + " appears twice", lineno);
    }
    return log;
}

ReplayLog load_replay_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open replay log " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_replay_log(ss.str());
}

std::string replay_line(std::int64_t frame, const std::vector<Detection>& ds,
                        std::optional<std::int64_t> timestamp_ms) {
    nlohmann::ordered_json j;
    j["frame"] = frame;
    if (timestamp_ms) j["ts_ms"] = *timestamp_ms;
    j["detections"] = detections_to_json(ds);
    return j.dump();
}

}  // namespace ppe
