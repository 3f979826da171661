#include "ppe/alerting/alert.hpp"

#include <cmath>

namespace ppe {
namespace {

nlohmann::ordered_json number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    return v;
}

}  // namespace

std::string to_string(AlertKind k) {
    switch (k) {
        case AlertKind::NoHelmet: return "no_helmet";
        case AlertKind::CountIn: return "count_in";
        case AlertKind::CountOut: return "count_out";
    }
    return "unknown";
}

std::string alert_topic(const AlertEvent& e) { return "assist/ppe/" + e.camera_id + "/" + to_string(e.kind); }

nlohmann::ordered_json alert_to_json(const AlertEvent& e) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(e.kind);
    j["camera_id"] = e.camera_id;
    j["ts_ms"] = e.timestamp_ms;
    j["track_id"] = e.track_id;
    nlohmann::ordered_json box;
    box["x"] = number(e.bbox.x);
    box["y"] = number(e.bbox.y);
    box["w"] = number(e.bbox.w);
    box["h"] = number(e.bbox.h);
    j["bbox"] = std::move(box);
    return j;
}

std::string alert_payload(const AlertEvent& e) { return alert_to_json(e).dump(); }

}  // namespace ppe
