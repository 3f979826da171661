#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ppe/core/types.hpp"

namespace ppe {

enum class AlertKind { NoHelmet, CountIn, CountOut };

/// "no_helmet" | "count_in" | "count_out"
std::string to_string(AlertKind k);

struct AlertEvent {
    AlertKind kind = AlertKind::NoHelmet;
    std::string camera_id;
    std::int64_t timestamp_ms = 0;
    std::int64_t track_id = 0;
    BBox bbox;  ///< last observed box of the track

    friend bool operator==(const AlertEvent&, const AlertEvent&) = default;
};

/// "assist/ppe/{camera_id}/{kind}"
std::string alert_topic(const AlertEvent& e);

/// {"kind","camera_id","ts_ms","track_id","bbox":{"x","y","w","h"}}.
/// Consumers deduplicate QoS-1 redeliveries on (camera_id, track_id, kind, ts_ms).
nlohmann::ordered_json alert_to_json(const AlertEvent& e);
std::string alert_payload(const AlertEvent& e);

}  // namespace ppe
