#include "ppe/counter/event_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ppe/core/errors.hpp"

namespace ppe {

std::vector<CountEvent> parse_count_events(const std::string& text) {
    std::vector<CountEvent> events;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            if (j.value("type", std::string("count")) != "count") continue;
            CountEvent e;
            const auto dir = j.at("direction").get<std::string>();
            if (dir == "in") e.direction = CountDirection::In;
            else if (dir == "out") e.direction = CountDirection::Out;
            else throw ParseError("unknown direction '" + dir + "'", lineno);
            e.timestamp_ms = j.at("ts_ms").get<std::int64_t>();
            e.track_id = j.at("track_id").get<std::int64_t>();
            e.helmeted = j.value("helmeted", true);
            e.frame = j.value("frame", std::int64_t{0});
            events.push_back(e);
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(ex.what(), lineno);
        }
    }
    return events;
}

std::vector<CountEvent> load_count_events(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_count_events(ss.str());
}

}  // namespace ppe
