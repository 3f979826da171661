#include "ppe/evaluation/fixture.hpp"

#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <cstdio>

#include <json.hpp>
#include "ppe/core/errors.hpp"

namespace ppe {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::int64_t to_int(const std::string& s, std::size_t lineno) {
    try {
        std::size_t used = 0;
        const auto v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + s + "'", lineno);
    }
}

CountSeries series_of(const std::vector<std::string>& hours, const std::vector<std::int64_t>& values) {
    CountSeries s{hours, values};
    s.validate();
    return s;
}

}  // namespace

DayFixture parse_day_fixture(const std::string& text) {
    DayFixture fx;
    std::map<std::string, std::pair<std::vector<std::int64_t>, std::int64_t>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line.front() == '#') {
            if (fx.title.empty()) {
                const auto b = line.find_first_not_of("# ");
                fx.title = b == std::string::npos ? std::string{} : line.substr(b);
            }
            continue;
        }
        const auto cells = split_csv(line);
        if (!have_header) {
            if (cells.size() < 3 || cells.front() != "Hour" || cells.back() != "Total")
                throw ParseError("fixture header must be 'Hour,<hours...>,Total'", lineno);
            fx.hours.assign(cells.begin() + 1, cells.end() - 1);
            have_header = true;
            continue;
        }
        if (cells.size() != fx.hours.size() + 2)
            throw ParseError("row '" + cells.front() + "' has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(fx.hours.size() + 2),
                             lineno);
        std::vector<std::int64_t> values;
        for (std::size_t i = 1; i + 1 < cells.size(); ++i) values.push_back(to_int(cells[i], lineno));
        const auto total = to_int(cells.back(), lineno);
        if (std::accumulate(values.begin(), values.end(), std::int64_t{0}) != total)
            throw ParseError("row '" + cells.front() + "' total does not match its hours", lineno);
        if (!rows.emplace(cells.front(), std::pair{values, total}).second)
            throw ParseError("duplicate row '" + cells.front() + "'", lineno);
    }
    if (!have_header) throw ParseError("fixture has no header row");

    auto need = [&](const std::string& name) -> const std::vector<std::int64_t>& {
        const auto it = rows.find(name);
        if (it == rows.end()) throw ParseError("fixture is missing row '" + name + "'");
        return it->second.first;
    };
    fx.camera_in = series_of(fx.hours, need("Dahua In"));
    fx.camera_out = series_of(fx.hours, need("Dahua Out"));
    fx.model_in = series_of(fx.hours, need("AI&ML In"));
    fx.model_out = series_of(fx.hours, need("AI&ML Out"));
    if (auto it = rows.find("Diff. In"); it != rows.end()) {
        fx.diff_in = it->second.first;
        fx.diff_in_total = it->second.second;
    }
    if (auto it = rows.find("Diff. Out"); it != rows.end()) {
        fx.diff_out = it->second.first;
        fx.diff_out_total = it->second.second;
    }
    return fx;
}

DayFixture load_day_fixture(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open fixture " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_day_fixture(ss.str());
}

DayReport report(const DayFixture& fx) {
    return {compare(fx.model_in, fx.camera_in), compare(fx.model_out, fx.camera_out)};
}

CountSeries in_series(const HourlyTable& t) {
    CountSeries s;
    for (int i = 0; i < HourlyTable::kBuckets; ++i) {
        s.labels.push_back(HourlyTable::label(i));
        s.values.push_back(t.rows[static_cast<std::size_t>(i)].in);
    }
    return s;
}

CountSeries out_series(const HourlyTable& t) {
    CountSeries s;
    for (int i = 0; i < HourlyTable::kBuckets; ++i) {
        s.labels.push_back(HourlyTable::label(i));
        s.values.push_back(t.rows[static_cast<std::size_t>(i)].out);
    }
    return s;
}

DayReport report(const HourlyTable& model, const HourlyTable& camera) {
    return {compare(in_series(model), in_series(camera)), compare(out_series(model), out_series(camera))};
}

namespace {

HourlyTable table_of(const CountSeries& in, const CountSeries& out) {
    if (in.size() != HourlyTable::kBuckets || out.size() != HourlyTable::kBuckets)
        throw LengthMismatch("fixture does not have " + std::to_string(HourlyTable::kBuckets) + " hourly buckets");
    HourlyTable t;
    for (std::size_t i = 0; i < t.rows.size(); ++i) t.rows[i] = {in.values[i], out.values[i]};
    return t;
}

}  // namespace

InOutSeries parse_counts_series(const std::string& text) {
    InOutSeries s;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
        const auto cells = split_csv(line);
        if (!header) {
            if (cells.size() != 3 || cells[0] != "hour" || cells[1] != "in" || cells[2] != "out")
                throw ParseError("expected header 'hour,in,out'", lineno);
            header = true;
            continue;
        }
        if (cells.size() != 3) throw ParseError("expected 3 columns", lineno);
        if (cells[0] == "total") continue;
        const auto vin = to_int(cells[1], lineno);
        const auto vout = to_int(cells[2], lineno);
        if (vin < 0 || vout < 0) throw ParseError("negative count", lineno);
        s.in.labels.push_back(cells[0]);
        s.in.values.push_back(vin);
        s.out.labels.push_back(cells[0]);
        s.out.values.push_back(vout);
    }
    if (!header) throw ParseError("empty counts file");
    return s;
}

InOutSeries load_counts_series(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open counts file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_counts_series(ss.str());
}

DayReport report(const InOutSeries& model, const InOutSeries& camera) {
    if (model.in.labels != camera.in.labels)
        throw LengthMismatch("counts files do not share the same hourly buckets");
    return {compare(model.in, camera.in), compare(model.out, camera.out)};
}

HourlyTable model_table(const DayFixture& fx) { return table_of(fx.model_in, fx.model_out); }
HourlyTable camera_table(const DayFixture& fx) { return table_of(fx.camera_in, fx.camera_out); }

namespace {

nlohmann::ordered_json stats_json(const StatsReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["mean_diff"] = r.mean_diff;
    j["sample_std"] = r.sample_std;
    j["pearson_r"] = r.pearson_r ? nlohmann::ordered_json(*r.pearson_r) : nlohmann::ordered_json(nullptr);
    j["p_value"] = r.p_value ? nlohmann::ordered_json(*r.p_value) : nlohmann::ordered_json(nullptr);
    j["degenerate"] = r.degenerate();
    return j;
}

std::string stats_line(const char* name, const StatsReport& r) {
    char buf[256];
    if (r.degenerate()) {
        std::snprintf(buf, sizeof buf, "%-4s n=%zu mean_diff=%.4f sample_std=%.4f r=undefined p=undefined", name, r.n,
                      r.mean_diff, r.sample_std);
    } else {
        std::snprintf(buf, sizeof buf, "%-4s n=%zu mean_diff=%.4f sample_std=%.4f r=%.4f p=%.3g", name, r.n,
                      r.mean_diff, r.sample_std, *r.pearson_r, r.p_value.value_or(1.0));
    }
    return buf;
}

}  // namespace

std::string report_json(const DayReport& r) {
    nlohmann::ordered_json j;
    j["in"] = stats_json(r.in);
    j["out"] = stats_json(r.out);
    return j.dump(2);
}

std::string format_report(const DayReport& r) {
    return stats_line("In", r.in) + "\n" + stats_line("Out", r.out) + "\n";
}

}  // namespace ppe
