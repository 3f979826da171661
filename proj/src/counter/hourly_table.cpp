#include "ppe/counter/hourly_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ppe/core/errors.hpp"

namespace ppe {
namespace {

constexpr std::int64_t kDayMs = 24 * HourlyTable::kHourMs;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    return out;
}

std::int64_t parse_count(const std::string& s, std::size_t lineno) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("'" + s + "' is not an integer", lineno);
    }
}

}  // namespace

HourlyRow HourlyTable::totals() const noexcept {
    HourlyRow t;
    for (const auto& r : rows) {
        t.in += r.in;
        t.out += r.out;
    }
    return t;
}

std::string HourlyTable::label(int bucket) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:00", kFirstHour + bucket);
    return buf;
}

AggregateResult hourly_aggregate(std::span<const CountEvent> events, std::int64_t day_start_ms,
                                 std::int64_t day_end_ms) {
    AggregateResult res;
    for (const auto& e : events) {
        if (e.timestamp_ms < day_start_ms || e.timestamp_ms >= day_end_ms) {
            res.out_of_range.push_back(e);
            continue;
        }
        const auto bucket = (e.timestamp_ms - day_start_ms) / HourlyTable::kHourMs;
        if (bucket >= HourlyTable::kBuckets) {
            res.out_of_range.push_back(e);
            continue;
        }
        auto& row = res.table.rows[static_cast<std::size_t>(bucket)];
        (e.direction == CountDirection::In ? row.in : row.out) += 1;
    }
    return res;
}

std::int64_t local_day_start(std::int64_t timestamp_ms, int utc_offset_minutes) {
    const std::int64_t offset = std::int64_t{utc_offset_minutes} * 60'000;
    const std::int64_t local_midnight = floor_div(timestamp_ms + offset, kDayMs) * kDayMs;
    return local_midnight + HourlyTable::kFirstHour * HourlyTable::kHourMs - offset;
}

TableDiff table_diff(const HourlyTable& a, const HourlyTable& b) {
    TableDiff d;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        d.rows[i] = {a.rows[i].in - b.rows[i].in, a.rows[i].out - b.rows[i].out};
        d.totals.in += d.rows[i].in;
        d.totals.out += d.rows[i].out;
    }
    return d;
}

std::string to_csv(const HourlyTable& t) {
    std::ostringstream out;
    out << "hour,in,out\n";
    for (int i = 0; i < HourlyTable::kBuckets; ++i)
        out << HourlyTable::label(i) << ',' << t.rows[i].in << ',' << t.rows[i].out << '\n';
    const auto tot = t.totals();
    out << "total," << tot.in << ',' << tot.out << '\n';
    return out.str();
}

std::string to_paper_csv(const HourlyTable& t, const std::string& source_label) {
    std::ostringstream out;
    out << "Hour";
    for (int i = 0; i < HourlyTable::kBuckets; ++i) out << ',' << HourlyTable::label(i);
    out << ",Total\n";
    const auto tot = t.totals();
    out << source_label << " In";
    for (const auto& r : t.rows) out << ',' << r.in;
    out << ',' << tot.in << '\n';
    out << source_label << " Out";
    for (const auto& r : t.rows) out << ',' << r.out;
    out << ',' << tot.out << '\n';
    return out.str();
}

HourlyTable parse_hourly_csv(const std::string& text) {
    HourlyTable t;
    std::array<bool, HourlyTable::kBuckets> seen{};
    std::optional<HourlyRow> total;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line, ',');
        if (!header) {
            if (cells.size() != 3 || cells[0] != "hour" || cells[1] != "in" || cells[2] != "out")
                throw ParseError("expected header 'hour,in,out'", lineno);
            header = true;
            continue;
        }
        if (cells.size() != 3) throw ParseError("expected 3 columns", lineno);
        const HourlyRow row{parse_count(cells[1], lineno), parse_count(cells[2], lineno)};
        if (row.in < 0 || row.out < 0) throw ParseError("negative count", lineno);
        if (cells[0] == "total") {
            total = row;
            continue;
        }
        int bucket = -1;
        for (int i = 0; i < HourlyTable::kBuckets; ++i)
            if (HourlyTable::label(i) == cells[0]) bucket = i;
        if (bucket < 0) throw ParseError("unknown hour '" + cells[0] + "'", lineno);
        if (seen[bucket]) throw ParseError("hour " + cells[0] + " listed twice", lineno);
        seen[bucket] = true;
        t.rows[bucket] = row;
    }
    if (!header) throw ParseError("empty counts file");
    for (int i = 0; i < HourlyTable::kBuckets; ++i)
        if (!seen[i]) throw ParseError("missing hour " + HourlyTable::label(i));
    if (total && !(*total == t.totals())) throw ParseError("total row disagrees with column sums");
    return t;
}

HourlyTable load_hourly_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_hourly_csv(ss.str());
}

}  // namespace ppe
