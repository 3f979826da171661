#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ppe/counter/line_counter.hpp"

namespace ppe {

struct HourlyRow {
    std::int64_t in = 0;
    std::int64_t out = 0;

    friend bool operator==(const HourlyRow&, const HourlyRow&) = default;
};

/// Fourteen one-hour buckets, 05:00 through 18:00. Totals are always derived
/// from the rows, so they cannot drift from the column sums.
struct HourlyTable {
    static constexpr int kFirstHour = 5;
    static constexpr int kBuckets = 14;
    static constexpr std::int64_t kHourMs = 3'600'000;

    std::array<HourlyRow, kBuckets> rows{};

    HourlyRow totals() const noexcept;
    static std::string label(int bucket);  ///< "05:00" ... "18:00"

    friend bool operator==(const HourlyTable&, const HourlyTable&) = default;
};

struct AggregateResult {
    HourlyTable table;
    std::vector<CountEvent> out_of_range;
};

/// Buckets events by floor((t - day_start) / 1h); events outside
/// [day_start, day_end) or beyond the last bucket are returned, not dropped.
AggregateResult hourly_aggregate(std::span<const CountEvent> events, std::int64_t day_start_ms,
                                 std::int64_t day_end_ms);

/// 05:00 local on the local calendar day containing `timestamp_ms`.
std::int64_t local_day_start(std::int64_t timestamp_ms, int utc_offset_minutes = 0);

/// Per-bucket a - b; rows may go negative.
struct TableDiff {
    std::array<HourlyRow, HourlyTable::kBuckets> rows{};
    HourlyRow totals;
};

TableDiff table_diff(const HourlyTable& a, const HourlyTable& b);

/// "hour,in,out" rows plus a final "total" row.
std::string to_csv(const HourlyTable& t);
/// Hours as columns, one row per direction, for side-by-side reading with the published tables.
std::string to_paper_csv(const HourlyTable& t, const std::string& source_label);

/// Parses the "hour,in,out" layout. Throws ParseError on malformed rows,
/// unknown hours or a total row that disagrees with the column sums.
HourlyTable parse_hourly_csv(const std::string& text);
HourlyTable load_hourly_csv(const std::filesystem::path& path);

}  // namespace ppe
