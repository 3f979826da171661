#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ppe/counter/hourly_table.hpp"
#include "ppe/evaluation/stats.hpp"

namespace ppe {

/// One published day: camera and model counts per hour, plus the difference
/// rows as printed (camera minus model).
struct DayFixture {
    std::string title;
    std::vector<std::string> hours;
    CountSeries camera_in, camera_out;
    CountSeries model_in, model_out;
    std::vector<std::int64_t> diff_in, diff_out;  ///< empty when absent
    std::int64_t diff_in_total = 0, diff_out_total = 0;
};

/// Parses the wide layout: a "Hour,<labels...>,Total" header followed by rows
/// "Dahua In", "Dahua Out", "AI&ML In", "AI&ML Out" and optionally
/// "Diff. In", "Diff. Out". Lines starting with '#' are comments; the first
/// comment becomes the title. Each row's Total must equal its sum.
DayFixture parse_day_fixture(const std::string& text);
DayFixture load_day_fixture(const std::filesystem::path& path);

struct DayReport {
    StatsReport in;
    StatsReport out;
};

DayReport report(const DayFixture& fx);

/// Compares two hourly tables: `model` as a, `camera` as b.
DayReport report(const HourlyTable& model, const HourlyTable& camera);

CountSeries in_series(const HourlyTable& t);
CountSeries out_series(const HourlyTable& t);
HourlyTable model_table(const DayFixture& fx);
HourlyTable camera_table(const DayFixture& fx);

/// In and Out series read from an "hour,in,out" counts file. Unlike
/// parse_hourly_csv the bucket labels are free-form, so files covering other
/// periods can still be compared.
struct InOutSeries {
    CountSeries in;
    CountSeries out;
};

InOutSeries parse_counts_series(const std::string& text);
InOutSeries load_counts_series(const std::filesystem::path& path);

/// Throws LengthMismatch unless both files have the same bucket labels.
DayReport report(const InOutSeries& model, const InOutSeries& camera);

/// {"in": {...}, "out": {...}} with null r and p for degenerate comparisons.
std::string report_json(const DayReport& r);
/// Human-readable two-line summary.
std::string format_report(const DayReport& r);

}  // namespace ppe
