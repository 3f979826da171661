#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ppe/alerting/alert.hpp"
#include "ppe/alerting/sinks.hpp"
#include "ppe/counter/hourly_table.hpp"
#include "ppe/counter/line_counter.hpp"
#include "ppe/pipeline/config.hpp"
#include "ppe/pipeline/metrics.hpp"

namespace ppe {

struct RunOptions {
    /// Replaces the sink described by the config when set.
    std::shared_ptr<AlertSink> sink;
    /// Destination of the stdout sink.
    std::ostream* alert_stream = nullptr;
    /// Write the files named in config.outputs.
    bool write_outputs = true;
};

struct PipelineResult {
    HourlyTable table;  ///< helmeted crossings only
    std::int64_t day_start_ms = 0;
    std::vector<CountEvent> crossings;  ///< every crossing, helmeted or not, in stream order
    std::vector<AlertEvent> alerts;     ///< in publish order
    std::string events_jsonl;
    std::string counts_csv;
    PipelineMetrics metrics;
    std::shared_ptr<AlertSink> sink;
};

/// Runs source -> prefilter -> detector -> tracker -> counter -> alerting to
/// exhaustion. Stages run on their own threads joined by bounded queues;
/// the tracker and counter see frames in index order.
///
/// Throws ConfigError, IoError, ParseError or BackendUnavailable (when the
/// failure policy is halt).
PipelineResult run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

/// One line of the events JSONL.
std::string count_event_line(const CountEvent& e);
std::string alert_event_line(const AlertEvent& e);

}  // namespace ppe
