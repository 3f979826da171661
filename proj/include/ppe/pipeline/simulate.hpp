#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "ppe/detector/scenario.hpp"

namespace ppe {

struct SimulateOptions {
    bool write_frames = false;            ///< PGM frames plus frames.jsonl manifest
    std::optional<std::uint64_t> seed;    ///< replaces the scenario's seed
};

struct SimulateSummary {
    std::int64_t frames = 0;
    std::size_t detections = 0;
    std::size_t crossings = 0;
};

/// Writes detections.jsonl (replay format, one line per frame),
/// ground_truth.json and optionally frames/ into `out_dir`.
/// Throws ParseError, ConfigError or IoError.
SimulateSummary simulate(const std::filesystem::path& scenario_path, const std::filesystem::path& zones_path,
                         const std::filesystem::path& out_dir, const SimulateOptions& options = {});

}  // namespace ppe
