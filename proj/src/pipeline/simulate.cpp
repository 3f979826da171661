#include "ppe/pipeline/simulate.hpp"

#include <cstdio>
#include <fstream>

#include "ppe/core/errors.hpp"
#include "ppe/core/json_io.hpp"
#include "ppe/detector/detection_json.hpp"
#include "ppe/pipeline/frame_source.hpp"

namespace ppe {

SimulateSummary simulate(const std::filesystem::path& scenario_path, const std::filesystem::path& zones_path,
                         const std::filesystem::path& out_dir, const SimulateOptions& options) {
    auto cfg = load_scenario_config(scenario_path);
    if (options.seed) cfg.seed = *options.seed;
    cfg.validate();
    const auto zones = load_zone_config(zones_path);
    const Scenario scenario(cfg, zones);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    if (options.write_frames) std::filesystem::create_directories(out_dir / "frames", ec);
    if (ec) throw IoError("cannot create frame directory: " + ec.message());

    std::ofstream dets(out_dir / "detections.jsonl");
    if (!dets) throw IoError("cannot write " + (out_dir / "detections.jsonl").string());
    std::ofstream manifest;
    if (options.write_frames) {
        manifest.open(out_dir / "frames.jsonl");
        if (!manifest) throw IoError("cannot write frame manifest");
    }

    SimulateSummary summary;
    for (std::int64_t f = 0; f < cfg.duration_frames; ++f) {
        const auto ds = scenario.detections_at(f);
        summary.detections += ds.size();
        dets << replay_line(f, ds, scenario.timestamp_of(f)) << '\n';
        if (options.write_frames) {
            char name[32];
            std::snprintf(name, sizeof name, "%06lld.pgm", static_cast<long long>(f));
            write_pgm(out_dir / "frames" / name, scenario.render(f));
            nlohmann::ordered_json line;
            line["frame"] = f;
            line["ts_ms"] = scenario.timestamp_of(f);
            line["file"] = std::string("frames/") + name;
            manifest << line.dump() << '\n';
        }
    }
    summary.frames = cfg.duration_frames;

    const auto truth = scenario.ground_truth();
    summary.crossings = truth.crossings.size();
    std::ofstream gt(out_dir / "ground_truth.json");
    if (!gt) throw IoError("cannot write ground truth");
    gt << ground_truth_to_json(truth).dump(2) << '\n';
    if (!dets || !gt) throw IoError("write failed in " + out_dir.string());
    return summary;
}

}  // namespace ppe
