#include "ppe/pipeline/frame_source.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ppe/core/errors.hpp"

namespace ppe {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

}  // namespace

Frame read_pgm(const std::filesystem::path& path, std::int64_t index, std::int64_t timestamp_ms) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open frame " + path.string());
    if (pgm_token(in) != "P5") throw ParseError(path.string() + ": not a binary PGM (P5)");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(pgm_token(in));
        h = std::stoi(pgm_token(in));
        maxval = std::stoi(pgm_token(in));
    } catch (const std::exception&) {
        throw ParseError(path.string() + ": malformed PGM header");
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw ParseError(path.string() + ": unsupported PGM geometry or depth");
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (in.gcount() != static_cast<std::streamsize>(px.size())) throw ParseError(path.string() + ": truncated PGM data");
    if (maxval != 255)
        for (auto& p : px) p = static_cast<std::uint8_t>(std::lround(p * 255.0 / maxval));
    return Frame(index, timestamp_ms, w, h, std::move(px));
}

void write_pgm(const std::filesystem::path& path, const Frame& frame) {
    if (!frame.has_pixels()) throw DimensionMismatch("cannot write a headless frame");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    const auto px = frame.pixels();
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

ScenarioSource::ScenarioSource(std::shared_ptr<const Scenario> scenario, bool render)
    : scenario_(std::move(scenario)), render_(render) {}

std::optional<Frame> ScenarioSource::next() {
    const auto& cfg = scenario_->config();
    if (next_ >= cfg.duration_frames) return std::nullopt;
    const auto f = next_++;
    if (render_) return scenario_->render(f);
    return Frame::headless(f, scenario_->timestamp_of(f), cfg.width, cfg.height);
}

std::vector<ManifestEntry> load_frame_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open frame manifest " + path.string());
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ManifestEntry e;
        try {
            const auto j = nlohmann::json::parse(line);
            e.frame = j.at("frame").get<std::int64_t>();
            e.timestamp_ms = j.at("ts_ms").get<std::int64_t>();
            e.file = j.at("file").get<std::string>();
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(std::string("frame manifest: ") + ex.what(), lineno);
        }
        if (e.file.is_relative()) e.file = path.parent_path() / e.file;
        if (!entries.empty() && e.frame <= entries.back().frame)
            throw ParseError("frame manifest indices must increase", lineno);
        if (!entries.empty() && e.timestamp_ms < entries.back().timestamp_ms)
            throw ParseError("frame manifest timestamps must not decrease", lineno);
        entries.push_back(std::move(e));
    }
    return entries;
}

ManifestSource::ManifestSource(const std::filesystem::path& manifest) : entries_(load_frame_manifest(manifest)) {}

std::optional<Frame> ManifestSource::next() {
    if (pos_ >= entries_.size()) return std::nullopt;
    const auto& e = entries_[pos_++];
    return read_pgm(e.file, e.frame, e.timestamp_ms);
}

DetectionLogSource::DetectionLogSource(std::shared_ptr<const ReplayLog> log, StreamGeometry geometry)
    : log_(std::move(log)), geo_(geometry) {
    if (!log_->frames.empty()) {
        next_ = log_->frames.begin()->first;
        last_ = log_->frames.rbegin()->first;
    }
}

std::optional<Frame> DetectionLogSource::next() {
    if (next_ > last_) return std::nullopt;
    const auto f = next_++;
    std::int64_t ts = geo_.start_ms + std::llround(static_cast<double>(f) * 1000.0 / geo_.fps);
    if (const auto it = log_->frames.find(f); it != log_->frames.end() && it->second.timestamp_ms)
        ts = *it->second.timestamp_ms;
    return Frame::headless(f, ts, geo_.width, geo_.height);
}

}  // namespace ppe
