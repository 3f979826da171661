#include "ppe/detector/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ppe/core/errors.hpp"
#include "ppe/core/geometry.hpp"
#include "ppe/core/json_io.hpp"
#include "ppe/util/seed.hpp"

namespace ppe {

Point ActorScript::center_at(std::int64_t frame) const {
    if (frame <= waypoints.front().frame) return {waypoints.front().x, waypoints.front().y};
    if (frame >= waypoints.back().frame) return {waypoints.back().x, waypoints.back().y};
    const auto next = std::upper_bound(waypoints.begin(), waypoints.end(), frame,
                                       [](std::int64_t f, const Waypoint& w) { return f < w.frame; });
    const auto& b = *next;
    const auto& a = *std::prev(next);
    const double t = static_cast<double>(frame - a.frame) / static_cast<double>(b.frame - a.frame);
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

bool ActorScript::helmeted_at(std::int64_t frame) const {
    for (const auto& s : helmet_schedule)
        if (frame >= s.from && frame < s.to) return s.helmeted;
    return helmet_schedule.empty() ? true : helmet_schedule.back().helmeted;
}

void ScenarioConfig::validate() const {
    if (duration_frames <= 0) throw ConfigError("scenario.duration_frames must be positive");
    if (width <= 0 || height <= 0) throw ConfigError("scenario frame size must be positive");
    if (!(fps > 0.0)) throw ConfigError("scenario.fps must be positive");
    if (noise.miss_prob < 0.0 || noise.miss_prob > 1.0) throw ConfigError("noise.miss_prob must lie in [0,1]");
    if (noise.false_positive_rate < 0.0) throw ConfigError("noise.false_positive_rate must be >= 0");
    if (noise.bbox_jitter_std < 0.0) throw ConfigError("noise.bbox_jitter_std must be >= 0");
    for (const auto& a : actors) {
        const std::string who = "actor '" + a.actor_id + "'";
        if (a.waypoints.empty()) throw ConfigError(who + " has no waypoints");
        for (std::size_t i = 1; i < a.waypoints.size(); ++i)
            if (a.waypoints[i].frame <= a.waypoints[i - 1].frame)
                throw ConfigError(who + ": waypoint frames must strictly increase");
        if (!(a.box_w > 0.0 && a.box_h > 0.0)) throw ConfigError(who + ": box size must be positive");
        if (a.helmet_schedule.empty()) throw ConfigError(who + " has no helmet schedule");
        auto spans = a.helmet_schedule;
        std::sort(spans.begin(), spans.end(), [](const auto& x, const auto& y) { return x.from < y.from; });
        if (spans.front().from > a.first_frame() || spans.back().to <= a.last_frame())
            throw ConfigError(who + ": helmet schedule does not cover the actor's lifetime");
        for (std::size_t i = 0; i < spans.size(); ++i) {
            if (spans[i].to <= spans[i].from) throw ConfigError(who + ": empty helmet span");
            if (i > 0 && spans[i].from != spans[i - 1].to)
                throw ConfigError(who + ": helmet spans must be disjoint and contiguous");
        }
    }
}

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
    j = nlohmann::json::object();
    j["seed"] = c.seed;
    j["duration_frames"] = c.duration_frames;
    j["width"] = c.width;
    j["height"] = c.height;
    j["fps"] = c.fps;
    j["start_ms"] = c.start_ms;
    j["noise"] = {{"miss_prob", c.noise.miss_prob},
                  {"false_positive_rate", c.noise.false_positive_rate},
                  {"bbox_jitter_std", c.noise.bbox_jitter_std}};
    auto actors = nlohmann::json::array();
    for (const auto& a : c.actors) {
        nlohmann::json ja;
        ja["actor_id"] = a.actor_id;
        ja["box_size"] = {a.box_w, a.box_h};
        for (const auto& s : a.helmet_schedule)
            ja["helmet_schedule"].push_back({{"from", s.from}, {"to", s.to}, {"helmeted", s.helmeted}});
        for (const auto& w : a.waypoints) ja["waypoints"].push_back({w.frame, w.x, w.y});
        actors.push_back(std::move(ja));
    }
    j["actors"] = std::move(actors);
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
    c = ScenarioConfig{};
    c.seed = j.at("seed").get<std::uint64_t>();
    c.duration_frames = j.at("duration_frames").get<std::int64_t>();
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.fps = j.value("fps", c.fps);
    c.start_ms = j.value("start_ms", c.start_ms);
    if (auto it = j.find("noise"); it != j.end()) {
        c.noise.miss_prob = it->value("miss_prob", 0.0);
        c.noise.false_positive_rate = it->value("false_positive_rate", 0.0);
        c.noise.bbox_jitter_std = it->value("bbox_jitter_std", 0.0);
    }
    for (const auto& ja : j.value("actors", nlohmann::json::array())) {
        ActorScript a;
        a.actor_id = ja.at("actor_id").get<std::string>();
        const auto& size = ja.at("box_size");
        a.box_w = size.at(0).get<double>();
        a.box_h = size.at(1).get<double>();
        for (const auto& s : ja.at("helmet_schedule"))
            a.helmet_schedule.push_back(
                {s.at("from").get<std::int64_t>(), s.at("to").get<std::int64_t>(), s.at("helmeted").get<bool>()});
        for (const auto& w : ja.at("waypoints"))
            a.waypoints.push_back({w.at(0).get<std::int64_t>(), w.at(1).get<double>(), w.at(2).get<double>()});
        c.actors.push_back(std::move(a));
    }
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    const auto doc = read_json_file(path);
    ScenarioConfig c;
    try {
        c = doc.get<ScenarioConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    c.validate();
    return c;
}

nlohmann::ordered_json ground_truth_to_json(const GroundTruth& gt) {
    nlohmann::ordered_json j;
    j["crossings"] = nlohmann::ordered_json::array();
    for (const auto& c : gt.crossings) {
        nlohmann::ordered_json e;
        e["actor_id"] = c.actor_id;
        e["line"] = c.line == LineKind::Entry ? "entry" : "exit";
        e["frame"] = c.frame;
        e["ts_ms"] = c.timestamp_ms;
        e["helmeted_at_crossing"] = c.helmeted_at_crossing;
        j["crossings"].push_back(std::move(e));
    }
    j["trajectories"] = nlohmann::ordered_json::object();
    for (const auto& [id, points] : gt.trajectories) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : points)
            arr.push_back({p.frame, p.box.x, p.box.y, p.box.w, p.box.h, p.helmeted});
        j["trajectories"][id] = std::move(arr);
    }
    return j;
}

Scenario::Scenario(ScenarioConfig cfg, ZoneConfig zones) : cfg_(std::move(cfg)), zones_(std::move(zones)) {
    cfg_.validate();
    zones_.validate();
}

std::int64_t Scenario::timestamp_of(std::int64_t frame) const {
    return cfg_.start_ms + std::llround(static_cast<double>(frame) * 1000.0 / cfg_.fps);
}

std::vector<std::pair<std::size_t, TrajectoryPoint>> Scenario::truth_at(std::int64_t frame) const {
    std::vector<std::pair<std::size_t, TrajectoryPoint>> out;
    for (std::size_t i = 0; i < cfg_.actors.size(); ++i) {
        const auto& a = cfg_.actors[i];
        if (!a.present_at(frame)) continue;
        const Point c = a.center_at(frame);
        const BBox raw{std::round(c.x - a.box_w / 2.0), std::round(c.y - a.box_h / 2.0), std::round(a.box_w),
                       std::round(a.box_h)};
        const BBox box = clip(raw, cfg_.width, cfg_.height);
        if (box.area() <= 0.0) continue;
        out.push_back({i, {frame, box, a.helmeted_at(frame)}});
    }
    return out;
}

std::vector<Detection> Scenario::detections_at(std::int64_t frame) const {
    std::vector<Detection> out;
    if (frame < 0 || frame >= cfg_.duration_frames) return out;
    std::mt19937_64 rng(item_seed(cfg_.seed, static_cast<std::uint64_t>(frame)));
    const auto& noise = cfg_.noise;
    std::bernoulli_distribution miss(noise.miss_prob);
    std::normal_distribution<double> jitter(0.0, noise.bbox_jitter_std > 0.0 ? noise.bbox_jitter_std : 1.0);

    for (const auto& [_, truth] : truth_at(frame)) {
        // fixed number of draws per actor keeps the stream stable across noise settings
        const bool missed = miss(rng);
        double dx0 = jitter(rng), dy0 = jitter(rng), dx1 = jitter(rng), dy1 = jitter(rng);
        if (noise.bbox_jitter_std == 0.0) dx0 = dy0 = dx1 = dy1 = 0.0;
        if (missed) continue;
        BBox b = truth.box;
        if (noise.bbox_jitter_std > 0.0) {
            const double x0 = std::round(b.x + dx0), y0 = std::round(b.y + dy0);
            const double x1 = std::round(b.right() + dx1), y1 = std::round(b.bottom() + dy1);
            b = clip({std::min(x0, x1), std::min(y0, y1), std::max(1.0, std::fabs(x1 - x0)),
                      std::max(1.0, std::fabs(y1 - y0))},
                     cfg_.width, cfg_.height);
            if (b.area() <= 0.0) continue;
        }
        out.push_back({b, 0.9, truth.helmeted ? HeadClass::HelmetedHead : HeadClass::UnhelmetedHead, std::nullopt});
    }

    if (noise.false_positive_rate > 0.0) {
        std::poisson_distribution<int> fp_count(noise.false_positive_rate);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int k = fp_count(rng);
        for (int i = 0; i < k; ++i) {
            const double w = std::round(12.0 + 24.0 * unit(rng));
            const double h = std::round(12.0 + 24.0 * unit(rng));
            const double x = std::round(unit(rng) * std::max(0.0, cfg_.width - w));
            const double y = std::round(unit(rng) * std::max(0.0, cfg_.height - h));
            const auto cls = unit(rng) < 0.5 ? HeadClass::HelmetedHead : HeadClass::UnhelmetedHead;
            const double conf = 0.3 + 0.4 * unit(rng);
            const BBox b = clip({x, y, w, h}, cfg_.width, cfg_.height);
            if (b.area() > 0.0) out.push_back({b, conf, cls, std::nullopt});
        }
    }
    return out;
}

Frame Scenario::render(std::int64_t frame) const {
    const auto w = static_cast<std::size_t>(cfg_.width);
    std::vector<std::uint8_t> px(w * static_cast<std::size_t>(cfg_.height), 20);
    for (const auto& [_, t] : truth_at(frame)) {
        const auto x0 = static_cast<std::size_t>(t.box.x), y0 = static_cast<std::size_t>(t.box.y);
        const auto x1 = static_cast<std::size_t>(t.box.right()), y1 = static_cast<std::size_t>(t.box.bottom());
        for (std::size_t y = y0; y < y1; ++y) std::fill(px.begin() + y * w + x0, px.begin() + y * w + x1, 200);
    }
    return Frame(frame, timestamp_of(frame), cfg_.width, cfg_.height, std::move(px));
}

GroundTruth Scenario::ground_truth() const {
    GroundTruth gt;
    LineCounter counter(zones_);
    struct ActorState {
        std::optional<Point> last_foot;
        int helmeted_votes = 0;
        int unhelmeted_votes = 0;
    };
    std::vector<ActorState> state(cfg_.actors.size());
    for (const auto& a : cfg_.actors) gt.trajectories.push_back({a.actor_id, {}});

    for (std::int64_t f = 0; f < cfg_.duration_frames; ++f) {
        for (const auto& [i, t] : truth_at(f)) {
            gt.trajectories[i].second.push_back(t);
            auto& st = state[i];
            (t.helmeted ? st.helmeted_votes : st.unhelmeted_votes) += 1;
            const bool helmeted = st.helmeted_votes != st.unhelmeted_votes
                                      ? st.helmeted_votes > st.unhelmeted_votes
                                      : t.helmeted;
            const Point foot = footpoint(t.box);
            if (st.last_foot) {
                const auto id = static_cast<std::int64_t>(i);
                for (const auto& e : counter.observe(id, helmeted, *st.last_foot, foot, timestamp_of(f), f)) {
                    gt.crossings.push_back({cfg_.actors[i].actor_id,
                                            e.direction == CountDirection::In ? LineKind::Entry : LineKind::Exit, f,
                                            e.timestamp_ms, e.helmeted});
                }
            }
            st.last_foot = foot;
        }
    }
    return gt;
}

ScenarioOutput generate_scenario(const ScenarioConfig& cfg, const ZoneConfig& zones, bool render) {
    const Scenario scenario(cfg, zones);
    ScenarioOutput out;
    out.detections.reserve(static_cast<std::size_t>(cfg.duration_frames));
    for (std::int64_t f = 0; f < cfg.duration_frames; ++f) {
        out.detections.emplace_back(f, scenario.detections_at(f));
        if (render) out.frames.push_back(scenario.render(f));
    }
    out.truth = scenario.ground_truth();
    return out;
}

}  // namespace ppe
