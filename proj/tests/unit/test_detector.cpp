#include <doctest.h>

#include <cmath>
#include <thread>

#include "ppe/core/errors.hpp"
#include "ppe/core/geometry.hpp"
#include "ppe/detector/detection_json.hpp"
#include "ppe/detector/remote_backend.hpp"
#include "ppe/detector/replay_backend.hpp"
#include "ppe/detector/scenario.hpp"
#include "ppe/detector/synthetic_backend.hpp"
#include "ppe/pipeline/stub_server.hpp"

using namespace ppe;

namespace {

ZoneConfig gate() {
    ZoneConfig z;
    z.camera_id = "gate1";
    z.detection_area = {40, 40, 240, 160};
    z.entry_line = {{40, 150}, {280, 150}, CrossingDirection::AtoLeft};
    z.exit_line = {{40, 90}, {280, 90}, CrossingDirection::AtoRight};
    return z;
}

ActorScript walker(std::string id, std::vector<Waypoint> wps, bool helmeted = true) {
    ActorScript a;
    a.actor_id = std::move(id);
    a.waypoints = std::move(wps);
    a.helmet_schedule = {{a.first_frame(), a.last_frame() + 1, helmeted}};
    return a;
}

ScenarioConfig one_walker(NoiseConfig noise = {}) {
    ScenarioConfig c;
    c.seed = 17;
    c.duration_frames = 100;
    c.noise = noise;
    c.actors.push_back(walker("w", {{0, 160, 30}, {90, 160, 210}}));
    return c;
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("replay log parsing") {
    CHECK(parse_replay_log("").frames.empty());
    const auto log = parse_replay_log(
        R"({"frame":0,"detections":[{"x":1,"y":2,"w":3,"h":4,"confidence":0.9,"class":"helmeted_head"}]})"
        "\n"
        R"({"frame":2,"detections":[]})"
        "\n");
    ReplayBackend b(log);
    CHECK(b.detect(Frame::headless(1, 0, 320, 240)).empty());
    const auto d0 = b.detect(Frame::headless(0, 0, 320, 240));
    REQUIRE(d0.size() == 1);
    CHECK(d0[0].bbox.w == 3);
    CHECK(d0[0].cls == HeadClass::HelmetedHead);

    try {
        parse_replay_log("{\"frame\":0,\"detections\":[]}\n{\"frame\":1,\"detections\":[]}\n{oops\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_replay_log("{\"frame\":4,\"detections\":[]}\n{\"frame\":4,\"detections\":[]}\n"),
                    DuplicateFrameIndex);

    ReplayBackend strict(log, true);
    CHECK_THROWS_AS(strict.detect(Frame::headless(1, 0, 320, 240)), ReplayExhausted);
}

TEST_CASE("replay line round trip") {
    Detection d;
    d.bbox = {10, 20, 30, 40};
    d.confidence = 0.5;
    d.cls = HeadClass::UnhelmetedHead;
    d.feature = std::vector<float>{0.6f, 0.8f};
    const auto line = replay_line(7, {d}, 1234);
    CHECK(line.find("\"x\":10,") != std::string::npos);
    const auto log = parse_replay_log(line);
    REQUIRE(log.frames.count(7) == 1);
    CHECK(log.frames.at(7).timestamp_ms == 1234);
    CHECK(log.frames.at(7).detections[0] == d);
}

TEST_CASE("replay clips boxes to the frame") {
    ReplayLog log;
    log.frames[0].detections.push_back({{-10, 230, 30, 30}, 0.9, HeadClass::HelmetedHead, {}});
    log.frames[0].detections.push_back({{500, 10, 30, 30}, 0.9, HeadClass::HelmetedHead, {}});
    ReplayBackend b(log);
    const auto ds = b.detect(Frame::headless(0, 0, 320, 240));
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].bbox.x == 0);
    CHECK(ds[0].bbox.bottom() == 240);
}

TEST_CASE("synthetic stream equals the script when noise is off") {
    const Scenario sc(one_walker(), gate());
    SyntheticBackend backend(std::make_shared<Scenario>(sc));
    for (std::int64_t f = 0; f < 100; ++f) {
        const auto ds = backend.detect(Frame::headless(f, 0, 320, 240));
        if (f > 90) {
            CHECK(ds.empty());
            continue;
        }
        REQUIRE(ds.size() == 1);
        const auto c = sc.config().actors[0].center_at(f);
        const auto box = ds[0].bbox;
        CHECK(box.w == 20);
        CHECK(std::fabs(center(box).x - c.x) <= 0.5);
        CHECK(std::fabs(center(box).y - c.y) <= 0.5);
        CHECK(ds[0].cls == HeadClass::HelmetedHead);
        CHECK(box.x == std::round(box.x));
    }
}

TEST_CASE("miss probability one silences the detector") {
    NoiseConfig n;
    n.miss_prob = 1.0;
    const Scenario sc(one_walker(n), gate());
    for (std::int64_t f = 0; f < 100; ++f) CHECK(sc.detections_at(f).empty());
}

TEST_CASE("scenario generation is deterministic") {
    NoiseConfig n;
    n.miss_prob = 0.2;
    n.bbox_jitter_std = 3;
    n.false_positive_rate = 0.5;
    const auto a = generate_scenario(one_walker(n), gate(), true);
    const auto b = generate_scenario(one_walker(n), gate(), true);
    CHECK(a.detections == b.detections);
    CHECK(a.truth.crossings == b.truth.crossings);
    REQUIRE(a.frames.size() == b.frames.size());
    for (std::size_t i = 0; i < a.frames.size(); ++i)
        CHECK(std::equal(a.frames[i].pixels().begin(), a.frames[i].pixels().end(), b.frames[i].pixels().begin()));
    auto other = one_walker(n);
    other.seed = 18;
    CHECK(generate_scenario(other, gate()).detections != a.detections);
}

TEST_CASE("detections stay inside the frame") {
    NoiseConfig n;
    n.bbox_jitter_std = 8;
    n.false_positive_rate = 2;
    auto cfg = one_walker(n);
    cfg.actors.push_back(walker("edge", {{0, 5, 5}, {99, 315, 235}}));
    const Scenario sc(cfg, gate());
    for (std::int64_t f = 0; f < 100; ++f)
        for (const auto& d : sc.detections_at(f)) {
            CHECK(d.bbox.x >= 0);
            CHECK(d.bbox.y >= 0);
            CHECK(d.bbox.right() <= 320);
            CHECK(d.bbox.bottom() <= 240);
            CHECK(d.bbox.area() > 0);
        }
}

TEST_CASE("false positive count follows the Poisson rate") {
    ScenarioConfig c;
    c.seed = 3;
    c.duration_frames = 10'000;
    c.noise.false_positive_rate = 0.7;
    const Scenario sc(c, gate());
    std::size_t total = 0;
    for (std::int64_t f = 0; f < c.duration_frames; ++f) total += sc.detections_at(f).size();
    const double mean = 0.7 * 10'000;
    CHECK(std::fabs(static_cast<double>(total) - mean) <= 5.0 * std::sqrt(mean));
}

TEST_CASE("ground truth for simple scripts") {
    const Scenario sc(one_walker(), gate());
    const auto gt = sc.ground_truth();
    REQUIRE(gt.crossings.size() == 1);
    CHECK(gt.crossings[0].line == LineKind::Entry);
    CHECK(gt.crossings[0].helmeted_at_crossing);

    ScenarioConfig linger;
    linger.seed = 1;
    linger.duration_frames = 140;
    linger.actors.push_back(walker(
        "l", {{0, 150, 30}, {50, 150, 148}, {60, 150, 128}, {70, 150, 148}, {80, 150, 128}, {90, 150, 148}, {130, 150, 220}}));
    const auto lg = Scenario(linger, gate()).ground_truth();
    REQUIRE(lg.crossings.size() == 1);
    CHECK(lg.crossings[0].line == LineKind::Entry);

    ScenarioConfig late = one_walker();
    late.actors[0].helmet_schedule = {{0, 75, false}, {75, 91, true}};
    const auto lt = Scenario(late, gate()).ground_truth();
    REQUIRE(lt.crossings.size() == 1);
    CHECK_FALSE(lt.crossings[0].helmeted_at_crossing);

    ScenarioConfig empty;
    empty.duration_frames = 10;
    CHECK(Scenario(empty, gate()).ground_truth().crossings.empty());
}

TEST_CASE("rendering draws actors on the background") {
    const Scenario sc(one_walker(), gate());
    const auto f = sc.render(0);
    REQUIRE(f.has_pixels());
    const auto px = f.pixels();
    CHECK(px[0] == 20);
    const auto c = sc.config().actors[0].center_at(0);
    CHECK(px[static_cast<std::size_t>(c.y) * 320 + static_cast<std::size_t>(c.x)] == 200);
}

TEST_CASE("scenario validation") {
    auto c = one_walker();
    c.actors[0].waypoints = {{5, 0, 0}, {5, 1, 1}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = one_walker();
    c.actors[0].helmet_schedule = {{0, 40, true}, {50, 91, false}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = one_walker();
    c.noise.miss_prob = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = one_walker();
    c.duration_frames = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("remote response schema") {
    CHECK(parse_remote_response(R"({"detections":[]})").empty());
    const auto ds = parse_remote_response(
        R"({"detections":[{"x":1,"y":2,"w":3,"h":4,"confidence":0.9,"class":"helmeted_head"}]})");
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].bbox == BBox{1, 2, 3, 4});
    CHECK(ds[0].confidence == doctest::Approx(0.9));
    try {
        parse_remote_response("not json");
        FAIL("expected a schema error");
    } catch (const RemoteDetectError& e) {
        CHECK(e.cause() == RemoteFailure::Schema);
    }
    CHECK_THROWS_AS(parse_remote_response(R"({"boxes":[]})"), RemoteDetectError);
}

TEST_CASE("remote backend against the stub server") {
    ReplayLog log;
    log.frames[0].detections.push_back({{10, 20, 30, 40}, 0.9, HeadClass::HelmetedHead, {}});

    SUBCASE("frame present in the log") {
        StubDetectorServer stub(log, {});
        stub.start();
        RemoteBackendConfig rc;
        rc.endpoint = stub.endpoint();
        RemoteBackend remote(rc);
        const auto ds = remote.detect(Frame(0, 0, 320, 240, std::vector<std::uint8_t>(320 * 240, 20)));
        REQUIRE(ds.size() == 1);
        CHECK(ds[0].bbox == BBox{10, 20, 30, 40});
        CHECK(remote.detect(Frame::headless(5, 0, 320, 240)).empty());
    }
    SUBCASE("injected failures surface after retries") {
        StubOptions o;
        o.fail_rate = 1.0;
        StubDetectorServer stub(log, o);
        stub.start();
        RemoteBackendConfig rc;
        rc.endpoint = stub.endpoint();
        rc.backoff_base_ms = 1;
        RemoteBackend remote(rc);
        try {
            remote.detect(Frame::headless(0, 0, 320, 240));
            FAIL("expected failure");
        } catch (const RemoteDetectError& e) {
            CHECK(e.cause() == RemoteFailure::HttpStatus);
            CHECK(e.status() == 503);
        }
        CHECK(stub.requests() == 3);
        CHECK(remote.stats().retries == 2);
    }
    SUBCASE("injected latency is observed by the client") {
        StubOptions o;
        o.latency = std::chrono::milliseconds(200);
        StubDetectorServer stub(log, o);
        stub.start();
        RemoteBackendConfig rc;
        rc.endpoint = stub.endpoint();
        RemoteBackend remote(rc);
        remote.detect(Frame::headless(0, 0, 320, 240));
        CHECK(remote.last_latency() >= std::chrono::milliseconds(200));
    }
    SUBCASE("timeouts and refused connections") {
        StubOptions o;
        o.latency = std::chrono::milliseconds(400);
        StubDetectorServer stub(log, o);
        stub.start();
        RemoteBackendConfig rc;
        rc.endpoint = stub.endpoint();
        rc.timeout_ms = 100;
        try {
            RemoteBackend(rc).remote_detect(Frame::headless(0, 0, 320, 240));
            FAIL("expected timeout");
        } catch (const RemoteDetectError& e) {
            CHECK(e.cause() == RemoteFailure::Timeout);
        }
        rc.endpoint = "http://127.0.0.1:1";
        CHECK_THROWS_AS(RemoteBackend(rc).remote_detect(Frame::headless(0, 0, 320, 240)), BackendUnavailable);
    }
}

TEST_CASE("stub server rejects a busy port") {
    StubDetectorServer first(ReplayLog{}, {});
    first.start();
    StubOptions o;
    o.port = first.port();
    StubDetectorServer second(ReplayLog{}, o);
    CHECK_THROWS_AS(second.start(), BindError);
}

}  // TEST_SUITE
