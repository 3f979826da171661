#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>

#include "ppe/core/errors.hpp"
#include "ppe/detector/scenario.hpp"
#include "ppe/tracker/hungarian.hpp"
#include "ppe/tracker/kalman_filter.hpp"
#include "ppe/tracker/tracker.hpp"

using namespace ppe;

namespace {

// Exhaustive minimum over all injections of the smaller side into the larger.
double brute_force_min(const CostMatrix& c) {
    const bool flip = c.rows() > c.cols();
    const CostMatrix m = flip ? CostMatrix(c.transpose()) : c;
    std::vector<int> cols(static_cast<std::size_t>(m.cols()));
    std::iota(cols.begin(), cols.end(), 0);
    double best = kForbidden;
    do {
        double s = 0;
        for (int r = 0; r < m.rows(); ++r) s += m(r, cols[static_cast<std::size_t>(r)]);
        best = std::min(best, s);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
}

Detection det(double cx, double cy, double w = 20, double h = 24) {
    Detection d;
    d.bbox = {cx - w / 2, cy - h / 2, w, h};
    return d;
}

Track confirmed_track(const KalmanFilter& kf, const BBox& box, std::int64_t id) {
    Track t;
    t.track_id = id;
    t.state = kf.initiate(to_measurement(box));
    t.status = TrackStatus::Confirmed;
    t.hits = 3;
    return t;
}

double trace(const Mat8& p) { return p.trace(); }

}  // namespace

TEST_SUITE("tracker") {

TEST_CASE("kalman predict") {
    KalmanFilter kf;
    KalmanState s;
    s.mean << 0, 0, 1, 10, 1, 0, 0, 0;
    const auto p = kf.predict(s);
    CHECK(p.mean(0) == doctest::Approx(1));
    CHECK(p.mean(1) == doctest::Approx(0));
    CHECK(p.mean(2) == doctest::Approx(1));
    CHECK(p.mean(3) == doctest::Approx(10));

    s.mean << 4, 5, 0.8, 20, 0, 0, 0, 0;
    CHECK(kf.predict(s).mean.isApprox(s.mean));

    KalmanNoise q0;
    q0.process_scale = 0;
    KalmanFilter still(q0);
    s.mean << 0, 0, 1, 10, 2, -1, 0, 0;
    const auto five = still.predict(s, 5);
    CHECK(five.mean(0) == doctest::Approx(10).epsilon(1e-12));
    CHECK(five.mean(1) == doctest::Approx(-5).epsilon(1e-12));
    // Five single steps equal one five-step prediction.
    KalmanState loop = s;
    for (int i = 0; i < 5; ++i) loop = still.predict(loop);
    CHECK((loop.covariance - five.covariance).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("kalman update") {
    KalmanFilter kf;
    auto s = kf.predict(kf.initiate({100, 50, 0.8, 25}));
    const auto same = kf.update(s, s.mean.head<4>());
    CHECK((same.mean.head<4>() - s.mean.head<4>()).cwiseAbs().maxCoeff() < 1e-9);

    KalmanNoise tight;
    tight.measurement_scale = 1e-14;
    KalmanFilter exact(tight);
    const Vec4 z(110, 40, 0.7, 30);
    const auto u = exact.update(exact.predict(exact.initiate({100, 50, 0.8, 25})), z);
    CHECK((u.mean.head<4>() - z).cwiseAbs().maxCoeff() < 1e-6);

    KalmanNoise zero;
    zero.measurement_scale = 0;
    KalmanState flat;
    flat.mean << 0, 0, 1, 10, 0, 0, 0, 0;
    flat.covariance.setZero();
    CHECK_THROWS_AS(KalmanFilter(zero).update(flat, Vec4(1, 1, 1, 10)), SingularInnovation);
}

TEST_CASE("constant velocity is recovered exactly without noise") {
    // Independent oracle: a scalar position/velocity filter written out by hand.
    double x = 0, v = 0, pxx = 1e4, pxv = 0, pvv = 1e4;
    const double r = 1e-14;
    for (int t = 0; t <= 10; ++t) {
        if (t > 0) {
            x += v;
            pxx += 2 * pxv + pvv;
            pxv += pvv;
        }
        const double s = pxx + r, kx = pxx / s, kv = pxv / s, innov = 3.0 * t - x;
        x += kx * innov;
        v += kv * innov;
        const double nxx = (1 - kx) * pxx, nxv = (1 - kx) * pxv, nvv = pvv - kv * pxv;
        pxx = nxx;
        pxv = nxv;
        pvv = nvv;
    }
    CHECK(std::fabs(v - 3.0) < 1e-6);

    KalmanNoise n;
    n.process_scale = 0;
    n.measurement_scale = 1e-12;
    KalmanFilter kf(n);
    auto s = kf.initiate({0, 50, 0.8, 25});
    for (int t = 1; t <= 10; ++t) s = kf.update(kf.predict(s), Vec4(3.0 * t, 50, 0.8, 25));
    CHECK(std::fabs(s.mean(4) - v) < 1e-6);
    CHECK(std::fabs(s.mean(5)) < 1e-6);
}

TEST_CASE("mahalanobis") {
    KalmanFilter kf;
    const auto s = kf.initiate({10, 10, 1, 20});
    CHECK(kf.mahalanobis(s, s.mean.head<4>()) == doctest::Approx(0));
    CHECK(squared_mahalanobis(Vec4(3, 4, 0, 0), Mat4::Identity()) == doctest::Approx(25));
    CHECK_THROWS_AS(squared_mahalanobis(Vec4(1, 0, 0, 0), Mat4::Zero()), SingularInnovation);

    const boost::math::chi_squared chi2(4);
    CHECK(kChi2Gate95 == doctest::Approx(boost::math::quantile(chi2, 0.95)).epsilon(1e-4));
}

TEST_CASE("gate admits about 95% of true matches") {
    KalmanFilter kf;
    const auto s = kf.predict(kf.initiate({120, 80, 0.8, 30}));
    const auto [mu, cov] = kf.project(s);
    const Eigen::LLT<Mat4> llt(cov);
    const Mat4 l = llt.matrixL();
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    const int trials = 20000;
    int inside = 0;
    for (int i = 0; i < trials; ++i) {
        Vec4 e;
        for (int k = 0; k < 4; ++k) e(k) = n01(rng);
        if (kf.mahalanobis(s, mu + l * e) <= kChi2Gate95) ++inside;
    }
    const double frac = static_cast<double>(inside) / trials;
    const double sd = std::sqrt(0.95 * 0.05 / trials);
    CHECK(std::fabs(frac - 0.95) < 5 * sd);
}

TEST_CASE("covariance stays symmetric PSD") {
    KalmanFilter kf;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    std::uniform_int_distribution<int> coin(0, 2);
    auto s = kf.initiate({160, 120, 0.8, 24});
    for (int i = 0; i < 1000; ++i) {
        s = kf.predict(s, 1 + coin(rng));
        if (coin(rng) != 0) {
            Vec4 z = s.mean.head<4>();
            z(0) += 3 * n01(rng);
            z(1) += 3 * n01(rng);
            z(2) = std::clamp(z(2) + 0.05 * n01(rng), 0.3, 2.0);
            z(3) = std::clamp(z(3) + n01(rng), 10.0, 60.0);
            s = kf.update(s, z);
        }
        CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-9);
        const Eigen::SelfAdjointEigenSolver<Mat8> es(s.covariance);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("zero-innovation update never raises the trace") {
    KalmanFilter kf;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(10, 60);
    for (int i = 0; i < 200; ++i) {
        auto s = kf.predict(kf.initiate({u(rng) * 4, u(rng) * 3, 0.8, u(rng)}), 1 + i % 4);
        const auto after = kf.update(s, s.mean.head<4>());
        CHECK(trace(after.covariance) <= trace(s.covariance) + 1e-9);
    }
}

TEST_CASE("hungarian examples") {
    CostMatrix a(1, 1);
    a << 0;
    auto r = hungarian(a);
    CHECK(r.pairs == std::vector<std::pair<int, int>>{{0, 0}});
    CHECK(r.cost == 0);

    CostMatrix b(2, 2);
    b << 1, 2, 2, 1;
    r = hungarian(b);
    CHECK(r.pairs == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
    CHECK(r.cost == doctest::Approx(2));

    CostMatrix c(3, 3);
    c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    r = hungarian(c);
    CHECK(r.pairs == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {2, 2}});
    CHECK(r.cost == doctest::Approx(5));
    CHECK(brute_force_min(c) == doctest::Approx(5));
}

TEST_CASE("hungarian rectangular and forbidden") {
    CostMatrix w(2, 3);
    w << 5, 1, 9, 2, 8, 3;
    auto r = hungarian(w);
    CHECK(r.pairs.size() == 2);
    CHECK(r.unassigned_cols == std::vector<int>{2});
    CHECK(r.cost == doctest::Approx(3));

    CostMatrix f(2, 2);
    f << kForbidden, 1, kForbidden, 2;
    CHECK_THROWS_AS(hungarian(f), InfeasibleAssignment);
    const auto p = hungarian_partial(f);
    CHECK(p.pairs.size() == 1);
    CHECK(p.cost == doctest::Approx(1));
    CHECK(p.unassigned_rows == std::vector<int>{1});

    CostMatrix nan(1, 1);
    nan << std::nan("");
    CHECK_THROWS_AS(hungarian(nan), std::invalid_argument);

    CHECK(hungarian(CostMatrix(0, 4)).unassigned_cols.size() == 4);
}

TEST_CASE("hungarian matches brute force on random matrices") {
    std::mt19937_64 rng(2022);
    std::uniform_int_distribution<int> dim(1, 7);
    std::uniform_real_distribution<double> val(0, 100);
    for (int trial = 0; trial < 1000; ++trial) {
        CostMatrix c(dim(rng), dim(rng));
        for (int i = 0; i < c.rows(); ++i)
            for (int j = 0; j < c.cols(); ++j) c(i, j) = val(rng);
        const auto r = hungarian(c);
        double sum = 0;
        for (auto [i, j] : r.pairs) sum += c(i, j);
        CHECK(sum == doctest::Approx(r.cost));
        CHECK(r.cost == doctest::Approx(brute_force_min(c)).epsilon(1e-9));
        CHECK(r.pairs.size() == static_cast<std::size_t>(std::min(c.rows(), c.cols())));
    }
}

TEST_CASE("associate examples") {
    KalmanFilter kf;
    TrackerConfig cfg;
    const std::vector<Detection> dets{det(50, 50), det(200, 100)};
    auto r = associate({}, dets, kf, cfg);
    CHECK(r.matches.empty());
    CHECK(r.unmatched_detections.size() == 2);

    std::vector<Track> one{confirmed_track(kf, dets[0].bbox, 1)};
    r = associate(one, std::vector<Detection>{dets[0]}, kf, cfg);
    REQUIRE(r.matches.size() == 1);
    CHECK(r.matches[0] == std::pair<std::size_t, std::size_t>{0, 0});

    std::vector<Track> two{confirmed_track(kf, dets[0].bbox, 1), confirmed_track(kf, dets[1].bbox, 2)};
    r = associate(two, dets, kf, cfg);
    auto m = r.matches;
    std::sort(m.begin(), m.end());
    CHECK(m == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});

    // Far outside the gate: no match, the track and detection stay apart.
    r = associate(one, std::vector<Detection>{det(300, 220)}, kf, cfg);
    CHECK(r.matches.empty());
    CHECK(r.unmatched_tracks.size() == 1);
}

TEST_CASE("appearance cost") {
    KalmanFilter kf;
    TrackerConfig cfg;
    cfg.appearance_weight = 1.0;
    auto t = confirmed_track(kf, det(50, 50).bbox, 1);
    t.last_feature = std::vector<float>{1, 0};
    auto d = det(50, 50);
    d.feature = std::vector<float>{0, 1};
    CHECK(association_cost(t, d, kf, cfg) == doctest::Approx(1));
    d.feature = std::vector<float>{1, 0};
    CHECK(association_cost(t, d, kf, cfg) == doctest::Approx(0));
    CHECK(association_cost(t, det(300, 220), kf, cfg) == kForbidden);
}

TEST_CASE("single walker keeps one identity") {
    ScenarioConfig sc;
    sc.seed = 1;
    sc.duration_frames = 100;
    ActorScript a;
    a.actor_id = "w";
    a.waypoints = {{0, 160, 30}, {99, 160, 210}};
    a.helmet_schedule = {{0, 100, true}};
    sc.actors.push_back(a);
    ZoneConfig z;
    z.camera_id = "c";
    z.detection_area = {0, 0, 320, 240};
    z.entry_line = {{0, 150}, {320, 150}, CrossingDirection::AtoLeft};
    z.exit_line = {{0, 90}, {320, 90}, CrossingDirection::AtoRight};
    const Scenario scenario(sc, z);

    Tracker tr;
    std::optional<std::int64_t> id;
    for (std::int64_t f = 0; f < 100; ++f) {
        const auto ds = scenario.detections_at(f);
        const auto out = tr.step(ds, f);
        if (f >= 2) {
            REQUIRE(out.size() == 1);
            if (!id) id = out[0].track_id;
            CHECK(out[0].track_id == *id);
        }
    }
    CHECK(tr.confirmed_total() == 1);
}

TEST_CASE("lifecycle") {
    TrackerConfig cfg;
    cfg.max_age = 5;
    Tracker tr(cfg);
    const std::vector<Detection> one{det(100, 100)};
    CHECK(tr.step(one, 0).empty());
    CHECK(tr.tracks().front().status == TrackStatus::Tentative);
    CHECK(tr.step(one, 1).empty());
    const auto c = tr.step(one, 2);
    REQUIRE(c.size() == 1);
    CHECK(c[0].time_since_update == 0);
    const auto id = c[0].track_id;

    for (int k = 1; k <= cfg.max_age; ++k) {
        tr.step({}, 2 + k);
        REQUIRE(tr.tracks().size() == 1);
    }
    tr.step({}, 3 + cfg.max_age);
    CHECK(tr.tracks().empty());
    CHECK(tr.deleted_ids() == std::vector<std::int64_t>{id});

    // A tentative track dies on its first miss.
    tr.step(one, 100);
    tr.step({}, 101);
    CHECK(tr.tracks().empty());

    CHECK_THROWS_AS(tr.step({}, 101), NonMonotonicFrame);
    CHECK_THROWS_AS(Tracker(TrackerConfig{.max_age = 0}), ConfigError);
}

TEST_CASE("majority class with recency tie break") {
    Track t;
    t.class_votes = {2, 1};
    t.last_class = HeadClass::UnhelmetedHead;
    CHECK(t.majority_class() == HeadClass::HelmetedHead);
    t.class_votes = {1, 1};
    CHECK(t.majority_class() == HeadClass::UnhelmetedHead);
}

TEST_CASE("crossing actors keep identity with appearance") {
    TrackerConfig cfg;
    cfg.appearance_weight = 1.0;
    Tracker tr(cfg);
    std::map<std::int64_t, float> first_component;
    for (int f = 0; f < 40; ++f) {
        auto a = det(60 + 5.0 * f, 100);
        auto b = det(255 - 5.0 * f, 100);
        a.feature = std::vector<float>{1, 0};
        b.feature = std::vector<float>{0, 1};
        const std::vector<Detection> ds{a, b};
        for (const auto& t : tr.step(ds, f)) {
            if (!t.updated) continue;
            const float c = (*t.last_feature)[0];
            const auto [it, fresh] = first_component.emplace(t.track_id, c);
            CHECK(it->second == c);
        }
    }
    CHECK(first_component.size() == 2);
    CHECK(tr.confirmed_total() == 2);
}

TEST_CASE("track ids are never reused and replay is deterministic") {
    auto run = [](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> pos(20, 300);
        std::uniform_int_distribution<int> count(0, 4);
        TrackerConfig cfg;
        cfg.max_age = 3;
        Tracker tr(cfg);
        std::vector<std::vector<std::pair<std::int64_t, Vec8>>> trace_out;
        std::int64_t max_seen = 0;
        for (std::int64_t f = 0; f < 300; ++f) {
            std::vector<Detection> ds;
            for (int k = count(rng); k > 0; --k) ds.push_back(det(pos(rng), pos(rng) * 0.7));
            tr.step(ds, f);
            std::vector<std::pair<std::int64_t, Vec8>> snap;
            std::int64_t step_max = max_seen;
            for (const auto& t : tr.tracks()) {
                snap.emplace_back(t.track_id, t.state.mean);
                step_max = std::max(step_max, t.track_id);
            }
            for (auto id : tr.deleted_ids()) CHECK(id <= max_seen + static_cast<std::int64_t>(ds.size()));
            max_seen = step_max;
            trace_out.push_back(std::move(snap));
        }
        return trace_out;
    };
    const auto a = run(9), b = run(9);
    CHECK(a == b);

    // An id disappears for good once it leaves the track list.
    std::map<std::int64_t, std::pair<std::size_t, std::size_t>> span;
    for (std::size_t f = 0; f < a.size(); ++f)
        for (const auto& [id, _] : a[f]) {
            auto [it, fresh] = span.emplace(id, std::pair{f, f});
            if (!fresh) {
                CHECK(it->second.second + 1 == f);
                it->second.second = f;
            }
        }
}

}  // TEST_SUITE
