#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "ppe/core/errors.hpp"
#include "ppe/evaluation/fixture.hpp"
#include "ppe/evaluation/stats.hpp"

using namespace ppe;

namespace {

CountSeries series(std::vector<std::int64_t> v) {
    CountSeries s;
    for (std::size_t i = 0; i < v.size(); ++i) s.labels.push_back(std::to_string(i));
    s.values = std::move(v);
    return s;
}

double boost_p(double r, std::size_t n) {
    const double df = static_cast<double>(n) - 2;
    const double t = r * std::sqrt(df / (1 - r * r));
    const boost::math::students_t dist(df);
    return 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

bool within(double x, double target, double tol) { return std::fabs(x - target) <= tol; }

DayFixture fixture(int n) { return load_day_fixture(PPE_SOURCE_DIR "/data/table" + std::to_string(n) + ".csv"); }

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("mean difference") {
    const auto a = series({1, 2, 3}), b = series({2, 4, 9});
    CHECK(mean_diff(a, b) == doctest::Approx(3));
    CHECK(mean_diff(a, a) == 0);
    CHECK(differences(a, b) == std::vector<double>{1, 2, 6});
    CHECK_THROWS_AS(mean_diff(a, series({1, 2})), LengthMismatch);
    CHECK_THROWS_AS(mean_diff(series({}), series({})), LengthMismatch);
}

TEST_CASE("sample standard deviation") {
    const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(sample_std(xs) == doctest::Approx(std::sqrt(32.0 / 7)));
    const std::vector<double> c{3, 3, 3};
    CHECK(sample_std(c) == 0);
    const std::vector<double> one{1};
    CHECK_THROWS_AS(sample_std(one), InsufficientData);
}

TEST_CASE("pearson") {
    const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 5, 4, 5};
    CHECK(pearson(x, x) == doctest::Approx(1));
    CHECK(pearson(x, y) == doctest::Approx(0.7745966692).epsilon(1e-9));
    const std::vector<double> neg{5, 4, 3, 2, 1}, flat{2, 2, 2, 2, 2};
    CHECK(pearson(x, neg) == doctest::Approx(-1));
    CHECK_THROWS_AS(pearson(x, flat), ZeroVariance);
    const std::vector<double> one{1};
    CHECK_THROWS_AS(pearson(one, one), InsufficientData);
    const std::vector<double> shorter{1, 2};
    CHECK_THROWS_AS(pearson(x, shorter), LengthMismatch);
}

TEST_CASE("pearson properties") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> n(3, 30);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> alpha(0.01, 50), beta(-100, 100);
    for (int trial = 0; trial < 500; ++trial) {
        const int k = n(rng);
        std::vector<double> a(static_cast<std::size_t>(k)), b(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = g(rng);
            b[i] = 0.3 * a[i] + g(rng);
        }
        const double r = pearson(a, b);
        CHECK(std::fabs(r) <= 1.0);
        CHECK(std::fabs(pearson(b, a) - r) < 1e-12);
        const double al = alpha(rng), be = beta(rng);
        std::vector<double> t(a.size());
        std::transform(a.begin(), a.end(), t.begin(), [&](double v) { return al * v + be; });
        CHECK(std::fabs(pearson(t, b) - r) < 1e-12);
    }
}

TEST_CASE("mean difference is antisymmetric and std vanishes only on constant diffs") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::int64_t> v(0, 120);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::int64_t> x(14), y(14);
        for (int i = 0; i < 14; ++i) {
            x[static_cast<std::size_t>(i)] = v(rng);
            y[static_cast<std::size_t>(i)] = trial % 5 == 0 ? x[static_cast<std::size_t>(i)] + 3 : v(rng);
        }
        const auto a = series(x), b = series(y);
        CHECK(mean_diff(a, b) == -mean_diff(b, a));
        const auto d = differences(a, b);
        const double s = sample_std(d);
        CHECK(s >= 0);
        const bool constant = std::all_of(d.begin(), d.end(), [&](double e) { return e == d.front(); });
        CHECK((s == 0) == constant);
    }
}

TEST_CASE("p value") {
    CHECK(pearson_p_value(0, 10) == doctest::Approx(1));
    CHECK(pearson_p_value(1, 10) == 0);
    CHECK(pearson_p_value(0.988, 14) < 0.001);
    CHECK_THROWS_AS(pearson_p_value(0.5, 2), InsufficientData);
    for (double r : {-0.9, -0.3, 0.1, 0.5, 0.75, 0.99})
        for (std::size_t n : {3ul, 5ul, 14ul, 40ul}) CHECK(pearson_p_value(r, n) == doctest::Approx(boost_p(r, n)).epsilon(1e-9));
    CHECK(incomplete_beta(2, 3, 0) == 0);
    CHECK(incomplete_beta(2, 3, 1) == 1);
    CHECK(incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
    CHECK(student_t_two_sided(0, 5) == doctest::Approx(1));
}

TEST_CASE("p value agrees with a permutation test") {
    // Construct a 14-point sample with correlation exactly 0.5.
    std::mt19937_64 rng(314);
    std::normal_distribution<double> g;
    const std::size_t n = 14;
    std::vector<double> x(n), z(n);
    for (auto& v : x) v = g(rng);
    for (auto& v : z) v = g(rng);
    auto centre = [](std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        for (auto& e : v) e -= m;
        const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        for (auto& e : v) e /= norm;
    };
    centre(x);
    centre(z);
    const double proj = std::inner_product(x.begin(), x.end(), z.begin(), 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i] -= proj * x[i];
    centre(z);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.5 * x[i] + std::sqrt(0.75) * z[i];
    const double r = pearson(x, y);
    REQUIRE(r == doctest::Approx(0.5).epsilon(1e-12));

    const int shuffles = 100'000;
    int extreme = 0;
    std::vector<double> perm = y;
    for (int s = 0; s < shuffles; ++s) {
        std::shuffle(perm.begin(), perm.end(), rng);
        if (std::fabs(pearson(x, perm)) >= std::fabs(r) - 1e-12) ++extreme;
    }
    const double p_perm = static_cast<double>(extreme) / shuffles;
    CHECK(std::fabs(pearson_p_value(r, n) - p_perm) <= 0.01);
}

TEST_CASE("compare") {
    const auto a = series({10, 20, 30, 45}), b = series({12, 19, 35, 44});
    const auto rep = compare(a, b);
    CHECK(rep.n == 4);
    CHECK(rep.mean_diff == doctest::Approx(1.25));
    REQUIRE(rep.pearson_r);
    CHECK(*rep.pearson_r == doctest::Approx(pearson(to_doubles(a), to_doubles(b))));
    REQUIRE(rep.p_value);

    const auto same = compare(a, a);
    CHECK(same.degenerate());
    CHECK(same.mean_diff == 0);
    CHECK(same.sample_std == 0);
    CHECK_FALSE(same.p_value);

    CHECK(compare(series({5, 5, 5}), series({1, 4, 9})).degenerate());
}

TEST_CASE("published tables") {
    const auto t1 = fixture(1), t2 = fixture(2);
    CHECK(t1.hours.size() == 14);
    CHECK(t1.hours.front() == "05:00");

    // Reported rows against values recomputed from the raw counts.
    for (const auto* fx : {&t1, &t2}) {
        CHECK(differences(fx->model_in, fx->camera_in) == std::vector<double>(fx->diff_in.begin(), fx->diff_in.end()));
        CHECK(differences(fx->model_out, fx->camera_out) == std::vector<double>(fx->diff_out.begin(), fx->diff_out.end()));
    }
    CHECK(t1.diff_in_total == -87);
    CHECK(t1.diff_out_total == 19);
    CHECK(t2.diff_in_total == -69);
    CHECK(t2.diff_out_total == 55);

    const auto r1 = report(t1);
    CHECK(r1.in.mean_diff == doctest::Approx(-87.0 / 14));
    CHECK(r1.out.mean_diff == doctest::Approx(19.0 / 14));
    CHECK(within(r1.in.sample_std, 5.08, 0.01));
    CHECK(within(r1.out.sample_std, 2.73, 0.01));
    CHECK(within(*r1.in.pearson_r, 0.988, 0.005));
    CHECK(within(*r1.out.pearson_r, 0.995, 0.005));
    CHECK(*r1.in.p_value <= 0.05);
    CHECK(*r1.out.p_value <= 0.05);

    const auto r2 = report(t2);
    CHECK(r2.in.mean_diff == doctest::Approx(-69.0 / 14));
    CHECK(r2.out.mean_diff == doctest::Approx(55.0 / 14));
    CHECK(within(r2.in.sample_std, 4.25, 0.01));
    CHECK(within(r2.out.sample_std, 4.92, 0.01));
    CHECK(within(*r2.in.pearson_r, 0.993, 0.005));
    CHECK(within(*r2.out.pearson_r, 0.989, 0.005));

    // The hourly tables and the narrow counts files carry the same numbers.
    const auto via_tables = report(model_table(t1), camera_table(t1));
    CHECK(via_tables.in.mean_diff == r1.in.mean_diff);
    const auto via_files = report(load_counts_series(PPE_SOURCE_DIR "/data/table1_aiml.csv"),
                                  load_counts_series(PPE_SOURCE_DIR "/data/table1_dahua.csv"));
    CHECK(*via_files.out.pearson_r == *r1.out.pearson_r);
}

TEST_CASE("fixture parsing errors") {
    CHECK_THROWS_AS(parse_day_fixture("Hour,05:00,Total\nDahua In,1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_day_fixture(""), ParseError);
    const auto a = parse_counts_series("hour,in,out\n05:00,1,2\n06:00,3,4\ntotal,4,6\n");
    const auto b = parse_counts_series("hour,in,out\n07:00,1,2\n08:00,3,4\n");
    CHECK(a.in.values == std::vector<std::int64_t>{1, 3});
    CHECK_THROWS_AS(report(a, b), LengthMismatch);
}

TEST_CASE("report output") {
    const auto t1 = fixture(1);
    const auto j = nlohmann::json::parse(report_json(report(t1)));
    CHECK(j.at("in").at("n") == 14);
    CHECK(j.at("in").at("degenerate") == false);
    CHECK(j.at("out").at("pearson_r").get<double>() > 0.99);

    DayFixture same = t1;
    same.camera_in = same.model_in;
    const auto dj = nlohmann::json::parse(report_json(report(same)));
    CHECK(dj.at("in").at("degenerate") == true);
    CHECK(dj.at("in").at("pearson_r").is_null());
    CHECK(format_report(report(t1)).find("In ") != std::string::npos);
}

}  // TEST_SUITE
