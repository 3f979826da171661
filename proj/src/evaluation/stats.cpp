#include "ppe/evaluation/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ppe/core/errors.hpp"

namespace ppe {

void CountSeries::validate() const {
    if (!labels.empty() && labels.size() != values.size())
        throw LengthMismatch("series has " + std::to_string(labels.size()) + " labels but " +
                             std::to_string(values.size()) + " values");
    for (auto v : values)
        if (v < 0) throw std::invalid_argument("count series values must be non-negative");
}

std::vector<double> to_doubles(const CountSeries& s) { return {s.values.begin(), s.values.end()}; }

std::vector<double> differences(const CountSeries& a, const CountSeries& b) {
    a.validate();
    b.validate();
    if (a.size() != b.size())
        throw LengthMismatch("series lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(b.values[i] - a.values[i]);
    return d;
}

double mean_diff(const CountSeries& a, const CountSeries& b) {
    const auto d = differences(a, b);
    if (d.empty()) throw LengthMismatch("mean_diff of empty series");
    return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) throw InsufficientData("sample_std needs at least two values");
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("pearson inputs differ in length");
    if (x.size() < 2) throw InsufficientData("pearson needs at least two pairs");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ZeroVariance("pearson undefined for a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson(const CountSeries& a, const CountSeries& b) {
    a.validate();
    b.validate();
    const auto x = to_doubles(a);
    const auto y = to_doubles(b);
    return pearson(std::span<const double>(x), std::span<const double>(y));
}

namespace {

// Lentz's continued fraction for the incomplete beta function.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("incomplete_beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double pearson_p_value(double r, std::size_t n) {
    if (n < 3) throw InsufficientData("p-value needs at least three pairs");
    if (!(std::fabs(r) <= 1.0)) throw std::invalid_argument("correlation outside [-1, 1]");
    if (std::fabs(r) == 1.0) return 0.0;
    const double df = static_cast<double>(n - 2);
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return std::clamp(student_t_two_sided(t, df), 0.0, 1.0);
}

StatsReport compare(const CountSeries& a, const CountSeries& b) {
    const auto d = differences(a, b);
    StatsReport rep;
    rep.n = d.size();
    rep.mean_diff = mean_diff(a, b);
    rep.sample_std = sample_std(d);
    // Identical series carry no comparison signal; the correlation is left undefined.
    if (rep.sample_std == 0.0) return rep;
    try {
        rep.pearson_r = pearson(a, b);
    } catch (const ZeroVariance&) {
        return rep;
    }
    if (rep.n >= 3) rep.p_value = pearson_p_value(*rep.pearson_r, rep.n);
    return rep;
}

}  // namespace ppe
