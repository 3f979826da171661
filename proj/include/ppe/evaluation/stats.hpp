#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppe/core/types.hpp"

namespace ppe {

struct CountSeries {
    std::vector<std::string> labels;
    std::vector<std::int64_t> values;

    /// Throws LengthMismatch or std::invalid_argument on negative values.
    void validate() const;
    std::size_t size() const noexcept { return values.size(); }
};

/// Elementwise b - a.
std::vector<double> differences(const CountSeries& a, const CountSeries& b);

/// Mean of b - a. Throws LengthMismatch on unequal or empty series.
double mean_diff(const CountSeries& a, const CountSeries& b);

/// Bessel-corrected standard deviation. Throws InsufficientData for n < 2.
double sample_std(std::span<const double> xs);

/// Product-moment correlation. Throws LengthMismatch, InsufficientData (n < 2)
/// or ZeroVariance when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(const CountSeries& a, const CountSeries& b);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

/// Two-sided p for H0: rho = 0. Requires n >= 3 and |r| < 1; |r| == 1 gives 0.
double pearson_p_value(double r, std::size_t n);

/// Model series `a` against camera series `b`.
StatsReport compare(const CountSeries& a, const CountSeries& b);

std::vector<double> to_doubles(const CountSeries& s);

}  // namespace ppe
