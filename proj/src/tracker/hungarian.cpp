#include "ppe/tracker/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppe/core/errors.hpp"

namespace ppe {
namespace {

/// Solves rows <= cols; returns col index assigned to each row.
std::vector<int> solve_wide(const CostMatrix& a) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(a.cols());
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; p[j] = row matched to column j (0 = none)
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

struct Solved {
    Assignment result;
    int forbidden_used = 0;
};

Solved solve(const CostMatrix& cost) {
    const auto rows = static_cast<int>(cost.rows());
    const auto cols = static_cast<int>(cost.cols());
    Solved s;
    if (rows == 0 || cols == 0) {
        for (int i = 0; i < rows; ++i) s.result.unassigned_rows.push_back(i);
        for (int j = 0; j < cols; ++j) s.result.unassigned_cols.push_back(j);
        return s;
    }

    double max_abs = 0.0;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double c = cost(i, j);
            if (std::isnan(c) || c == -std::numeric_limits<double>::infinity())
                throw std::invalid_argument("cost matrix contains NaN or -inf");
            if (std::isfinite(c)) max_abs = std::max(max_abs, std::fabs(c));
        }
    // Any single forbidden pair must outweigh every possible difference in finite cost.
    const double big = 4.0 * (std::min(rows, cols) + 1) * (max_abs + 1.0);

    const bool transpose = rows > cols;
    CostMatrix work = transpose ? CostMatrix(cost.transpose()) : cost;
    for (Eigen::Index i = 0; i < work.size(); ++i)
        if (!std::isfinite(work.data()[i])) work.data()[i] = big;

    const auto match = solve_wide(work);
    std::vector<char> row_used(rows, false), col_used(cols, false);
    for (int k = 0; k < static_cast<int>(match.size()); ++k) {
        if (match[k] < 0) continue;
        const int r = transpose ? match[k] : k;
        const int c = transpose ? k : match[k];
        if (!std::isfinite(cost(r, c))) {
            ++s.forbidden_used;
            continue;
        }
        s.result.pairs.emplace_back(r, c);
        s.result.cost += cost(r, c);
        row_used[r] = col_used[c] = true;
    }
    std::sort(s.result.pairs.begin(), s.result.pairs.end());
    for (int i = 0; i < rows; ++i)
        if (!row_used[i]) s.result.unassigned_rows.push_back(i);
    for (int j = 0; j < cols; ++j)
        if (!col_used[j]) s.result.unassigned_cols.push_back(j);
    return s;
}

}  // namespace

Assignment hungarian(const CostMatrix& cost) {
    auto s = solve(cost);
    if (s.forbidden_used > 0)
        throw InfeasibleAssignment("every complete matching uses a forbidden pair");
    return std::move(s.result);
}

Assignment hungarian_partial(const CostMatrix& cost) { return solve(cost).result; }

}  // namespace ppe
