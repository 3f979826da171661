#pragma once

#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace ppe {

using CostMatrix = Eigen::MatrixXd;

/// Cost marking a pair that must not be assigned.
inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

struct Assignment {
    std::vector<std::pair<int, int>> pairs;  ///< (row, col), ascending by row
    std::vector<int> unassigned_rows;
    std::vector<int> unassigned_cols;
    double cost = 0.0;
};

/// Minimum-cost matching of size min(rows, cols) (Kuhn-Munkres with
/// potentials, O(n^2 m)). Throws InfeasibleAssignment when every matching of
/// that size uses a forbidden pair, std::invalid_argument on NaN or -inf.
Assignment hungarian(const CostMatrix& cost);

/// Like hungarian() but never fails: maximises the number of allowed pairs,
/// then minimises their cost. Forbidden pairs are reported as unassigned.
Assignment hungarian_partial(const CostMatrix& cost);

}  // namespace ppe
