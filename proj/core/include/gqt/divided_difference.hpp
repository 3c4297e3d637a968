#pragma once

// Divided-difference kernels behind the closed-form ensemble volumes and
// partition functions.

#include <span>

#include "gqt/common.hpp"

namespace gqt {

/// Upper-triangular table T with T(i, j) = exp[x_i, ..., x_j], the divided
/// differences of the exponential over consecutive node runs. Nodes may repeat
/// (confluent case). Evaluated on the Opitz matrix by scaling and squaring:
/// all entries are positive, so the squaring phase involves no cancellation.
Eigen::MatrixXd exp_divided_difference_table(std::span<const double> nodes);

/// exp[x_0, ..., x_n].
double exp_divided_difference(std::span<const double> nodes);

/// Σ_k (x - a_k)_+^m / Π_{j≠k} (a_j - a_k) over distinct nodes a_k, with
/// (y)_+^0 = [y >= 0]. Terms are accumulated with compensated summation in
/// decreasing order of (x - a_k)_+.
double truncated_power_divided_sum(std::span<const double> nodes, double x, int power);

}  // namespace gqt
