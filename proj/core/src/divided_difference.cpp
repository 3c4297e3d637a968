#include "gqt/divided_difference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace gqt {

namespace {

constexpr int kTaylorTerms = 32;
constexpr double kScaledRadius = 0.5;

}  // namespace

Eigen::MatrixXd exp_divided_difference_table(std::span<const double> nodes) {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  if (m == 0) throw DomainError("divided difference needs at least one node");
  double radius = 0.0;
  for (double x : nodes) {
    if (!std::isfinite(x)) throw DomainError("divided difference node is not finite");
    radius = std::max(radius, std::abs(x));
  }
  int squarings = 0;
  if (radius > kScaledRadius) {
    squarings = static_cast<int>(std::ceil(std::log2(radius / kScaledRadius)));
  }
  const double scale = std::ldexp(1.0, -squarings);

  std::vector<double> z(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) z[k] = nodes[k] * scale;

  const int max_order = kTaylorTerms + static_cast<int>(m);
  std::vector<double> inv_fact(static_cast<std::size_t>(max_order) + 1);
  inv_fact[0] = 1.0;
  for (int k = 1; k <= max_order; ++k) inv_fact[static_cast<std::size_t>(k)] = inv_fact[static_cast<std::size_t>(k - 1)] / k;

  // exp[z_i..z_j] = Σ_k h_k(z_i..z_j) / (k + j - i)!, h_k complete homogeneous.
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> h(kTaylorTerms + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    h[0] = 1.0;
    for (int k = 1; k <= kTaylorTerms; ++k) h[static_cast<std::size_t>(k)] = h[static_cast<std::size_t>(k - 1)] * z[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i; j < m; ++j) {
      if (j > i) {
        const double zj = z[static_cast<std::size_t>(j)];
        for (int k = 1; k <= kTaylorTerms; ++k) h[static_cast<std::size_t>(k)] += zj * h[static_cast<std::size_t>(k - 1)];
      }
      const auto n = static_cast<std::size_t>(j - i);
      double acc = 0.0;
      for (int k = kTaylorTerms; k >= 0; --k) acc += h[static_cast<std::size_t>(k)] * inv_fact[static_cast<std::size_t>(k) + n];
      table(i, j) = acc;
    }
  }

  // exp[x_i..x_j] = 2^{-(j-i)} Σ_k exp[x_i..x_k / 2] exp[x_k..x_j / 2].
  Eigen::MatrixXd next(m, m);
  for (int s = 0; s < squarings; ++s) {
    next.setZero();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        double acc = 0.0;
        for (Eigen::Index k = i; k <= j; ++k) acc += table(i, k) * table(k, j);
        next(i, j) = std::ldexp(acc, -static_cast<int>(j - i));
      }
    }
    table.swap(next);
  }
  return table;
}

double exp_divided_difference(std::span<const double> nodes) {
  const Eigen::MatrixXd t = exp_divided_difference_table(nodes);
  return t(0, t.cols() - 1);
}

double truncated_power_divided_sum(std::span<const double> nodes, double x, int power) {
  if (nodes.empty()) throw DomainError("truncated power sum needs at least one node");
  if (power < 0) throw DomainError("truncated power exponent must be nonnegative");
  const std::size_t n = nodes.size();
  struct Term {
    double base;
    double value;
  };
  std::vector<Term> terms;
  terms.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double base = x - nodes[k];
    const bool active = power == 0 ? base >= 0.0 : base > 0.0;
    if (!active) continue;
    double denom = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) denom *= nodes[j] - nodes[k];
    }
    terms.push_back({base, std::pow(base, power) / denom});
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.base > b.base; });
  CompensatedSum sum;
  for (const auto& t : terms) sum.add(t.value);
  return sum.value();
}

}  // namespace gqt
