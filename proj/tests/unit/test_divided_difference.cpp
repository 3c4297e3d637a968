#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gqt/divided_difference.hpp"
#include "oracles.hpp"

using namespace gqt;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST(ExpDividedDifference, SingleNodeIsExp) {
  const std::vector<double> x{0.7};
  EXPECT_DOUBLE_EQ(exp_divided_difference(x), std::exp(0.7));
}

TEST(ExpDividedDifference, TwoNodesIsSecant) {
  const std::vector<double> x{-1.3, 2.1};
  EXPECT_NEAR(exp_divided_difference(x), (std::exp(2.1) - std::exp(-1.3)) / 3.4, 1e-14);
}

TEST(ExpDividedDifference, AgreesWithRecursionOnSeparatedNodes) {
  gqt::testing::Rng rng(21);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + trial % 6;
    std::vector<double> x;
    while (x.size() < m) {
      const double c = u(rng);
      bool far = true;
      for (double y : x) far = far && std::abs(c - y) > 0.5;
      if (far) x.push_back(c);
    }
    const std::vector<long double> xl(x.begin(), x.end());
    const long double ref = gqt::testing::recursive_exp_divided_difference(xl);
    EXPECT_NEAR(exp_divided_difference(x) / static_cast<double>(ref), 1.0, 1e-11) << "m=" << m;
  }
}

TEST(ExpDividedDifference, ConfluentNodesGiveTaylorCoefficient) {
  for (int n = 0; n <= 7; ++n) {
    for (double z : {-20.0, -1.0, 0.0, 0.5, 8.0}) {
      const std::vector<double> x(static_cast<std::size_t>(n + 1), z);
      EXPECT_NEAR(exp_divided_difference(x) / (std::exp(z) / factorial(n)), 1.0, 1e-13);
    }
  }
}

TEST(ExpDividedDifference, ContinuousAcrossNearCoincidence) {
  // As two nodes merge the value tends to the confluent limit.
  const double base = exp_divided_difference(std::vector<double>{0.0, 1.0, 1.0, 2.5});
  for (double eps : {1e-3, 1e-6, 1e-9, 1e-12}) {
    const double v = exp_divided_difference(std::vector<double>{0.0, 1.0, 1.0 + eps, 2.5});
    EXPECT_NEAR(v / base, 1.0, 4 * eps + 1e-14);
  }
}

TEST(ExpDividedDifference, StableAtLargeSpread) {
  // exp[-βE] for β·spread = 2000: the pole sum overflows; the value must be
  // positive and agree with the leading term analysis.
  std::vector<double> x{-2000.0, -1000.0, 0.0};
  const double v = exp_divided_difference(x);
  // exp[x0,x1,x2] ≈ e^{x2}/((x2-x0)(x2-x1)) when x2 dominates.
  EXPECT_NEAR(v / (1.0 / (2000.0 * 1000.0)), 1.0, 1e-12);
}

TEST(ExpDividedDifference, TableEntriesAreConsecutiveRuns) {
  const std::vector<double> x{-1.0, 0.3, 0.9, 2.0};
  const Eigen::MatrixXd t = exp_divided_difference_table(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i; j < x.size(); ++j) {
      const std::vector<double> run(x.begin() + static_cast<long>(i), x.begin() + static_cast<long>(j) + 1);
      EXPECT_NEAR(t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / exp_divided_difference(run), 1.0,
                  1e-13);
    }
  }
}

TEST(ExpDividedDifference, SymmetricInNodes) {
  std::vector<double> x{0.1, -2.0, 3.0, 0.6, 1.7};
  const double ref = exp_divided_difference(x);
  std::sort(x.begin(), x.end());
  do {
    EXPECT_NEAR(exp_divided_difference(x) / ref, 1.0, 1e-13);
  } while (std::next_permutation(x.begin(), x.end()));
}

TEST(TruncatedPowerSum, MatchesBSplineIdentity) {
  // Σ_k (x-a_k)_+^{n-1}/Π(a_j-a_k) = B-spline density / n (Curry–Schoenberg).
  gqt::testing::Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + trial % 5;  // n + 1 nodes
    const auto nodes = gqt::testing::random_spectrum(rng, m, 0.05);
    const int n = static_cast<int>(m) - 1;
    std::uniform_real_distribution<double> u(nodes.front(), nodes.back());
    for (int k = 0; k < 20; ++k) {
      const double x = u(rng);
      const double got = truncated_power_divided_sum(nodes, x, n - 1) * n;
      const double ref = gqt::testing::bspline_density(nodes, x);
      EXPECT_NEAR(got, ref, 1e-10 * std::max(1.0, ref)) << "m=" << m << " x=" << x;
    }
  }
}

TEST(TruncatedPowerSum, ZeroPowerUsesClosedIndicator) {
  // (y)_+^0 = [y >= 0]; at a node the jump is included.
  const std::vector<double> nodes{0.0, 1.0};
  EXPECT_DOUBLE_EQ(truncated_power_divided_sum(nodes, 0.5, 0), 1.0);
  EXPECT_DOUBLE_EQ(truncated_power_divided_sum(nodes, 0.0, 0), 1.0);
  EXPECT_DOUBLE_EQ(truncated_power_divided_sum(nodes, -0.1, 0), 0.0);
}
