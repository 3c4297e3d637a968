#pragma once

// Reference implementations used only by the tests. Each one computes its
// quantity by a route that shares no code with the library.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "gqt/statespace.hpp"

namespace gqt::testing {

using Rng = std::mt19937_64;

/// Sorted spectrum of size D in [-2, 2] whose gaps all exceed min_gap * spread.
std::vector<double> random_spectrum(Rng& rng, std::size_t dim, double min_gap = 0.05);

/// Haar-ish unitary from the QR decomposition of a complex Gaussian matrix.
CMatrix random_unitary(Rng& rng, std::size_t dim);

/// U diag(energies) U† for a random U.
HermitianObservable random_hamiltonian(Rng& rng, const std::vector<double>& energies);

/// Unnormalized complex Gaussian vector.
CVector random_vector(Rng& rng, std::size_t dim);

/// Divided difference of exp over the nodes by the textbook recursion in
/// long double. Only trustworthy for well-separated nodes.
long double recursive_exp_divided_difference(const std::vector<long double>& nodes);

/// Normalized B-spline M(x; knots) (unit integral), by Cox–de Boor recursion.
/// For p uniform on the simplex, Σ E_k p_k has exactly this density.
double bspline_density(std::vector<double> knots, double x);

struct Fraction {
  double value;
  double std_error;
  std::size_t hits;
  std::size_t n;
};

/// Fraction of points of Δ_n = {x >= 0, Σx <= 1} with a·x <= t, by rejection
/// from the unit cube; n accepted points.
Fraction simplex_section_fraction_mc(const std::vector<double>& a, double t, std::size_t n, Rng& rng);

/// One-sample Kolmogorov–Smirnov p-value against a continuous CDF.
double ks_pvalue(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Upper tail of the χ² distribution.
double chi2_pvalue(double statistic, double dof);

/// Pearson χ² homogeneity statistic for two histograms with equal totals;
/// returns the p-value using (bins - 1) degrees of freedom over nonempty bins.
double two_sample_chi2_pvalue(const std::vector<double>& a, const std::vector<double>& b);

/// ∫ f dV_FS over CP^1 in the chart Z = (sqrt(1-q), sqrt(q) e^{iχ}),
/// dV = dq dχ / 2, by a composite tensor Gauss–Legendre rule.
double integrate_cp1(const std::function<double(const CVector&)>& f);

}  // namespace gqt::testing
