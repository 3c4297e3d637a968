#include "gqt/volumes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>


namespace gqt {

namespace {

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

std::vector<double> negated(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return -x; });
  return out;
}

void require_distinct(const std::vector<double>& sorted_nodes, const char* what) {
  const double spread = sorted_nodes.back() - sorted_nodes.front();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < sorted_nodes.size(); ++k) {
    gap = std::min(gap, sorted_nodes[k] - sorted_nodes[k - 1]);
  }
  const double tol = tolerances().degeneracy * spread;
  if (!(spread > 0.0) || gap <= tol) throw DegeneracyError(what, gap, tol);
}

// Order-k B-spline basis values N_{i,k}(x), i = 0..len-k-1, over the
// nondecreasing knots t by the Cox–de Boor recurrence with 0/0 := 0. Every
// term is nonnegative, so there is no cancellation.
std::vector<double> bspline_basis(const std::vector<double>& t, double x, std::size_t k) {
  std::vector<double> b(t.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) b[i] = (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
  for (std::size_t order = 2; order <= k; ++order) {
    for (std::size_t i = 0; i + order < t.size(); ++i) {
      double v = 0.0;
      const double dl = t[i + order - 1] - t[i];
      const double dr = t[i + order] - t[i + 1];
      if (dl > 0.0) v += (x - t[i]) / dl * b[i];
      if (dr > 0.0) v += (t[i + order] - x) / dr * b[i + 1];
      b[i] = v;
    }
  }
  b.resize(t.size() - k);
  return b;
}

// P(Σ_k p_k x_k <= x) for p uniform on the probability simplex over the
// given distinct nodes: the integral of the B-spline with these knots,
// written as Σ_{i<=n} N_{i,n+1}(x) over the knots padded with n+1 copies of
// the right end. Evaluated from the closer end of the support.
double sublevel_fraction(const std::vector<double>& nodes, double x) {
  const auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end());
  if (x <= *lo) return 0.0;
  if (x >= *hi) return 1.0;
  const bool mirror = x > 0.5 * (*lo + *hi);
  std::vector<double> t = mirror ? negated(nodes) : nodes;
  std::sort(t.begin(), t.end());
  const std::size_t n = t.size() - 1;
  t.insert(t.end(), n + 1, t.back());
  const std::vector<double> b = bspline_basis(t, mirror ? -x : x, n + 1);
  double f = 0.0;
  for (std::size_t i = 0; i <= n; ++i) f += b[i];
  f = std::clamp(f, 0.0, 1.0);
  return mirror ? 1.0 - f : f;
}

// d/dx sublevel_fraction: the normalized B-spline n N_{0,n}(x) / (t_n - t_0).
double level_density(const std::vector<double>& nodes, double x) {
  const auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end());
  if (x < *lo || x > *hi) return 0.0;
  const bool mirror = x > 0.5 * (*lo + *hi);
  std::vector<double> t = mirror ? negated(nodes) : nodes;
  std::sort(t.begin(), t.end());
  const std::size_t n = t.size() - 1;
  const double w = bspline_basis(t, mirror ? -x : x, n)[0];
  return static_cast<double>(n) * w / (t.back() - t.front());
}

std::vector<double> section_nodes(const SimplexSection& section) {
  if (section.a.empty()) throw DomainError("simplex section needs n >= 1");
  if (!std::isfinite(section.t)) throw DomainError("section threshold must be finite");
  std::vector<double> nodes;
  nodes.reserve(section.a.size() + 1);
  nodes.push_back(0.0);
  for (double a : section.a) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("section normal entries must lie in [0, 1]");
    nodes.push_back(a);
  }
  std::vector<double> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  require_distinct(sorted, "coincident simplex section normals");
  return nodes;
}

void require_spectrum(const HamiltonianSystem& sys) {
  if (sys.dim() < 2) throw DomainError("state-space volumes need D >= 2");
  require_distinct(sys.energies(), "degenerate spectrum");
}

}  // namespace

double total_volume(std::size_t dim, MeasureConvention conv) {
  if (dim < 1) throw DomainError("dimension must be positive");
  if (conv == MeasureConvention::normalized) return 1.0;
  const std::size_t n = dim - 1;
  return std::pow(kPi, static_cast<double>(n)) / factorial(n);
}

const char* to_string(MeasureConvention conv) {
  return conv == MeasureConvention::raw ? "raw" : "normalized";
}

double simplex_section_volume(const SimplexSection& section) {
  const std::vector<double> nodes = section_nodes(section);
  const std::size_t n = section.a.size();
  return sublevel_fraction(nodes, section.t) / factorial(n);
}

double simplex_section_area(const SimplexSection& section) {
  const std::vector<double> nodes = section_nodes(section);
  const std::size_t n = section.a.size();
  return level_density(nodes, section.t) / factorial(n);
}

ClampedShell clamp_shell(const HamiltonianSystem& sys, const EnergyShell& shell) {
  if (!(shell.width > 0.0) || !std::isfinite(shell.width) || !std::isfinite(shell.energy)) {
    throw DomainError("energy shell needs a finite energy and a positive width");
  }
  ClampedShell out;
  const double lo = std::max(shell.energy, sys.ground_energy());
  const double hi = std::min(shell.energy + shell.width, sys.max_energy());
  out.clamped = lo != shell.energy || hi != shell.energy + shell.width;
  out.shell = {lo, std::max(0.0, hi - lo)};
  out.wide = shell.width > 0.1 * sys.spread();
  return out;
}

double cumulative_volume(const HamiltonianSystem& sys, double energy, MeasureConvention conv) {
  require_spectrum(sys);
  if (!std::isfinite(energy)) throw DomainError("energy must be finite");
  return total_volume(sys.dim(), conv) * sublevel_fraction(sys.energies(), energy);
}

double density_of_states(const HamiltonianSystem& sys, double energy, MeasureConvention conv) {
  require_spectrum(sys);
  if (!std::isfinite(energy)) throw DomainError("energy must be finite");
  return total_volume(sys.dim(), conv) * level_density(sys.energies(), energy);
}

double microcanonical_weight(const HamiltonianSystem& sys, const EnergyShell& shell,
                             MeasureConvention conv) {
  const ClampedShell c = clamp_shell(sys, shell);
  if (c.shell.width <= 0.0) return 0.0;
  const double w = cumulative_volume(sys, c.shell.energy + c.shell.width, conv) -
                   cumulative_volume(sys, c.shell.energy, conv);
  return std::max(w, 0.0);
}

Entropy statistical_entropy(const HamiltonianSystem& sys, const EnergyShell& shell,
                            MeasureConvention conv) {
  const double w = microcanonical_weight(sys, shell, conv);
  if (!(w > 0.0)) return {-std::numeric_limits<double>::infinity(), true};
  return {std::log(w), false};
}

}  // namespace gqt
