#include "gqt/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gqt/divided_difference.hpp"

namespace gqt {

namespace {

// Beyond this value of β (E_1 - E_0) every non-ground pole of the closed form
// is below e^{-800} relative to the ground pole and is dropped.
constexpr double kDominantPoleThreshold = 800.0;

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

struct Moments {
  double log_q_normalized;  // log of Q in the normalized convention
  std::vector<double> occupations;
  double mean;
  double variance;
};

void require_closed_form(const HamiltonianSystem& sys, double beta) {
  if (sys.dim() < 2) throw DomainError("canonical ensemble needs D >= 2");
  if (!std::isfinite(beta)) throw DomainError("beta must be finite");
  if (beta < 0.0) {
    throw DomainError("closed-form canonical quantities need beta >= 0; use the Monte Carlo path");
  }
  sys.require_nondegenerate(tolerances().degeneracy);
}

// Q_norm(β) = n! exp[-βE_0, ..., -βE_n]. Shifting by E_0 gives nodes
// y_k = -β(E_k - E_0) <= 0 and Q_norm = n! e^{-βE_0} exp[y].
// ∂ exp[y] / ∂y_k = exp[y, y_k], so the occupations are
// w_k = exp[y, y_k] / exp[y] and U = Σ E_k w_k, a convex combination.
Moments compute_moments(const HamiltonianSystem& sys, double beta, bool with_variance) {
  require_closed_form(sys, beta);
  const std::vector<double>& e = sys.energies();
  const std::size_t d = e.size();
  const std::size_t n = d - 1;
  const double e0 = e.front();

  Moments m;
  m.occupations.assign(d, 0.0);

  if (beta * (e[1] - e0) > kDominantPoleThreshold) {
    double log_prod = 0.0;
    double tail = 0.0;
    for (std::size_t j = 1; j < d; ++j) {
      const double x = beta * (e[j] - e0);
      log_prod += std::log(x);
      m.occupations[j] = 1.0 / x;
      tail += m.occupations[j];
    }
    m.occupations[0] = 1.0 - tail;
    m.log_q_normalized = log_factorial(n) - beta * e0 - log_prod;
    m.mean = e0 + static_cast<double>(n) / beta;
    m.variance = static_cast<double>(n) / (beta * beta);
    return m;
  }

  std::vector<double> y(d);
  for (std::size_t k = 0; k < d; ++k) y[k] = -beta * (e[k] - e0);
  const double base = exp_divided_difference(y);
  m.log_q_normalized = log_factorial(n) + std::log(base) - beta * e0;

  std::vector<double> nodes(y);
  nodes.push_back(0.0);
  double wsum = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    nodes.back() = y[k];
    m.occupations[k] = exp_divided_difference(nodes) / base;
    wsum += m.occupations[k];
  }
  CompensatedSum mean;
  for (std::size_t k = 0; k < d; ++k) {
    m.occupations[k] /= wsum;
    mean.add(m.occupations[k] * (e[k] - e0));
  }
  m.mean = e0 + mean.value();

  m.variance = 0.0;
  if (with_variance) {
    // ∂²exp[y]/∂y_k∂y_l = exp[y, y_k, y_l] for k != l and 2 exp[y, y_k, y_k]
    // for k = l. Centering at U keeps the quadratic form well conditioned.
    std::vector<double> nodes2(y);
    nodes2.push_back(0.0);
    nodes2.push_back(0.0);
    CompensatedSum var;
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t l = k; l < d; ++l) {
        nodes2[d] = y[k];
        nodes2[d + 1] = y[l];
        // Diagonal terms carry the factor 2 of the repeated node; off-diagonal
        // terms appear as (k, l) and (l, k). Both give 2·c.
        const double c = exp_divided_difference(nodes2) / base;
        var.add(2.0 * c * (e[k] - m.mean) * (e[l] - m.mean));
      }
    }
    m.variance = std::max(0.0, var.value());
  }
  return m;
}

double convention_log_offset(std::size_t dim, MeasureConvention conv) {
  // log(Vol_conv) - log(Vol_normalized)
  return std::log(total_volume(dim, conv));
}

}  // namespace

CanonicalState::CanonicalState(HamiltonianSystem sys, double beta, MeasureConvention conv)
    : sys_(std::move(sys)), beta_(beta), conv_(conv),
      log_q_(std::numeric_limits<double>::quiet_NaN()) {
  if (!std::isfinite(beta_)) throw DomainError("beta must be finite");
  if (closed_form()) log_q_ = log_partition_function(sys_, beta_, conv_);
}

double log_partition_function(const HamiltonianSystem& sys, double beta, MeasureConvention conv) {
  const Moments m = compute_moments(sys, beta, false);
  return m.log_q_normalized + convention_log_offset(sys.dim(), conv);
}

double partition_function(const HamiltonianSystem& sys, double beta, MeasureConvention conv) {
  return std::exp(log_partition_function(sys, beta, conv));
}

ThermoReport thermo_report(const HamiltonianSystem& sys, double beta, MeasureConvention conv) {
  const Moments m = compute_moments(sys, beta, true);
  ThermoReport r{};
  r.log_Q = m.log_q_normalized + convention_log_offset(sys.dim(), conv);
  r.Q = std::exp(r.log_Q);
  r.U = m.mean;
  r.var_h = m.variance;
  r.F = beta > 0.0 ? -r.log_Q / beta : std::numeric_limits<double>::quiet_NaN();
  r.Hq = beta * r.U + r.log_Q;
  return r;
}

std::vector<double> canonical_occupations(const HamiltonianSystem& sys, double beta) {
  return compute_moments(sys, beta, false).occupations;
}

CMatrix geometric_density_matrix(const HamiltonianSystem& sys, double beta) {
  const std::vector<double> w = canonical_occupations(sys, beta);
  const CMatrix& v = sys.eigenvectors();
  Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  CMatrix rho = v * wv.cast<complex>().asDiagonal() * v.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

double canonical_expectation(const HamiltonianSystem& sys, const HermitianObservable& obs,
                             double beta) {
  if (obs.dim() != sys.dim()) throw DomainError("observable/Hamiltonian dimension mismatch");
  return std::real((geometric_density_matrix(sys, beta) * obs.matrix()).trace());
}

double canonical_density(const ProjectiveState& state, const CanonicalState& cs) {
  if (!cs.closed_form()) throw DomainError("canonical density needs beta >= 0");
  const double h = expectation(cs.system().observable(), state);
  return std::exp(-cs.beta() * h - cs.log_partition());
}

namespace {

std::vector<double> boltzmann_weights(const std::vector<double>& e, double beta) {
  if (!std::isfinite(beta)) throw DomainError("beta must be finite");
  // Shift by the dominant exponent so that e^{...} <= 1.
  const double ref = beta >= 0.0 ? e.front() : e.back();
  std::vector<double> w(e.size());
  double z = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    w[k] = std::exp(-beta * (e[k] - ref));
    z += w[k];
  }
  for (double& x : w) x /= z;
  return w;
}

}  // namespace

WeightedStateEnsemble gibbs_ensemble(const HamiltonianSystem& sys, double beta) {
  const std::vector<double> w = boltzmann_weights(sys.energies(), beta);
  std::vector<WeightedState> entries;
  entries.reserve(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) entries.push_back({w[k], sys.eigenstates()[k]});
  return WeightedStateEnsemble(std::move(entries));
}

CMatrix gibbs_density_matrix(const HamiltonianSystem& sys, double beta) {
  const std::vector<double> w = boltzmann_weights(sys.energies(), beta);
  const CMatrix& v = sys.eigenvectors();
  Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  CMatrix rho = v * wv.cast<complex>().asDiagonal() * v.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace gqt
