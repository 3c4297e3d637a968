#pragma once

// Geometric canonical ensemble p_β(Z) = e^{-β h(Z)} / Q_β on CP^{D-1} and
// the Gibbs ensemble written as a discrete geometric state.

#include <vector>

#include "gqt/statespace.hpp"
#include "gqt/volumes.hpp"

namespace gqt {

/// A Hamiltonian at inverse temperature β with a fixed measure convention.
/// Negative β is representable (for the Monte Carlo path) but the closed
/// forms below reject it.
class CanonicalState {
 public:
  CanonicalState(HamiltonianSystem sys, double beta,
                 MeasureConvention conv = MeasureConvention::raw);

  const HamiltonianSystem& system() const noexcept { return sys_; }
  double beta() const noexcept { return beta_; }
  MeasureConvention convention() const noexcept { return conv_; }
  bool closed_form() const noexcept { return beta_ >= 0.0; }
  /// log Q_β; NaN when closed_form() is false.
  double log_partition() const noexcept { return log_q_; }

 private:
  HamiltonianSystem sys_;
  double beta_;
  MeasureConvention conv_;
  double log_q_;
};

struct ThermoReport {
  double Q;      // partition function (may overflow to inf; see log_Q)
  double log_Q;
  double F;      // -log(Q)/β; NaN at β = 0
  double U;      // ∫ p_β h dV
  double Hq;     // -∫ p_β log p_β dV = β U + log Q
  double var_h;  // ∫ p_β (h - U)² dV
};

double log_partition_function(const HamiltonianSystem& sys, double beta,
                              MeasureConvention conv = MeasureConvention::raw);
double partition_function(const HamiltonianSystem& sys, double beta,
                          MeasureConvention conv = MeasureConvention::raw);

ThermoReport thermo_report(const HamiltonianSystem& sys, double beta,
                           MeasureConvention conv = MeasureConvention::raw);

/// Eigenbasis occupations w_k = ∫ p_β |⟨E_k|ψ⟩|² dV (sum to 1).
std::vector<double> canonical_occupations(const HamiltonianSystem& sys, double beta);

/// First moment ∫ p_β |ψ⟩⟨ψ| dV = Σ_k w_k |E_k⟩⟨E_k|. Any observable's
/// geometric-canonical mean is Tr of this matrix times the observable.
CMatrix geometric_density_matrix(const HamiltonianSystem& sys, double beta);

/// ∫ p_β ⟨ψ|O|ψ⟩ dV.
double canonical_expectation(const HamiltonianSystem& sys, const HermitianObservable& obs,
                             double beta);

/// p_β(Z) with respect to the state's convention's volume element.
double canonical_density(const ProjectiveState& state, const CanonicalState& cs);

/// Entries at the eigenstates with weights e^{-β E_k} / Σ_j e^{-β E_j}.
WeightedStateEnsemble gibbs_ensemble(const HamiltonianSystem& sys, double beta);

/// e^{-βH} / Tr e^{-βH}.
CMatrix gibbs_density_matrix(const HamiltonianSystem& sys, double beta);

}  // namespace gqt
