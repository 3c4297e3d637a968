#pragma once

// Pure states on CP^{D-1}, Hermitian observables as quadratic functions on
// the state manifold, and discrete geometric states (weighted point sets).

#include <cstddef>
#include <optional>
#include <vector>

#include "gqt/common.hpp"

namespace gqt {

/// A point of CP^{D-1}: a unit vector whose first component of (numerically)
/// largest modulus is real and nonnegative.
class ProjectiveState {
 public:
  /// Builds the canonical representative of the ray through `raw`.
  /// Throws DomainError for the zero vector or non-finite entries.
  static ProjectiveState from_amplitudes(const CVector& raw);

  /// Basis vector |k⟩ in dimension D.
  static ProjectiveState basis(std::size_t dim, std::size_t k);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  complex operator[](std::size_t k) const { return amplitudes_(static_cast<Eigen::Index>(k)); }

  /// ⟨this|other⟩.
  complex overlap(const ProjectiveState& other) const;
  /// |⟨this|other⟩|², the Fubini-Study cosine² of the ray distance.
  double fidelity(const ProjectiveState& other) const;

 private:
  explicit ProjectiveState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {}
  CVector amplitudes_;
};

ProjectiveState normalize_gauge(const CVector& raw);

/// True when the two states represent the same ray: 1 - |⟨a|b⟩|² <= tol.
bool same_ray(const ProjectiveState& a, const ProjectiveState& b, double tol = 1e-12);

/// Hermitian D×D matrix. The stored matrix is exactly Hermitian ((M + M†)/2 of
/// the validated input).
class HermitianObservable {
 public:
  explicit HermitianObservable(const CMatrix& m);

  static HermitianObservable identity(std::size_t dim);
  /// γx σx + γy σy + γz σz.
  static HermitianObservable pauli_sum(double gx, double gy, double gz);
  static HermitianObservable diagonal(const std::vector<double>& entries);

  const CMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

  HermitianObservable operator+(const HermitianObservable& o) const;
  HermitianObservable scaled(double s) const;

 private:
  CMatrix matrix_;
};

/// O(Z) = Σ O_{αβ} Z^α conj(Z^β) evaluated as ⟨ψ|O|ψ⟩.
double expectation(const HermitianObservable& obs, const ProjectiveState& state);
/// Same for a raw (not necessarily normalized) vector; returns ⟨v|O|v⟩.
double quadratic_form(const CMatrix& m, const CVector& v);

/// Hamiltonian with its eigendecomposition. Energies ascending.
class HamiltonianSystem {
 public:
  explicit HamiltonianSystem(HermitianObservable h);

  const HermitianObservable& observable() const noexcept { return observable_; }
  std::size_t dim() const noexcept { return observable_.dim(); }
  const std::vector<double>& energies() const noexcept { return energies_; }
  const std::vector<ProjectiveState>& eigenstates() const noexcept { return eigenstates_; }
  /// Columns are the eigenvectors, aligned with energies().
  const CMatrix& eigenvectors() const noexcept { return eigenvectors_; }

  double ground_energy() const noexcept { return energies_.front(); }
  double max_energy() const noexcept { return energies_.back(); }
  double spread() const noexcept { return energies_.back() - energies_.front(); }
  double min_gap() const noexcept { return min_gap_; }

  /// min_gap / spread; +inf for D = 1 or a zero spread with D = 1.
  double relative_min_gap() const noexcept;
  /// Throws DegeneracyError when relative_min_gap() < tol.
  void require_nondegenerate(double tol) const;

  /// exp(-i H t) built from the cached eigendecomposition.
  CMatrix propagator(double t) const;
  /// Σ_k E_k |E_k⟩⟨E_k|.
  CMatrix reconstruct() const;

 private:
  HermitianObservable observable_;
  std::vector<double> energies_;
  std::vector<ProjectiveState> eigenstates_;
  CMatrix eigenvectors_;
  double min_gap_;
};

struct WeightedState {
  double weight;
  ProjectiveState state;
};

/// Discrete geometric state: Σ_k w_k δ(Z - Z_k) on CP^{D-1}.
class WeightedStateEnsemble {
 public:
  explicit WeightedStateEnsemble(std::vector<WeightedState> entries);

  const std::vector<WeightedState>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t dim() const noexcept { return entries_.front().state.dim(); }

  /// Merges entries whose rays coincide (1 - fidelity <= tol), summing weights.
  WeightedStateEnsemble coalesced(double tol = 1e-12) const;

 private:
  std::vector<WeightedState> entries_;
};

/// Z^0 = sqrt(p_0), Z^k = sqrt(p_k) e^{i ν_k}, p_0 = 1 - Σ p_k.
struct ProbPhaseCoords {
  std::vector<double> probs;   // p_1 .. p_{D-1}
  std::vector<double> phases;  // ν_1 .. ν_{D-1} in [0, 2π)
};

ProbPhaseCoords to_prob_phase(const ProjectiveState& state);
ProjectiveState from_prob_phase(const ProbPhaseCoords& coords);

/// Columns of ψ^{αi} (rows α over A, columns i over B) become the conditional
/// states χ_i with weights p_i = Σ_α |ψ^{αi}|².
WeightedStateEnsemble bipartite_geometric_state(const CMatrix& psi_ab);

/// ρ^A = Tr_B |ψ⟩⟨ψ| = ψ ψ†.
CMatrix partial_trace_b(const CMatrix& psi_ab);

/// ρ = Σ_k w_k |ψ_k⟩⟨ψ_k|.
CMatrix ensemble_density_matrix(const WeightedStateEnsemble& ensemble);

}  // namespace gqt
