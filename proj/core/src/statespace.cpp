#include "gqt/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>

namespace gqt {

namespace {

double wrap_phase(double nu) {
  double w = std::fmod(nu, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  if (w >= 2.0 * kPi) w = 0.0;
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------
// ProjectiveState

ProjectiveState ProjectiveState::from_amplitudes(const CVector& raw) {
  if (raw.size() == 0) throw DomainError("state vector must be nonempty");
  if (!raw.allFinite()) throw DomainError("state vector has non-finite entries");
  const double norm = raw.norm();
  if (!(norm > 0.0)) throw DomainError("cannot normalize the zero vector");

  // First component whose modulus is within round-off of the maximum, so that
  // exactly tied moduli pick a stable index.
  const double max_mod = raw.cwiseAbs().maxCoeff();
  Eigen::Index lead = 0;
  for (Eigen::Index k = 0; k < raw.size(); ++k) {
    if (std::abs(raw(k)) >= max_mod * (1.0 - 1e-12)) {
      lead = k;
      break;
    }
  }
  const complex phase = std::conj(raw(lead)) / std::abs(raw(lead));
  CVector z = raw * (phase / norm);
  z(lead) = complex(std::abs(z(lead)), 0.0);
  // One renormalization pass pins ‖z‖ to the last ulp.
  z /= z.norm();
  return ProjectiveState(std::move(z));
}

ProjectiveState ProjectiveState::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) throw DomainError("basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return ProjectiveState(std::move(v));
}

complex ProjectiveState::overlap(const ProjectiveState& other) const {
  if (other.dim() != dim()) throw DomainError("overlap: dimension mismatch");
  return amplitudes_.dot(other.amplitudes_);
}

double ProjectiveState::fidelity(const ProjectiveState& other) const {
  return std::norm(overlap(other));
}

ProjectiveState normalize_gauge(const CVector& raw) { return ProjectiveState::from_amplitudes(raw); }

bool same_ray(const ProjectiveState& a, const ProjectiveState& b, double tol) {
  return a.dim() == b.dim() && 1.0 - a.fidelity(b) <= tol;
}

// ---------------------------------------------------------------------------
// HermitianObservable

HermitianObservable::HermitianObservable(const CMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw DomainError("observable must be a nonempty square matrix");
  }
  if (!m.allFinite()) throw DomainError("observable has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tolerances().hermiticity * scale) {
    throw DomainError("matrix is not Hermitian (max |M - M†| = " + std::to_string(asym) + ")");
  }
  matrix_ = 0.5 * (m + m.adjoint());
}

HermitianObservable HermitianObservable::identity(std::size_t dim) {
  return HermitianObservable(CMatrix::Identity(static_cast<Eigen::Index>(dim),
                                               static_cast<Eigen::Index>(dim)));
}

HermitianObservable HermitianObservable::pauli_sum(double gx, double gy, double gz) {
  CMatrix m(2, 2);
  m << complex(gz, 0.0), complex(gx, -gy), complex(gx, gy), complex(-gz, 0.0);
  return HermitianObservable(m);
}

HermitianObservable HermitianObservable::diagonal(const std::vector<double>& entries) {
  const auto n = static_cast<Eigen::Index>(entries.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = entries[static_cast<std::size_t>(k)];
  return HermitianObservable(m);
}

HermitianObservable HermitianObservable::operator+(const HermitianObservable& o) const {
  if (o.dim() != dim()) throw DomainError("observable sum: dimension mismatch");
  return HermitianObservable(matrix_ + o.matrix_);
}

HermitianObservable HermitianObservable::scaled(double s) const {
  return HermitianObservable(matrix_ * s);
}

double quadratic_form(const CMatrix& m, const CVector& v) {
  return std::real(v.dot(m * v));
}

double expectation(const HermitianObservable& obs, const ProjectiveState& state) {
  if (obs.dim() != state.dim()) {
    throw DomainError("expectation: observable is " + std::to_string(obs.dim()) +
                      "-dimensional, state is " + std::to_string(state.dim()));
  }
  return quadratic_form(obs.matrix(), state.amplitudes());
}

// ---------------------------------------------------------------------------
// HamiltonianSystem

HamiltonianSystem::HamiltonianSystem(HermitianObservable h) : observable_(std::move(h)) {
  const CMatrix& m = observable_.matrix();
  const auto n = m.rows();
  energies_.resize(static_cast<std::size_t>(n));
  eigenvectors_.resize(n, n);
  eigenstates_.reserve(static_cast<std::size_t>(n));
  const CMatrix off = m - CMatrix(m.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() == 0.0) {
    // Already diagonal: keep the entries bit-exact (the solver rescales).
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return m(a, a).real() < m(b, b).real(); });
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index i = order[static_cast<std::size_t>(k)];
      energies_[static_cast<std::size_t>(k)] = m(i, i).real();
      eigenstates_.push_back(ProjectiveState::basis(static_cast<std::size_t>(n), static_cast<std::size_t>(i)));
      eigenvectors_.col(k) = eigenstates_.back().amplitudes();
    }
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
    for (Eigen::Index k = 0; k < n; ++k) {
      energies_[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
      eigenstates_.push_back(ProjectiveState::from_amplitudes(solver.eigenvectors().col(k)));
      eigenvectors_.col(k) = eigenstates_.back().amplitudes();
    }
  }
  min_gap_ = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < energies_.size(); ++k) {
    min_gap_ = std::min(min_gap_, energies_[k] - energies_[k - 1]);
  }
}

double HamiltonianSystem::relative_min_gap() const noexcept {
  if (dim() < 2) return std::numeric_limits<double>::infinity();
  const double s = spread();
  if (!(s > 0.0)) return 0.0;
  return min_gap_ / s;
}

void HamiltonianSystem::require_nondegenerate(double tol) const {
  const double rel = relative_min_gap();
  if (rel < tol) throw DegeneracyError("degenerate spectrum", min_gap_, tol * spread());
}

CMatrix HamiltonianSystem::propagator(double t) const {
  const auto n = static_cast<Eigen::Index>(dim());
  CVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases(k) = std::polar(1.0, -energies_[static_cast<std::size_t>(k)] * t);
  }
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

CMatrix HamiltonianSystem::reconstruct() const {
  const auto n = static_cast<Eigen::Index>(dim());
  RVector e(n);
  for (Eigen::Index k = 0; k < n; ++k) e(k) = energies_[static_cast<std::size_t>(k)];
  return eigenvectors_ * e.cast<complex>().asDiagonal() * eigenvectors_.adjoint();
}

// ---------------------------------------------------------------------------
// WeightedStateEnsemble

WeightedStateEnsemble::WeightedStateEnsemble(std::vector<WeightedState> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw DomainError("ensemble must have at least one entry");
  const std::size_t d = entries_.front().state.dim();
  CompensatedSum total;
  for (const auto& e : entries_) {
    if (e.state.dim() != d) throw DomainError("ensemble entries have mixed dimensions");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw DomainError("ensemble weights must be finite and nonnegative");
    }
    total.add(e.weight);
  }
  if (std::abs(total.value() - 1.0) > tolerances().ensemble_weight) {
    throw DomainError("ensemble weights sum to " + std::to_string(total.value()) + ", not 1");
  }
}

WeightedStateEnsemble WeightedStateEnsemble::coalesced(double tol) const {
  std::vector<WeightedState> merged;
  for (const auto& e : entries_) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const WeightedState& m) { return same_ray(m.state, e.state, tol); });
    if (it == merged.end()) {
      merged.push_back(e);
    } else {
      it->weight += e.weight;
    }
  }
  return WeightedStateEnsemble(std::move(merged));
}

// ---------------------------------------------------------------------------
// Probability-and-phase chart

ProbPhaseCoords to_prob_phase(const ProjectiveState& state) {
  const std::size_t d = state.dim();
  ProbPhaseCoords c;
  c.probs.resize(d - 1);
  c.phases.resize(d - 1);
  const complex z0 = state[0];
  const bool anchored = std::abs(z0) > 0.0;
  for (std::size_t k = 1; k < d; ++k) {
    const complex zk = state[k];
    c.probs[k - 1] = std::norm(zk);
    const double nu = std::abs(zk) > 0.0 ? (anchored ? std::arg(zk / z0) : std::arg(zk)) : 0.0;
    c.phases[k - 1] = wrap_phase(nu);
  }
  return c;
}

ProjectiveState from_prob_phase(const ProbPhaseCoords& coords) {
  if (coords.probs.size() != coords.phases.size()) {
    throw DomainError("probs and phases must have the same length");
  }
  double sum = 0.0;
  for (double p : coords.probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probabilities must lie in [0, 1]");
    sum += p;
  }
  if (sum > 1.0 + tolerances().normalization) {
    throw DomainError("probabilities sum to " + std::to_string(sum) + " > 1");
  }
  const std::size_t d = coords.probs.size() + 1;
  CVector z(static_cast<Eigen::Index>(d));
  z(0) = std::sqrt(std::max(0.0, 1.0 - sum));
  for (std::size_t k = 1; k < d; ++k) {
    if (!std::isfinite(coords.phases[k - 1])) throw DomainError("phases must be finite");
    z(static_cast<Eigen::Index>(k)) = std::polar(std::sqrt(coords.probs[k - 1]), coords.phases[k - 1]);
  }
  return ProjectiveState::from_amplitudes(z);
}

// ---------------------------------------------------------------------------
// Bipartite states

namespace {

void require_normalized_bipartite(const CMatrix& psi) {
  if (psi.rows() == 0 || psi.cols() == 0) throw DomainError("bipartite state must be nonempty");
  if (!psi.allFinite()) throw DomainError("bipartite state has non-finite entries");
  const double n2 = psi.squaredNorm();
  if (std::abs(n2 - 1.0) > tolerances().bipartite_norm) {
    throw DomainError("bipartite state is not normalized (Σ|ψ|² = " + std::to_string(n2) + ")");
  }
}

}  // namespace

WeightedStateEnsemble bipartite_geometric_state(const CMatrix& psi_ab) {
  require_normalized_bipartite(psi_ab);
  const double total = psi_ab.squaredNorm();
  std::vector<WeightedState> entries;
  entries.reserve(static_cast<std::size_t>(psi_ab.cols()));
  for (Eigen::Index i = 0; i < psi_ab.cols(); ++i) {
    // Weight relative to the measured norm, so an input accepted at 1e-8 still
    // yields an exactly normalized ensemble.
    const double w = psi_ab.col(i).squaredNorm() / total;
    if (w < tolerances().zero_weight) continue;
    entries.push_back({w, ProjectiveState::from_amplitudes(psi_ab.col(i))});
  }
  return WeightedStateEnsemble(std::move(entries));
}

CMatrix partial_trace_b(const CMatrix& psi_ab) {
  require_normalized_bipartite(psi_ab);
  return psi_ab * psi_ab.adjoint();
}

CMatrix ensemble_density_matrix(const WeightedStateEnsemble& ensemble) {
  const auto d = static_cast<Eigen::Index>(ensemble.dim());
  CMatrix rho = CMatrix::Zero(d, d);
  for (const auto& e : ensemble.entries()) {
    rho.noalias() += e.weight * (e.state.amplitudes() * e.state.amplitudes().adjoint());
  }
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace gqt
