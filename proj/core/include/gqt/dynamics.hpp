#pragma once

// Schrödinger evolution on CP^{D-1} written as Hamiltonian flow, driven
// protocols H(λ) = H_0 + λ V, single-trajectory work, the First Law
// decomposition and the Jarzynski / Second Law experiment.

#include <cstddef>
#include <string>
#include <vector>

#include "gqt/canonical.hpp"
#include "gqt/sampling.hpp"
#include "gqt/statespace.hpp"

namespace gqt {

/// λ(s) over normalized time s = t / duration ∈ [0, 1].
class Schedule {
 public:
  enum class Shape { constant, linear, sudden };

  static Schedule constant(double lambda);
  static Schedule linear(double lambda_i, double lambda_f);
  /// λ jumps from λ_i to λ_f at s = 0 and stays there.
  static Schedule sudden(double lambda_i, double lambda_f);

  Shape shape() const noexcept { return shape_; }
  double initial() const noexcept { return lambda_i_; }
  double final() const noexcept { return lambda_f_; }
  /// λ(s) for s in (0, 1]; λ(0) = initial().
  double value(double s) const;
  /// dλ/ds away from the jump of a sudden schedule.
  double rate(double s) const;

 private:
  Schedule(Shape shape, double li, double lf) : shape_(shape), lambda_i_(li), lambda_f_(lf) {}
  Shape shape_;
  double lambda_i_;
  double lambda_f_;
};

Schedule::Shape parse_schedule_shape(const std::string& name);
const char* to_string(Schedule::Shape shape);

struct Protocol {
  HermitianObservable h0;
  HermitianObservable v;
  Schedule schedule;
  double duration = 1.0;
  std::size_t n_steps = 100;

  Protocol(HermitianObservable h0_, HermitianObservable v_, Schedule schedule_, double duration_,
           std::size_t n_steps_);

  HermitianObservable hamiltonian(double lambda) const;
  /// Copy with n_steps = max(1, round(duration / dt)).
  Protocol with_step(double dt) const;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<ProjectiveState> states;
  double work = 0.0;
};

/// Evolution under a fixed H; n = max(1, round(T / dt)) exact steps of length T / n.
TrajectoryRecord evolve(const HermitianObservable& h, const ProjectiveState& z0, double duration,
                        double dt);
TrajectoryRecord evolve(const HamiltonianSystem& sys, const ProjectiveState& z0, double duration,
                        double dt);

/// Midpoint stepping: step k applies exp(-i H(λ(s_k + ds/2)) dt), with the
/// work increment λ'(s_mid) ds ⟨ψ_mid|V|ψ_mid⟩ evaluated at the half-step
/// state. A sudden schedule contributes (λ_f - λ_i)⟨z0|V|z0⟩ at s = 0 and
/// then evolves under H(λ_f).
TrajectoryRecord evolve_driven(const Protocol& p, const ProjectiveState& z0);
TrajectoryRecord evolve_driven(const Protocol& p, const ProjectiveState& z0, double dt);

/// Work along a recorded trajectory, recomputed from its grid states with
/// the same quadrature as evolve_driven. Throws DomainError when the record's
/// grid does not match the protocol.
double trajectory_work(const TrajectoryRecord& rec, const Protocol& p);

/// Work only; no states recorded.
double driven_work(const Protocol& p, const ProjectiveState& z0);

struct JarzynskiReport {
  double mean_exp_neg_beta_W = 0.0;
  double std_error = 0.0;
  double delta_F_closed_form = 0.0;
  double exp_neg_beta_delta_F = 1.0;  // Q_f / Q_i
  double mean_W = 0.0;
  double mean_W_std_error = 0.0;
  double discrepancy_sigma = 0.0;  // |⟨e^{-βW}⟩ - Q_f/Q_i| / std_error (0 when both vanish)
  bool second_law_holds = true;    // ⟨W⟩ >= ΔF - 3 std errors
  double acceptance_rate = 1.0;
  std::size_t n_trajectories = 0;
  std::vector<double> works;  // per trajectory, in stream order
};

/// Initial states from sample_canonical at H(λ_i); each evolved with
/// evolve_driven(p.with_step(dt)). cfg.n_samples trajectories.
JarzynskiReport jarzynski_experiment(const Protocol& p, double beta, const SamplerConfig& cfg, double dt);
JarzynskiReport jarzynski_experiment(const Protocol& p, double beta, const SamplerConfig& cfg);

/// Linear family λ ↦ H_0 + λ V.
struct HamiltonianFamily {
  HermitianObservable h0;
  HermitianObservable v;
  HermitianObservable at(double lambda) const;
};

/// Central differences of the canonical U, F, H_q across λ0 ± δλ against
/// dW = ⟨V⟩_β(λ0) dλ and the heat integral dQ = ∫ h(λ0) (p_+ - p_-) dV, with
/// dλ = 2δλ. Residuals are divided by dλ, so each is O(δλ²).
struct FirstLawReport {
  double dlambda = 0.0;
  double dU = 0.0;
  double dF = 0.0;
  double dHq = 0.0;
  double dW = 0.0;
  double dQ = 0.0;
  double residual_energy = 0.0;   // |dU - (dW + dQ)| / dλ
  double residual_free = 0.0;     // |dF - dW| / dλ
  double residual_entropy = 0.0;  // |dH_q - β dQ| / dλ
};

FirstLawReport first_law_check(const HamiltonianFamily& family, double beta, double lambda0,
                               double dlambda);

}  // namespace gqt
