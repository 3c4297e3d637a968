#pragma once

// Stern-Gerlach outcome statistics of a dilute qudit gas under the Gibbs
// ensemble and under the geometric canonical ensemble.

#include <string>
#include <vector>

#include "gqt/canonical.hpp"
#include "gqt/sampling.hpp"

namespace gqt {

/// Direction (θ, φ) of the measured spin component; Π_+ projects on
/// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
struct MeasurementAxis {
  double theta = 0.0;  // [0, π]
  double phi = 0.0;    // [-π, π)

  MeasurementAxis() = default;
  MeasurementAxis(double theta_, double phi_);

  static MeasurementAxis x() { return {kPi / 2, 0.0}; }
  static MeasurementAxis y() { return {kPi / 2, kPi / 2}; }
  static MeasurementAxis z() { return {0.0, 0.0}; }

  ProjectiveState up() const;
  ProjectiveState down() const;
  HermitianObservable projector_plus() const;
  /// Π_+ - Π_-, the spin component along the axis.
  HermitianObservable spin() const;
};

/// P_+(Z) on a qubit, from the explicit quadratic form in Z.
double projector_value(const MeasurementAxis& axis, const ProjectiveState& state);
/// |⟨target|state⟩|² for any D.
double projector_value(const ProjectiveState& target, const ProjectiveState& state);

struct OutcomeProbabilities {
  double plus = 0.5;
  double minus = 0.5;
  double std_error = 0.0;
};

OutcomeProbabilities gibbs_prediction(const HamiltonianSystem& sys, double beta,
                                      const MeasurementAxis& axis);

/// quadrature: adaptive Gauss-Kronrod on the (q, χ) chart of CP^1 (D = 2 only).
/// mc: importance-reweighted uniform sampling (any D).
/// spectral: Tr(Π ρ_geo) from the closed-form eigenbasis occupations.
enum class GeoMethod { quadrature, mc, spectral };
GeoMethod parse_geo_method(const std::string& name);
const char* to_string(GeoMethod m);

OutcomeProbabilities geometric_prediction(const HamiltonianSystem& sys, double beta,
                                          const MeasurementAxis& axis, GeoMethod method,
                                          const SamplerConfig& cfg = {});

/// ∫ p_β ⟨ψ|O|ψ⟩ and ∫ p_β ⟨ψ|O²|ψ⟩ by 2D adaptive quadrature; D = 2.
struct QuadratureMoments {
  double mean;
  double second_moment;
  double error_estimate;
};
QuadratureMoments geometric_moments_quadrature(const HamiltonianSystem& sys, const HermitianObservable& obs,
                                               double beta);

struct SweepRow {
  double beta;
  double gibbs_mean;
  double gibbs_std;
  double geo_mean;
  double geo_std;
  double geo_std_error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Mean and outcome standard deviation sqrt(⟨O²⟩ - ⟨O⟩²) of `obs` under both
/// ensembles at every β.
SweepResult thermal_sweep(const HamiltonianSystem& sys, const HermitianObservable& obs,
                          const std::vector<double>& beta_grid, GeoMethod method,
                          const SamplerConfig& cfg = {});

}  // namespace gqt
