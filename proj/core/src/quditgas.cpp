#include "gqt/quditgas.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gqt {

namespace {

constexpr double kQuadratureTol = 1e-10;
constexpr unsigned kQuadratureDepth = 18;

void require_qubit(std::size_t dim, const char* what) {
  if (dim != 2) throw DomainError(std::string(what) + " is defined for D = 2 only");
}

struct QubitForm {
  double d0, d1;  // diagonal entries
  complex off;    // (0, 1) entry

  explicit QubitForm(const CMatrix& m) : d0(m(0, 0).real()), d1(m(1, 1).real()), off(m(0, 1)) {}

  // ⟨ψ|M|ψ⟩ at ψ = (sqrt(1-q), sqrt(q) e^{iχ}).
  double operator()(double q, double c0c1, complex phase) const {
    return d0 * (1.0 - q) + d1 * q + 2.0 * c0c1 * std::real(off * phase);
  }
};

}  // namespace

MeasurementAxis::MeasurementAxis(double theta_, double phi_) : theta(theta_), phi(phi_) {
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("measurement axis: theta must lie in [0, π]");
  if (!(phi >= -kPi && phi < kPi)) throw DomainError("measurement axis: phi must lie in [-π, π)");
}

ProjectiveState MeasurementAxis::up() const {
  CVector v(2);
  v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  return ProjectiveState::from_amplitudes(v);
}

ProjectiveState MeasurementAxis::down() const {
  CVector v(2);
  v << std::sin(theta / 2), std::polar(std::cos(theta / 2), phi + kPi);
  return ProjectiveState::from_amplitudes(v);
}

HermitianObservable MeasurementAxis::projector_plus() const {
  const CVector u = up().amplitudes();
  return HermitianObservable(u * u.adjoint());
}

HermitianObservable MeasurementAxis::spin() const {
  const CVector u = up().amplitudes();
  const CVector d = down().amplitudes();
  return HermitianObservable(u * u.adjoint() - d * d.adjoint());
}

double projector_value(const MeasurementAxis& axis, const ProjectiveState& state) {
  require_qubit(state.dim(), "angular projector");
  const double c = std::cos(axis.theta / 2);
  const double s = std::sin(axis.theta / 2);
  const complex z0 = state[0];
  const complex z1 = state[1];
  const complex cross = std::polar(1.0, axis.phi) * z0 * std::conj(z1);
  const double p = c * c * std::norm(z0) + s * s * std::norm(z1) + std::sin(axis.theta) * std::real(cross);
  return std::clamp(p, 0.0, 1.0);
}

double projector_value(const ProjectiveState& target, const ProjectiveState& state) {
  return std::clamp(target.fidelity(state), 0.0, 1.0);
}

OutcomeProbabilities gibbs_prediction(const HamiltonianSystem& sys, double beta, const MeasurementAxis& axis) {
  require_qubit(sys.dim(), "Stern-Gerlach prediction");
  const WeightedStateEnsemble g = gibbs_ensemble(sys, beta);
  double plus = 0.0;
  for (const auto& e : g.entries()) plus += e.weight * projector_value(axis, e.state);
  return {plus, 1.0 - plus, 0.0};
}

GeoMethod parse_geo_method(const std::string& name) {
  if (name == "quadrature") return GeoMethod::quadrature;
  if (name == "mc") return GeoMethod::mc;
  if (name == "spectral") return GeoMethod::spectral;
  throw DomainError("unknown method '" + name + "' (expected quadrature | mc | spectral)");
}

const char* to_string(GeoMethod m) {
  switch (m) {
    case GeoMethod::quadrature:
      return "quadrature";
    case GeoMethod::mc:
      return "mc";
    case GeoMethod::spectral:
      return "spectral";
  }
  return "quadrature";
}

QuadratureMoments geometric_moments_quadrature(const HamiltonianSystem& sys, const HermitianObservable& obs,
                                               double beta) {
  require_qubit(sys.dim(), "quadrature path");
  if (obs.dim() != 2) throw DomainError("observable/Hamiltonian dimension mismatch");
  if (!std::isfinite(beta)) throw DomainError("beta must be finite");
  using boost::math::quadrature::gauss_kronrod;
  const QubitForm h(sys.observable().matrix());
  const QubitForm o(obs.matrix());
  const QubitForm o2(obs.matrix() * obs.matrix());
  const double ref = beta >= 0.0 ? sys.ground_energy() : sys.max_energy();

  // dV = dq dχ / 2; the common factor cancels in every ratio.
  auto integrate = [&](auto&& weight_times) {
    double outer_err = 0.0;
    const double value = gauss_kronrod<double, 31>::integrate(
        [&](double q) {
          const double c0c1 = std::sqrt(std::max(0.0, q * (1.0 - q)));
          return gauss_kronrod<double, 31>::integrate(
              [&](double chi) {
                const complex phase = std::polar(1.0, chi);
                const double w = std::exp(-beta * (h(q, c0c1, phase) - ref));
                return weight_times(w, q, c0c1, phase);
              },
              -kPi, kPi, kQuadratureDepth, kQuadratureTol);
        },
        0.0, 1.0, kQuadratureDepth, kQuadratureTol, &outer_err);
    return std::pair{value, outer_err};
  };

  const auto [den, den_err] = integrate([](double w, double, double, complex) { return w; });
  const auto [num, num_err] =
      integrate([&](double w, double q, double c, complex ph) { return w * o(q, c, ph); });
  const double num2 =
      integrate([&](double w, double q, double c, complex ph) { return w * o2(q, c, ph); }).first;
  QuadratureMoments m;
  m.mean = num / den;
  m.second_moment = num2 / den;
  m.error_estimate = (num_err + std::abs(m.mean) * den_err) / den;
  return m;
}

OutcomeProbabilities geometric_prediction(const HamiltonianSystem& sys, double beta,
                                          const MeasurementAxis& axis, GeoMethod method,
                                          const SamplerConfig& cfg) {
  require_qubit(sys.dim(), "Stern-Gerlach prediction");
  const HermitianObservable proj = axis.projector_plus();
  OutcomeProbabilities out;
  switch (method) {
    case GeoMethod::quadrature: {
      const QuadratureMoments m = geometric_moments_quadrature(sys, proj, beta);
      out.plus = m.mean;
      out.std_error = m.error_estimate;
      break;
    }
    case GeoMethod::mc: {
      const McEstimate e = mc_observable_estimate(sys, proj, beta, cfg);
      out.plus = e.value;
      out.std_error = e.std_error;
      break;
    }
    case GeoMethod::spectral:
      out.plus = canonical_expectation(sys, proj, beta);
      break;
  }
  out.plus = std::clamp(out.plus, 0.0, 1.0);
  out.minus = 1.0 - out.plus;
  return out;
}

SweepResult thermal_sweep(const HamiltonianSystem& sys, const HermitianObservable& obs,
                          const std::vector<double>& beta_grid, GeoMethod method,
                          const SamplerConfig& cfg) {
  if (obs.dim() != sys.dim()) throw DomainError("observable/Hamiltonian dimension mismatch");
  const CMatrix& o = obs.matrix();
  const CMatrix o2 = o * o;
  SweepResult result;
  result.rows.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    SweepRow row{};
    row.beta = beta;
    const CMatrix rho = gibbs_density_matrix(sys, beta);
    row.gibbs_mean = std::real((rho * o).trace());
    row.gibbs_std = std::sqrt(std::max(0.0, std::real((rho * o2).trace()) - row.gibbs_mean * row.gibbs_mean));

    double m1 = 0.0, m2 = 0.0;
    switch (method) {
      case GeoMethod::quadrature: {
        const QuadratureMoments m = geometric_moments_quadrature(sys, obs, beta);
        m1 = m.mean;
        m2 = m.second_moment;
        row.geo_std_error = m.error_estimate;
        break;
      }
      case GeoMethod::mc: {
        const McMoments m = mc_observable_moments(sys, obs, beta, cfg);
        m1 = m.mean.value;
        m2 = m.second_moment.value;
        row.geo_std_error = m.mean.std_error;
        break;
      }
      case GeoMethod::spectral: {
        const CMatrix g = geometric_density_matrix(sys, beta);
        m1 = std::real((g * o).trace());
        m2 = std::real((g * o2).trace());
        row.geo_std_error = 0.0;
        break;
      }
    }
    row.geo_mean = m1;
    row.geo_std = std::sqrt(std::max(0.0, m2 - m1 * m1));
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace gqt
