#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gqt {

using complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Invalid argument: wrong dimension, unnormalized input, out-of-range value.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a closed form would divide by (near-)coincident eigenvalues
/// or section normals. The Monte Carlo estimators in sampling.hpp remain valid.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, double gap, double tolerance);
  double gap() const noexcept { return gap_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  double gap_;
  double tolerance_;
};

/// Numerical thresholds shared by all modules.
struct Tolerances {
  double normalization = 1e-12;    // |‖Z‖ - 1| for a ProjectiveState
  double hermiticity = 1e-12;      // ‖M - M†‖_max relative to max(1, ‖M‖_max)
  double ensemble_weight = 1e-10;  // |Σ w - 1|
  double bipartite_norm = 1e-8;    // |Σ|ψ|² - 1| accepted by bipartite_geometric_state
  double zero_weight = 1e-14;      // columns below this weight are dropped
  double degeneracy = 1e-9;        // min gap / spread below this -> DegeneracyError
  double confluent_gap = 1e-6;     // min gap / spread below this -> confluent-only path
  double relative = 1e-10;         // generic comparison tolerance
};

/// Process-wide defaults. Not synchronized: configure before spawning work.
const Tolerances& tolerances() noexcept;
void set_tolerances(const Tolerances& t) noexcept;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace gqt
