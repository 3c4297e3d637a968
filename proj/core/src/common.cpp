#include "gqt/common.hpp"

#include <cmath>

namespace gqt {

namespace {
Tolerances g_tolerances{};
}

DegeneracyError::DegeneracyError(const std::string& what, double gap, double tolerance)
    : std::runtime_error(what + " (min gap " + std::to_string(gap) + " below tolerance " +
                         std::to_string(tolerance) +
                         "); use the Monte Carlo estimators as a fallback"),
      gap_(gap),
      tolerance_(tolerance) {}

const Tolerances& tolerances() noexcept { return g_tolerances; }

void set_tolerances(const Tolerances& t) noexcept { g_tolerances = t; }

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace gqt
