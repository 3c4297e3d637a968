#pragma once

// Exact volumes of simplex sections and of energy sublevel sets of h(Z) on
// CP^{D-1}, the density of states, and microcanonical shell counts.

#include <cstddef>
#include <vector>

#include "gqt/statespace.hpp"

namespace gqt {

/// raw: the Fubini-Study volume, total π^{D-1}/(D-1)!.
/// normalized: the same measure rescaled to total volume 1.
enum class MeasureConvention { raw, normalized };

double total_volume(std::size_t dim, MeasureConvention conv);
const char* to_string(MeasureConvention conv);

/// Θ(a, t) = Δ_n ∩ {a·x <= t} and S(a, t) = Δ_n ∩ {a·x = t}, where
/// Δ_n = {x >= 0, Σ x <= 1} ⊂ R^n and a_0 = 0 is implied.
struct SimplexSection {
  std::vector<double> a;  // n entries in [0, 1], pairwise distinct and nonzero
  double t = 0.0;
};

/// Flat n-volume of Θ(a, t); lies in [0, 1/n!].
double simplex_section_volume(const SimplexSection& section);
/// (n-1)-volume of S(a, t) in the flat measure dp_1..dp_n projected along t,
/// i.e. d/dt of simplex_section_volume.
double simplex_section_area(const SimplexSection& section);

/// Shell [energy, energy + width].
struct EnergyShell {
  double energy = 0.0;
  double width = 0.0;
};

struct ClampedShell {
  EnergyShell shell;
  bool clamped = false;  // the requested shell left [E_0, E_{D-1}]
  bool wide = false;     // width exceeds 10% of the spectral spread
};

/// Intersects the shell with [E_0, E_{D-1}]. Throws DomainError for width <= 0.
ClampedShell clamp_shell(const HamiltonianSystem& sys, const EnergyShell& shell);

/// Volume of {Z : h(Z) <= energy}. Defined for every real energy: 0 below
/// E_0 and the total volume above E_{D-1}.
double cumulative_volume(const HamiltonianSystem& sys, double energy,
                         MeasureConvention conv = MeasureConvention::raw);

/// ω(ℰ) = d/dℰ cumulative_volume.
double density_of_states(const HamiltonianSystem& sys, double energy,
                         MeasureConvention conv = MeasureConvention::raw);

/// W = Vol(ℰ + δE) - Vol(ℰ) over the clamped shell.
double microcanonical_weight(const HamiltonianSystem& sys, const EnergyShell& shell,
                             MeasureConvention conv = MeasureConvention::raw);

struct Entropy {
  double value = 0.0;  // log W, or -inf when the shell holds no volume
  bool empty = false;
};

Entropy statistical_entropy(const HamiltonianSystem& sys, const EnergyShell& shell,
                            MeasureConvention conv = MeasureConvention::raw);

}  // namespace gqt
