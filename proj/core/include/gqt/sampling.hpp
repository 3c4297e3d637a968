#pragma once

// Seeded Monte Carlo on CP^{D-1}: Fubini-Study uniform sampling, rejection
// sampling of the geometric canonical ensemble, and the estimators used to
// cross-check every closed form.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gqt/statespace.hpp"
#include "gqt/volumes.hpp"

namespace gqt {

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::size_t n_samples = 1;
  std::size_t n_streams = 1;

  void validate() const;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double acceptance_rate = 1.0;  // < 1 only for rejection samplers
};

/// Rejection sampling stalled below the acceptance floor.
class LowAcceptanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Engine = std::mt19937_64;

/// Engine for stream `stream`, seeded from a splitmix64 hash of (seed, stream).
Engine stream_engine(std::uint64_t seed, std::size_t stream);

/// Half-open global index range [begin, end) owned by `stream`.
struct StreamRange {
  std::size_t begin;
  std::size_t end;
};
StreamRange stream_range(std::size_t n, std::size_t n_streams, std::size_t stream);

/// Runs fn(stream, range, engine) -> Acc on every stream (one thread each)
/// and returns the results in stream order. Exceptions are rethrown after
/// all threads join, lowest stream first.
template <class Acc, class Fn>
std::vector<Acc> run_streams(const SamplerConfig& cfg, Fn&& fn) {
  cfg.validate();
  const std::size_t streams = cfg.n_streams;
  std::vector<Acc> results(streams);
  std::vector<std::exception_ptr> errors(streams);
  auto body = [&](std::size_t s) {
    try {
      Engine rng = stream_engine(cfg.seed, s);
      results[s] = fn(s, stream_range(cfg.n_samples, streams, s), rng);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  std::vector<std::thread> workers;
  workers.reserve(streams > 0 ? streams - 1 : 0);
  for (std::size_t s = 1; s < streams; ++s) workers.emplace_back(body, s);
  body(0);
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

/// Normalized vector of independent standard complex Gaussians (not gauge
/// fixed): the unitary-invariant law on the unit sphere of C^D.
CVector draw_uniform_vector(std::size_t dim, Engine& rng,
                            std::normal_distribution<double>& normal);

std::vector<ProjectiveState> sample_uniform(std::size_t dim, const SamplerConfig& cfg);

struct CanonicalBatch {
  std::vector<ProjectiveState> states;
  std::size_t attempts = 0;
  double acceptance_rate = 1.0;
  bool low_acceptance = false;  // acceptance below 1e-6; prefer reweighting
};

/// Rejection sampling from the uniform law with acceptance probability
/// e^{-β(h - E_ref)}, E_ref = E_0 for β >= 0 and E_{D-1} for β < 0.
/// Returns cfg.n_samples accepted states.
CanonicalBatch sample_canonical(const HamiltonianSystem& sys, double beta, const SamplerConfig& cfg);

/// Vol · mean(e^{-βh}) over uniform samples.
McEstimate mc_partition_estimate(const HamiltonianSystem& sys, double beta, const SamplerConfig& cfg,
                                 MeasureConvention conv = MeasureConvention::raw);

/// Self-normalized ratio mean(O e^{-βh}) / mean(e^{-βh}) over uniform
/// samples, with a blocked jackknife standard error.
McEstimate mc_observable_estimate(const HamiltonianSystem& sys, const HermitianObservable& obs,
                                  double beta, const SamplerConfig& cfg);

struct McMoments {
  McEstimate mean;           // ∫ p_β ⟨O⟩ dV
  McEstimate second_moment;  // ∫ p_β ⟨O²⟩ dV
};
McMoments mc_observable_moments(const HamiltonianSystem& sys, const HermitianObservable& obs,
                                double beta, const SamplerConfig& cfg);

/// Volume of {Z : energy <= h(Z) <= energy + width} as hit fraction × Vol.
McEstimate mc_shell_volume(const HamiltonianSystem& sys, const EnergyShell& shell,
                           const SamplerConfig& cfg, MeasureConvention conv = MeasureConvention::raw);

}  // namespace gqt
