#include "gqt/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gqt {

namespace {

constexpr std::size_t kJackknifeBlocks = 64;
constexpr double kAcceptanceFloor = 1e-6;
constexpr std::size_t kStallAttempts = 10'000'000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Welford accumulator with Chan's merge.
struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

// Per-block sums of (numerator, denominator, second numerator) for the
// delete-one-block jackknife of a ratio estimator.
struct RatioBlocks {
  std::vector<double> num;
  std::vector<double> num2;
  std::vector<double> den;
};

std::size_t block_count(std::size_t n) { return std::min(n, kJackknifeBlocks); }

std::size_t block_of(std::size_t i, std::size_t n, std::size_t blocks) {
  return static_cast<std::size_t>((static_cast<std::uint64_t>(i) * blocks) / n);
}

// Ratio Σnum/Σden with its jackknife error over the given block sums.
McEstimate jackknife_ratio(const std::vector<double>& num, const std::vector<double>& den,
                           std::size_t n) {
  const std::size_t b = num.size();
  CompensatedSum tn, td;
  for (std::size_t k = 0; k < b; ++k) {
    tn.add(num[k]);
    td.add(den[k]);
  }
  McEstimate est;
  est.n = n;
  est.value = tn.value() / td.value();
  if (b < 2) return est;
  std::vector<double> loo(b);
  double mean = 0.0;
  for (std::size_t k = 0; k < b; ++k) {
    loo[k] = (tn.value() - num[k]) / (td.value() - den[k]);
    mean += loo[k];
  }
  mean /= static_cast<double>(b);
  double ss = 0.0;
  for (double x : loo) ss += (x - mean) * (x - mean);
  est.std_error = std::sqrt(ss * static_cast<double>(b - 1) / static_cast<double>(b));
  return est;
}

double reference_energy(const HamiltonianSystem& sys, double beta) {
  return beta >= 0.0 ? sys.ground_energy() : sys.max_energy();
}

void require_dim(std::size_t dim) {
  if (dim < 2) throw DomainError("sampling needs D >= 2");
}

}  // namespace

void SamplerConfig::validate() const {
  if (n_samples < 1) throw DomainError("sampler needs n_samples >= 1");
  if (n_streams < 1) throw DomainError("sampler needs n_streams >= 1");
  if (n_streams > n_samples) throw DomainError("sampler needs n_streams <= n_samples");
}

Engine stream_engine(std::uint64_t seed, std::size_t stream) {
  const std::uint64_t s = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream) + 1));
  return Engine(s);
}

StreamRange stream_range(std::size_t n, std::size_t n_streams, std::size_t stream) {
  auto edge = [&](std::size_t s) {
    return static_cast<std::size_t>((static_cast<std::uint64_t>(n) * s) / n_streams);
  };
  return {edge(stream), edge(stream + 1)};
}

CVector draw_uniform_vector(std::size_t dim, Engine& rng, std::normal_distribution<double>& normal) {
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(k) = complex(re, im);
  }
  return v / v.norm();
}

std::vector<ProjectiveState> sample_uniform(std::size_t dim, const SamplerConfig& cfg) {
  require_dim(dim);
  auto parts = run_streams<std::vector<ProjectiveState>>(
      cfg, [dim](std::size_t, StreamRange r, Engine& rng) {
        std::normal_distribution<double> normal;
        std::vector<ProjectiveState> out;
        out.reserve(r.end - r.begin);
        for (std::size_t i = r.begin; i < r.end; ++i) {
          out.push_back(ProjectiveState::from_amplitudes(draw_uniform_vector(dim, rng, normal)));
        }
        return out;
      });
  std::vector<ProjectiveState> all;
  all.reserve(cfg.n_samples);
  for (auto& p : parts) {
    for (auto& s : p) all.push_back(std::move(s));
  }
  return all;
}

CanonicalBatch sample_canonical(const HamiltonianSystem& sys, double beta, const SamplerConfig& cfg) {
  require_dim(sys.dim());
  if (!std::isfinite(beta)) throw DomainError("beta must be finite");
  const double ref = reference_energy(sys, beta);
  const CMatrix& h = sys.observable().matrix();
  const std::size_t dim = sys.dim();

  struct Part {
    std::vector<ProjectiveState> states;
    std::size_t attempts = 0;
  };
  auto parts = run_streams<Part>(cfg, [&](std::size_t, StreamRange r, Engine& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Part part;
    const std::size_t quota = r.end - r.begin;
    part.states.reserve(quota);
    while (part.states.size() < quota) {
      CVector v = draw_uniform_vector(dim, rng, normal);
      ++part.attempts;
      const double accept = std::exp(-beta * (quadratic_form(h, v) - ref));
      if (beta == 0.0 || unif(rng) < accept) {
        part.states.push_back(ProjectiveState::from_amplitudes(v));
      }
      if (part.attempts >= kStallAttempts &&
          static_cast<double>(part.states.size()) < kAcceptanceFloor * static_cast<double>(part.attempts)) {
        throw LowAcceptanceError(
            "canonical rejection sampling acceptance below 1e-6 after " +
            std::to_string(part.attempts) +
            " attempts; use the importance-reweighting estimator (mc_observable_estimate)");
      }
    }
    return part;
  });

  CanonicalBatch batch;
  batch.states.reserve(cfg.n_samples);
  for (auto& p : parts) {
    batch.attempts += p.attempts;
    for (auto& s : p.states) batch.states.push_back(std::move(s));
  }
  batch.acceptance_rate = static_cast<double>(batch.states.size()) / static_cast<double>(batch.attempts);
  batch.low_acceptance = batch.acceptance_rate < kAcceptanceFloor;
  return batch;
}

McEstimate mc_partition_estimate(const HamiltonianSystem& sys, double beta, const SamplerConfig& cfg,
                                 MeasureConvention conv) {
  require_dim(sys.dim());
  if (!std::isfinite(beta)) throw DomainError("beta must be finite");
  const double ref = reference_energy(sys, beta);
  const CMatrix& h = sys.observable().matrix();
  const std::size_t dim = sys.dim();
  auto parts = run_streams<RunningStats>(cfg, [&](std::size_t, StreamRange r, Engine& rng) {
    std::normal_distribution<double> normal;
    RunningStats st;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const CVector v = draw_uniform_vector(dim, rng, normal);
      st.add(beta == 0.0 ? 1.0 : std::exp(-beta * (quadratic_form(h, v) - ref)));
    }
    return st;
  });
  RunningStats total;
  for (const auto& p : parts) total.merge(p);
  const double scale = total_volume(dim, conv) * std::exp(-beta * ref);
  return {scale * total.mean, scale * total.std_error(), total.n, 1.0};
}

McMoments mc_observable_moments(const HamiltonianSystem& sys, const HermitianObservable& obs,
                                double beta, const SamplerConfig& cfg) {
  require_dim(sys.dim());
  if (obs.dim() != sys.dim()) throw DomainError("observable/Hamiltonian dimension mismatch");
  if (!std::isfinite(beta)) throw DomainError("beta must be finite");
  cfg.validate();
  const double ref = reference_energy(sys, beta);
  const CMatrix& h = sys.observable().matrix();
  const CMatrix& o = obs.matrix();
  const CMatrix o2 = o * o;
  const std::size_t dim = sys.dim();
  const std::size_t n = cfg.n_samples;
  const std::size_t blocks = block_count(n);

  auto parts = run_streams<RatioBlocks>(cfg, [&](std::size_t, StreamRange r, Engine& rng) {
    std::normal_distribution<double> normal;
    RatioBlocks acc{std::vector<double>(blocks, 0.0), std::vector<double>(blocks, 0.0),
                    std::vector<double>(blocks, 0.0)};
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const CVector v = draw_uniform_vector(dim, rng, normal);
      const double w = beta == 0.0 ? 1.0 : std::exp(-beta * (quadratic_form(h, v) - ref));
      const std::size_t b = block_of(i, n, blocks);
      acc.num[b] += w * quadratic_form(o, v);
      acc.num2[b] += w * quadratic_form(o2, v);
      acc.den[b] += w;
    }
    return acc;
  });

  std::vector<double> num(blocks, 0.0), num2(blocks, 0.0), den(blocks, 0.0);
  for (const auto& p : parts) {
    for (std::size_t b = 0; b < blocks; ++b) {
      num[b] += p.num[b];
      num2[b] += p.num2[b];
      den[b] += p.den[b];
    }
  }
  return {jackknife_ratio(num, den, n), jackknife_ratio(num2, den, n)};
}

McEstimate mc_observable_estimate(const HamiltonianSystem& sys, const HermitianObservable& obs,
                                  double beta, const SamplerConfig& cfg) {
  return mc_observable_moments(sys, obs, beta, cfg).mean;
}

McEstimate mc_shell_volume(const HamiltonianSystem& sys, const EnergyShell& shell,
                           const SamplerConfig& cfg, MeasureConvention conv) {
  require_dim(sys.dim());
  if (!(shell.width > 0.0)) throw DomainError("energy shell needs a positive width");
  const double lo = shell.energy;
  const double hi = shell.energy + shell.width;
  const double e_min = sys.ground_energy();
  const double e_max = sys.max_energy();
  const CMatrix& h = sys.observable().matrix();
  const std::size_t dim = sys.dim();
  auto hits = run_streams<std::size_t>(cfg, [&](std::size_t, StreamRange r, Engine& rng) {
    std::normal_distribution<double> normal;
    std::size_t count = 0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      // Round-off can push h a few ulps outside the spectrum; h is in it by construction.
      const double e = std::clamp(quadratic_form(h, draw_uniform_vector(dim, rng, normal)), e_min, e_max);
      if (e >= lo && e <= hi) ++count;
    }
    return count;
  });
  std::size_t total = 0;
  for (std::size_t c : hits) total += c;
  const double n = static_cast<double>(cfg.n_samples);
  const double f = static_cast<double>(total) / n;
  const double vol = total_volume(dim, conv);
  return {vol * f, vol * std::sqrt(f * (1.0 - f) / n), cfg.n_samples, 1.0};
}

}  // namespace gqt
