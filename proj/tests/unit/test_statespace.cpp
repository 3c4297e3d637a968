#include <gtest/gtest.h>

#include <cmath>

#include "gqt/canonical.hpp"
#include "gqt/statespace.hpp"
#include "oracles.hpp"

using namespace gqt;
using gqt::testing::Rng;

namespace {

CVector vec(std::initializer_list<complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (auto x : xs) v(k++) = x;
  return v;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

const complex I(0.0, 1.0);

}  // namespace

TEST(NormalizeGauge, ScalesToUnitNorm) {
  const auto s = normalize_gauge(vec({2.0, 0.0}));
  EXPECT_DOUBLE_EQ(s[0].real(), 1.0);
  EXPECT_EQ(s[0].imag(), 0.0);
  EXPECT_EQ(std::abs(s[1]), 0.0);
}

TEST(NormalizeGauge, RemovesGlobalPhase) {
  const auto s = normalize_gauge(vec({0.0, I}));
  EXPECT_EQ(std::abs(s[0]), 0.0);
  EXPECT_NEAR(s[1].real(), 1.0, 1e-15);
  EXPECT_EQ(s[1].imag(), 0.0);
}

TEST(NormalizeGauge, SymmetricVectorWithPhase) {
  const complex ph = std::polar(1.0, kPi / 3);
  const auto s = normalize_gauge(vec({ph, ph, ph, ph}));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(s[k].real(), 0.5, 1e-15);
    EXPECT_NEAR(s[k].imag(), 0.0, 1e-15);
  }
}

TEST(NormalizeGauge, ZeroVectorIsDomainError) {
  EXPECT_THROW(normalize_gauge(CVector::Zero(3)), DomainError);
  EXPECT_THROW(normalize_gauge(vec({std::nan(""), 1.0})), DomainError);
}

TEST(NormalizeGauge, InvariantsOnRandomInputs) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const CVector raw = gqt::testing::random_vector(rng, 1 + trial % 6);
    const auto s = normalize_gauge(raw);
    EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-12);
    // Largest-modulus component real and nonnegative.
    Eigen::Index kmax = 0;
    s.amplitudes().cwiseAbs().maxCoeff(&kmax);
    EXPECT_GE(s[static_cast<std::size_t>(kmax)].real(), 0.0);
    EXPECT_NEAR(s[static_cast<std::size_t>(kmax)].imag(), 0.0, 1e-15);
    // raw = c · s for a single complex scalar c.
    const complex c = s.amplitudes().dot(raw);  // ⟨s|raw⟩
    EXPECT_LT((raw - c * s.amplitudes()).norm(), 1e-12 * raw.norm());
  }
}

TEST(NormalizeGauge, FirstComponentOfLargestModulusWins) {
  // Equal moduli: the first one carries the gauge.
  const auto s = normalize_gauge(vec({I, -1.0}));
  EXPECT_NEAR(s[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[0].imag(), 0.0, 1e-15);
  EXPECT_NEAR(s[1].real(), 0.0, 1e-15);
  EXPECT_NEAR(s[1].imag(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(HermitianObservable, RejectsNonHermitian) {
  CMatrix m(2, 2);
  m << 1.0, I, I, 1.0;
  EXPECT_THROW(HermitianObservable{m}, DomainError);
  EXPECT_THROW(HermitianObservable{CMatrix::Zero(2, 3)}, DomainError);
}

TEST(HermitianObservable, PauliSumMatrix) {
  const auto h = HermitianObservable::pauli_sum(1.0, 2.0, 3.0);
  CMatrix expected(2, 2);
  expected << 3.0, complex(1.0, -2.0), complex(1.0, 2.0), -3.0;
  EXPECT_EQ(max_abs(h.matrix() - expected), 0.0);
}

TEST(Expectation, IdentityIsOne) {
  Rng rng(2);
  const auto s = normalize_gauge(gqt::testing::random_vector(rng, 4));
  EXPECT_NEAR(expectation(HermitianObservable::identity(4), s), 1.0, 1e-15);
}

TEST(Expectation, EigenstateGivesEigenvalue) {
  Rng rng(3);
  const auto e = gqt::testing::random_spectrum(rng, 5);
  const HamiltonianSystem sys(gqt::testing::random_hamiltonian(rng, e));
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_NEAR(expectation(sys.observable(), sys.eigenstates()[k]), e[k], 1e-12);
  }
}

TEST(Expectation, SigmaZOnBlochState) {
  const auto sz = HermitianObservable::pauli_sum(0, 0, 1);
  for (double theta : {0.0, 0.3, 1.2, 2.0, kPi}) {
    for (double phi : {-2.0, 0.0, 0.7, 3.0}) {
      const auto s = normalize_gauge(vec({std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)}));
      EXPECT_NEAR(expectation(sz, s), std::cos(theta), 1e-14);
    }
  }
}

TEST(Expectation, DimensionMismatch) {
  EXPECT_THROW(expectation(HermitianObservable::identity(3), ProjectiveState::basis(2, 0)), DomainError);
}

TEST(Expectation, WithinSpectralRange) {
  Rng rng(4);
  const auto e = gqt::testing::random_spectrum(rng, 4);
  const auto h = gqt::testing::random_hamiltonian(rng, e);
  for (int k = 0; k < 500; ++k) {
    const double x = expectation(h, normalize_gauge(gqt::testing::random_vector(rng, 4)));
    EXPECT_GE(x, e.front() - 1e-12);
    EXPECT_LE(x, e.back() + 1e-12);
  }
}

TEST(Expectation, GaugeInvariance) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::size_t d : {2u, 3u, 5u}) {
    const auto h = gqt::testing::random_hamiltonian(rng, gqt::testing::random_spectrum(rng, d));
    const CVector raw = gqt::testing::random_vector(rng, d);
    const double ref = expectation(h, normalize_gauge(raw));
    for (int k = 0; k < 100; ++k) {
      const complex lambda(u(rng), u(rng));
      EXPECT_NEAR(expectation(h, normalize_gauge(lambda * raw)), ref, 1e-12);
    }
  }
}

TEST(Expectation, RealForHermitianInput) {
  Rng rng(6);
  const auto h = gqt::testing::random_hamiltonian(rng, gqt::testing::random_spectrum(rng, 4));
  for (int k = 0; k < 50; ++k) {
    const auto s = normalize_gauge(gqt::testing::random_vector(rng, 4));
    const complex full = s.amplitudes().dot(h.matrix() * s.amplitudes());
    EXPECT_LT(std::abs(full.imag()), 1e-12);
    EXPECT_NEAR(expectation(h, s), full.real(), 1e-12);
  }
}

TEST(HamiltonianSystem, ReconstructsMatrix) {
  Rng rng(7);
  for (std::size_t d = 2; d <= 6; ++d) {
    const auto h = gqt::testing::random_hamiltonian(rng, gqt::testing::random_spectrum(rng, d));
    const HamiltonianSystem sys(h);
    EXPECT_LT((sys.reconstruct() - h.matrix()).norm(), 1e-10);
    for (std::size_t k = 1; k < d; ++k) EXPECT_LE(sys.energies()[k - 1], sys.energies()[k]);
    const CMatrix gram = sys.eigenvectors().adjoint() * sys.eigenvectors();
    EXPECT_LT(max_abs(gram - CMatrix::Identity(d, d)), 1e-12);
  }
}

TEST(HamiltonianSystem, MinGapAndDegeneracyGate) {
  const HamiltonianSystem sys(HermitianObservable::diagonal({0.0, 1.0, 1.0 + 1e-12, 3.0}));
  EXPECT_NEAR(sys.min_gap(), 1e-12, 1e-15);
  EXPECT_THROW(sys.require_nondegenerate(1e-9), DegeneracyError);
  const HamiltonianSystem ok(HermitianObservable::diagonal({0.0, 1.0, 3.0}));
  EXPECT_NO_THROW(ok.require_nondegenerate(1e-9));
  EXPECT_DOUBLE_EQ(ok.min_gap(), 1.0);
}

TEST(HamiltonianSystem, DegeneracyMessageSuggestsMonteCarlo) {
  const HamiltonianSystem sys(HermitianObservable::diagonal({0.0, 0.0, 1.0}));
  try {
    sys.require_nondegenerate(1e-9);
    FAIL() << "expected DegeneracyError";
  } catch (const DegeneracyError& e) {
    EXPECT_NE(std::string(e.what()).find("Monte Carlo"), std::string::npos) << e.what();
  }
}

TEST(ProbPhase, BasisState) {
  const auto c = to_prob_phase(ProjectiveState::basis(2, 0));
  ASSERT_EQ(c.probs.size(), 1u);
  EXPECT_EQ(c.probs[0], 0.0);
  EXPECT_EQ(c.phases[0], 0.0);
}

TEST(ProbPhase, HalfAndQuarterTurn) {
  const auto s = from_prob_phase({{0.5}, {kPi / 2}});
  const auto expected = normalize_gauge(vec({1.0 / std::sqrt(2.0), I / std::sqrt(2.0)}));
  EXPECT_TRUE(same_ray(s, expected));
  EXPECT_LT((s.amplitudes() - expected.amplitudes()).norm(), 1e-15);
}

TEST(ProbPhase, InvalidCoordinates) {
  EXPECT_THROW(from_prob_phase({{0.7, 0.6}, {0.0, 0.0}}), DomainError);
  EXPECT_THROW(from_prob_phase({{-0.1}, {0.0}}), DomainError);
  EXPECT_THROW(from_prob_phase({{0.5}, {0.0, 1.0}}), DomainError);
}

TEST(ProbPhase, RoundTripIsSameRay) {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 2 + trial % 5;
    const auto s = normalize_gauge(gqt::testing::random_vector(rng, d));
    const auto c = to_prob_phase(s);
    double sum = 0.0;
    for (std::size_t k = 0; k < c.probs.size(); ++k) {
      EXPECT_GE(c.probs[k], 0.0);
      EXPECT_LE(c.probs[k], 1.0);
      EXPECT_GE(c.phases[k], 0.0);
      EXPECT_LT(c.phases[k], 2 * kPi);
      sum += c.probs[k];
    }
    EXPECT_LE(sum, 1.0 + 1e-12);
    const auto back = from_prob_phase(c);
    EXPECT_LT((back.amplitudes() - s.amplitudes()).norm(), 1e-12);
  }
}

TEST(WeightedStateEnsemble, Validation) {
  const auto a = ProjectiveState::basis(2, 0);
  const auto b = ProjectiveState::basis(2, 1);
  EXPECT_THROW(WeightedStateEnsemble({{0.5, a}, {0.6, b}}), DomainError);
  EXPECT_THROW(WeightedStateEnsemble({{-0.1, a}, {1.1, b}}), DomainError);
  EXPECT_THROW(WeightedStateEnsemble({{0.5, a}, {0.5, ProjectiveState::basis(3, 0)}}), DomainError);
  EXPECT_THROW(WeightedStateEnsemble(std::vector<WeightedState>{}), DomainError);
  EXPECT_NO_THROW(WeightedStateEnsemble({{0.5, a}, {0.5 + 1e-12, b}}));
}

TEST(EnsembleDensityMatrix, SinglePointAndBasis) {
  const WeightedStateEnsemble one({{1.0, ProjectiveState::basis(3, 0)}});
  CMatrix expected = CMatrix::Zero(3, 3);
  expected(0, 0) = 1.0;
  EXPECT_LT(max_abs(ensemble_density_matrix(one) - expected), 1e-15);

  std::vector<WeightedState> entries;
  for (std::size_t k = 0; k < 4; ++k) entries.push_back({0.25, ProjectiveState::basis(4, k)});
  EXPECT_LT(max_abs(ensemble_density_matrix(WeightedStateEnsemble(entries)) - CMatrix::Identity(4, 4) / 4.0),
            1e-15);
}

TEST(EnsembleDensityMatrix, GibbsMatchesMatrixExponential) {
  Rng rng(9);
  for (std::size_t d = 2; d <= 5; ++d) {
    const auto h = gqt::testing::random_hamiltonian(rng, gqt::testing::random_spectrum(rng, d));
    const HamiltonianSystem sys(h);
    for (double beta : {0.0, 0.5, 3.0}) {
      // e^{-βH} by a Taylor series on a scaled matrix, squared back up.
      const int squarings = 8;
      const CMatrix a = -beta / std::pow(2.0, squarings) * h.matrix();
      CMatrix term = CMatrix::Identity(d, d), expm = CMatrix::Identity(d, d);
      for (int k = 1; k < 30; ++k) {
        term = term * a / static_cast<double>(k);
        expm += term;
      }
      for (int k = 0; k < squarings; ++k) expm = expm * expm;
      const CMatrix rho = expm / expm.trace();
      const CMatrix geo = ensemble_density_matrix(gibbs_ensemble(sys, beta));
      EXPECT_LT(max_abs(geo - rho), 1e-10) << "d=" << d << " beta=" << beta;
    }
  }
}

TEST(EnsembleDensityMatrix, HermitianUnitTracePsd) {
  Rng rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<WeightedState> entries;
    std::vector<double> w(5);
    double sum = 0.0;
    for (auto& x : w) sum += (x = u(rng));
    for (auto& x : w) entries.push_back({x / sum, normalize_gauge(gqt::testing::random_vector(rng, 3))});
    const CMatrix rho = ensemble_density_matrix(WeightedStateEnsemble(entries));
    EXPECT_LT(max_abs(rho - rho.adjoint()), 1e-15);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Bipartite, ProductStateCollapses) {
  Rng rng(11);
  const CVector a = normalize_gauge(gqt::testing::random_vector(rng, 3)).amplitudes();
  const CVector b = normalize_gauge(gqt::testing::random_vector(rng, 4)).amplitudes();
  const CMatrix psi = a * b.transpose();
  const auto ens = bipartite_geometric_state(psi);
  EXPECT_EQ(ens.size(), 4u);
  for (const auto& e : ens.entries()) EXPECT_TRUE(same_ray(e.state, normalize_gauge(a), 1e-12));
  const auto merged = ens.coalesced(1e-12);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_NEAR(merged.entries()[0].weight, 1.0, 1e-12);
}

TEST(Bipartite, BellState) {
  CMatrix psi = CMatrix::Zero(2, 2);
  psi(0, 0) = psi(1, 1) = 1.0 / std::sqrt(2.0);
  const auto ens = bipartite_geometric_state(psi);
  ASSERT_EQ(ens.size(), 2u);
  EXPECT_NEAR(ens.entries()[0].weight, 0.5, 1e-15);
  EXPECT_NEAR(ens.entries()[1].weight, 0.5, 1e-15);
  EXPECT_TRUE(same_ray(ens.entries()[0].state, ProjectiveState::basis(2, 0)));
  EXPECT_TRUE(same_ray(ens.entries()[1].state, ProjectiveState::basis(2, 1)));
}

TEST(Bipartite, ReconstructsPartialTrace) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix psi(2, 3);
    for (Eigen::Index c = 0; c < 3; ++c) psi.col(c) = gqt::testing::random_vector(rng, 2);
    psi /= psi.norm();
    const auto ens = bipartite_geometric_state(psi);
    EXPECT_LT(max_abs(ensemble_density_matrix(ens) - partial_trace_b(psi)), 1e-10);
    // Weights are the diagonal of ρ^B = ψᵀ conj(ψ).
    const CMatrix rho_b = psi.transpose() * psi.conjugate();
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(ens.entries()[k].weight, rho_b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real(),
                  1e-15);
    }
  }
}

TEST(Bipartite, DropsZeroColumnsAndRejectsUnnormalized) {
  CMatrix psi = CMatrix::Zero(2, 3);
  psi(0, 0) = 1.0;
  const auto ens = bipartite_geometric_state(psi);
  EXPECT_EQ(ens.size(), 1u);
  EXPECT_THROW(bipartite_geometric_state(2.0 * psi), DomainError);
  EXPECT_NO_THROW(bipartite_geometric_state((1.0 + 1e-9) * psi));
}
