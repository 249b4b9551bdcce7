#include <cmath>

#include "test_util.hpp"

using namespace opsq;
using opsq::testing::diag;

namespace {

const double kLn2 = std::log(2.0);

double f_direct(double x) { return x <= 0.0 ? 0.0 : -x * std::log(x); }

double entropy_from_eigs(const ComplexMatrix& m) {
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    s += f_direct(std::max(0.0, es.eigenvalues()[i]));
  return s;
}

// S(A) + S(B) - S(AB) on the embedded qubit state.
double embedded_mutual_information(const OneParticleState& s, const IndexSet& i1,
                                   const IndexSet& i2) {
  const auto full = oracle::embed_density(s);
  const auto a = oracle::full_partial_trace(full, i2);
  const auto b = oracle::full_partial_trace(full, i1);
  return entropy_from_eigs(a.rho_hat) + entropy_from_eigs(b.rho_hat) -
         entropy_from_eigs(full.rho_hat);
}

ComplexMatrix diag_projector(Eigen::Index n, const IndexSet& idx) {
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (int l : idx.members()) p(l - 1, l - 1) = 1.0;
  return p;
}

}  // namespace

TEST(EntropyScalar, Values) {
  EXPECT_EQ(entropy_scalar(0.0), 0.0);
  EXPECT_NEAR(entropy_scalar(0.5), kLn2 / 2, 1e-15);
  EXPECT_NEAR(entropy_scalar(std::exp(-1.0)), std::exp(-1.0), 1e-15);
  EXPECT_EQ(entropy_scalar(1.0), 0.0);
  EXPECT_THROW(entropy_scalar(-0.1), DomainError);
  EXPECT_THROW(entropy_scalar(1.1), DomainError);
  EXPECT_NO_THROW(entropy_scalar(-1e-14));
}

TEST(VonNeumann, Values) {
  auto g0 = rnd::engine(41);
  const ComplexVector v = rnd::unit_vector(g0, 3);
  EXPECT_NEAR(von_neumann_entropy(v * v.adjoint()), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(diag({0.5, 0.5})), kLn2, 1e-15);
  auto g = rnd::engine(42);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix rho = rnd::density(g, 4);
    EXPECT_NEAR(von_neumann_entropy(rho), entropy_from_eigs(rho), 1e-12);
  }
  EXPECT_THROW(von_neumann_entropy(diag({1.5, -0.5})), DomainError);
}

TEST(Shannon, Values) {
  EXPECT_EQ(shannon_entropy(ClassicalDistribution::make({1.0, 0.0})), 0.0);
  EXPECT_NEAR(shannon_entropy(ClassicalDistribution::make({0.5, 0.5})), kLn2, 1e-15);
  auto g = rnd::engine(43);
  for (int trial = 0; trial < 20; ++trial) {
    double p0 = rnd::uniform(g), p1 = rnd::uniform(g), p2 = rnd::uniform(g);
    const double z = p0 + p1 + p2;
    p0 /= z, p1 /= z, p2 /= z;
    EXPECT_NEAR(shannon_entropy(ClassicalDistribution::make({p0 + p2, p1})),
                f_direct(p0 + p2) + f_direct(p1), 1e-14);
  }
  EXPECT_THROW(ClassicalDistribution::make({0.5, 0.6}), ValidationError);
}

TEST(MutualInformation, Vacuum) {
  const auto rep = mutual_information(OneParticleState::vacuum(2), {1}, {2});
  EXPECT_EQ(rep.total, 0.0);
}

TEST(MutualInformation, DiagonalIsPurelyClassical) {
  const auto s = OneParticleState::strict(diag({0.5, 0.5}));
  const auto rep = mutual_information(s, {1}, {2});
  EXPECT_NEAR(rep.quantum_term, 0.0, 1e-15);
  EXPECT_NEAR(rep.classical_term, kLn2, 1e-15);
  EXPECT_NEAR(rep.total, kLn2, 1e-15);
  EXPECT_NEAR(rep.pi[0], 0.0, 1e-15);
  EXPECT_NEAR(rep.pi[1], 0.5, 1e-15);
}

TEST(MutualInformation, CoherentProjector) {
  ComplexMatrix r(2, 2);
  r << 0.5, 0.5, 0.5, 0.5;
  const auto s = OneParticleState::strict(r);
  const auto rep = mutual_information(s, {1}, {2});
  EXPECT_NEAR(rep.quantum_term, kLn2, 1e-12);
  EXPECT_NEAR(rep.classical_term, kLn2, 1e-12);
  EXPECT_NEAR(rep.total, 2 * kLn2, 1e-12);
  EXPECT_NEAR(embedded_mutual_information(s, {1}, {2}), 2 * kLn2, 1e-12);
}

TEST(MutualInformation, MatchesEmbeddedEntropiesAndSplits) {
  auto g = rnd::engine(44);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const auto s = rnd::zero_coherence_state(g, n);
    IndexSet i1 = rnd::index_set(g, n);
    const IndexSet i2 = i1.complement(n);
    const auto rep = mutual_information(s, i1, i2);
    EXPECT_NEAR(rep.total, embedded_mutual_information(s, i1, i2), 1e-10);
    EXPECT_NEAR(rep.total, rep.quantum_term + rep.classical_term, 1e-12);
    EXPECT_GE(rep.quantum_term, -1e-12);
    EXPECT_GE(rep.classical_term, -1e-12);
  }
}

TEST(MutualInformation, Errors) {
  auto g = rnd::engine(45);
  EXPECT_THROW(mutual_information(OneParticleState::vacuum(3), {1}, {2}), ValidationError);
  EXPECT_THROW(mutual_information(OneParticleState::vacuum(2), {1, 2}, {2}), ValidationError);
  ComplexVector psi(2);
  psi << 0.3, 0.0;
  const auto coherent = make_state(0.5, psi, diag({0.5, 0.0}));
  try {
    mutual_information(coherent, {1}, {2});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.invariant(), "zero_coherence");
  }
}

TEST(Instrument, ProjectionsReduceToPartition) {
  auto g = rnd::engine(46);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 4;
    const auto s = rnd::zero_coherence_state(g, n);
    IndexSet i1 = rnd::index_set(g, n);
    const IndexSet i2 = i1.complement(n);
    const auto a = mutual_information(s, i1, i2);
    const auto b = mutual_information_instrument(s, QuantumOperation::make({diag_projector(n, i1)}),
                                                 QuantumOperation::make({diag_projector(n, i2)}));
    EXPECT_NEAR(a.total, b.total, 1e-12);
    EXPECT_NEAR(a.quantum_term, b.quantum_term, 1e-12);
    EXPECT_NEAR(a.classical_term, b.classical_term, 1e-12);
  }
}

TEST(Instrument, UnsharpMeasurementWeights) {
  const double q = 0.3;
  const auto s = make_state(0.2, ComplexVector::Zero(3), diag({0.3, 0.1, 0.4}));
  const IndexSet i1{1, 2}, i2{3};
  const ComplexMatrix p1 = diag_projector(3, i1), p2 = diag_projector(3, i2);
  const auto phi1 = QuantumOperation::make({std::sqrt(q) * p1});
  const auto phi2 = QuantumOperation::make({std::sqrt(1 - q) * p1, p2});
  const auto rep = mutual_information_instrument(s, phi1, phi2);
  const double w1 = q * 0.4;
  const double w2 = 0.8 - w1;
  EXPECT_NEAR(rep.pi[1], w1, 1e-15);
  EXPECT_NEAR(rep.pi[2], w2, 1e-15);
  const double classical = f_direct(0.2 + w2) + f_direct(w1) + f_direct(0.2 + w1) + f_direct(w2) -
                           f_direct(0.2) - f_direct(w1) - f_direct(w2);
  EXPECT_NEAR(rep.classical_term, classical, 1e-14);
}

TEST(Instrument, RandomAdditivity) {
  auto g = rnd::engine(47);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3;
    double w[4], z = 0.0;
    for (double& x : w) z += (x = rnd::uniform(g, 0.05, 1.0));
    const auto s = make_state(w[0] / z, ComplexVector::Zero(n), diag({w[1] / z, w[2] / z, w[3] / z}));
    // K1, K2, K3 from an isometry; Phi1 = {K1}, Phi2 = {K2, K3}.
    const ComplexMatrix stacked = rnd::ginibre(g, 3 * n, n);
    const Eigen::HouseholderQR<ComplexMatrix> qr(stacked);
    const ComplexMatrix iso = qr.householderQ() * ComplexMatrix::Identity(3 * n, n);
    const ComplexMatrix k1 = iso.topRows(n), k2 = iso.middleRows(n, n), k3 = iso.bottomRows(n);
    const auto rep = mutual_information_instrument(s, QuantumOperation::make({k1}),
                                                   QuantumOperation::make({k2, k3}));
    const ComplexMatrix o1 = k1 * s.r() * k1.adjoint();
    const ComplexMatrix o2 = k2 * s.r() * k2.adjoint() + k3 * s.r() * k3.adjoint();
    const double quantum = entropy_from_eigs(o1) + entropy_from_eigs(o2) - entropy_from_eigs(s.r());
    const double p0 = s.rho00(), p1 = o1.trace().real(), p2 = o2.trace().real();
    const double classical = f_direct(p0 + p2) + f_direct(p1) + f_direct(p0 + p1) + f_direct(p2) -
                             f_direct(p0) - f_direct(p1) - f_direct(p2);
    EXPECT_NEAR(rep.quantum_term, quantum, 1e-10);
    EXPECT_NEAR(rep.classical_term, classical, 1e-10);
    EXPECT_NEAR(rep.total, quantum + classical, 1e-10);
  }
}

TEST(Instrument, RejectsNonTracePreserving) {
  const auto s = OneParticleState::strict(diag({0.5, 0.5}));
  EXPECT_THROW(mutual_information_instrument(s, QuantumOperation::make({diag({1.0, 0.0})}),
                                             QuantumOperation::make({diag({0.0, 0.5})})),
               ValidationError);
}

TEST(MarkovCurve, Values) {
  const auto c = markov_decay_curve(1.0, {0.0, kLn2, 3.0});
  EXPECT_EQ(c[0].second, 0.0);
  EXPECT_NEAR(c[1].second, kLn2, 1e-15);
  const double e3 = std::exp(-3.0);
  EXPECT_NEAR(c[2].second, f_direct(e3) + f_direct(1 - e3), 1e-15);
  EXPECT_NEAR(c[2].second, 0.197887801243, 1e-12);
  EXPECT_THROW(markov_decay_curve(0.0, {1.0}), ValidationError);
  EXPECT_THROW(markov_decay_curve(1.0, {-1.0}), ValidationError);
}

TEST(MarkovCurve, UniqueMaximumAtLn2OverGamma) {
  for (double gamma : {0.5, 1.0, 3.0}) {
    std::vector<double> t;
    for (int k = 0; k <= 2000; ++k) t.push_back(k * 6.0 / gamma / 2000);
    const auto c = markov_decay_curve(gamma, t);
    std::size_t best = 0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      if (c[k].second > c[best].second) best = k;
    }
    EXPECT_NEAR(c[best].first, kLn2 / gamma, 6.0 / gamma / 2000);
    for (std::size_t k = 1; k <= best; ++k) EXPECT_GE(c[k].second, c[k - 1].second);
    for (std::size_t k = best + 1; k < c.size(); ++k) EXPECT_LE(c[k].second, c[k - 1].second);
  }
}
