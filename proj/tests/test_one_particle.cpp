#include "test_util.hpp"

using namespace opsq;
using opsq::testing::diag;

TEST(MakeState, Vacuum) {
  const auto s = make_state(1.0, ComplexVector::Zero(3), ComplexMatrix::Zero(3, 3));
  ComplexMatrix e00 = ComplexMatrix::Zero(4, 4);
  e00(0, 0) = 1.0;
  EXPECT_EQ(s.assemble(), e00);
  EXPECT_FALSE(s.is_strictly_one_particle());
}

TEST(MakeState, StrictlyOneParticle) {
  const auto s = make_state(0.0, ComplexVector::Zero(2), diag({0.5, 0.5}));
  EXPECT_TRUE(s.is_strictly_one_particle());
  ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
  expected.bottomRightCorner(2, 2) = diag({0.5, 0.5});
  EXPECT_EQ(s.assemble(), expected);
}

TEST(MakeState, SmallGroundPopulationIsNotStrict) {
  const auto s = make_state(1e-3, ComplexVector::Zero(2), diag({0.5, 0.5 - 1e-3}));
  EXPECT_FALSE(s.is_strictly_one_particle());
}

TEST(MakeState, PureStateHasSpectrumOneZeroZero) {
  auto g = rnd::engine(21);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexVector phi = rnd::unit_vector(g, 3);
    const ComplexMatrix p = phi * phi.adjoint();
    const auto s = make_state(p(0, 0).real(), p.col(0).tail(2), p.bottomRightCorner(2, 2));
    const RealVector ev = hermitian_eigenvalues(s.assemble());
    EXPECT_NEAR(ev[0], 0.0, 1e-12);
    EXPECT_NEAR(ev[1], 0.0, 1e-12);
    EXPECT_NEAR(ev[2], 1.0, 1e-12);
  }
}

TEST(MakeState, ValidationErrorsNameTheInvariant) {
  auto invariant_of = [](auto&& fn) -> std::string {
    try {
      fn();
    } catch (const ValidationError& e) {
      return e.invariant();
    }
    return "none";
  };
  ComplexMatrix r = diag({0.5, 0.5});
  r(0, 1) = 1e-3;
  EXPECT_EQ(invariant_of([&] { make_state(0.0, ComplexVector::Zero(2), r); }), "hermiticity");
  EXPECT_EQ(invariant_of([&] { make_state(0.1, ComplexVector::Zero(2), diag({0.5, 0.5})); }),
            "unit_trace");
  EXPECT_EQ(invariant_of([&] { make_state(0.0, ComplexVector::Zero(2), diag({1.5, -0.5})); }),
            "positivity");
  ComplexVector psi(2);
  psi << 0.9, 0.0;  // |psi|^2 > rho00 * R11
  EXPECT_EQ(invariant_of([&] { make_state(0.5, psi, diag({0.5, 0.0})); }), "positivity");
  EXPECT_THROW(make_state(1.0, ComplexVector::Zero(3), ComplexMatrix::Zero(2, 2)), DimensionError);
}

TEST(Assemble, RoundTripIsBitExact) {
  auto g = rnd::engine(22);
  for (int trial = 0; trial < 25; ++trial) {
    const auto s = rnd::state(g, 1 + trial % 6);
    const auto back = OneParticleState::disassemble(s.assemble());
    EXPECT_EQ(back.rho00(), s.rho00());
    EXPECT_EQ(back.psi(), s.psi());
    EXPECT_EQ(back.r(), s.r());
  }
}

TEST(Assemble, SpectrumInUnitIntervalSumsToOne) {
  auto g = rnd::engine(23);
  for (int trial = 0; trial < 25; ++trial) {
    const auto s = rnd::state(g, 1 + trial % 6);
    const RealVector ev = hermitian_eigenvalues(s.assemble());
    EXPECT_GE(ev.minCoeff(), -1e-10);
    EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-10);
    EXPECT_NEAR(ev.sum(), 1.0, 1e-10);
    EXPECT_LE(hermiticity_defect(s.assemble()), 0.0);
  }
}

TEST(PureState, NormalizationEnforced) {
  EXPECT_THROW(OneParticlePureState::make(1.0, ComplexVector::Ones(2)), ValidationError);
  const auto p = OneParticlePureState::make(0.0, opsq::testing::basis(2, 0));
  EXPECT_EQ(p.n(), 2);
  EXPECT_NEAR(p.density().r()(0, 0).real(), 1.0, 0.0);
}
