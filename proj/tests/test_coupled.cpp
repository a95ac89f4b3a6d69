#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fluxcz/coupled_system.hpp"
#include "fluxcz/errors.hpp"
#include "oracles.hpp"

using namespace fluxcz;
using std::numbers::pi;

namespace {

class Coupled : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    a_ = new QubitEigensystem(diagonalize(FluxoniumParams::make(1.5, 1.0, 5.5, pi)));
    b_ = new QubitEigensystem(diagonalize(FluxoniumParams::make(1.2, 1.0, 5.7, pi)));
  }
  static void TearDownTestSuite() {
    delete a_;
    delete b_;
  }

  static CoupledSystem make(CouplingKind kind, double j) { return assemble(*a_, *b_, {kind, j}); }

  static QubitEigensystem* a_;
  static QubitEigensystem* b_;
};

QubitEigensystem* Coupled::a_ = nullptr;
QubitEigensystem* Coupled::b_ = nullptr;

std::vector<double> grid(double stop, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(stop * i / (points - 1));
  return out;
}

}  // namespace

TEST(CouplingKindNames, RoundTrip) {
  EXPECT_EQ(parse_coupling_kind(to_string(CouplingKind::capacitive)), CouplingKind::capacitive);
  EXPECT_EQ(parse_coupling_kind("inductive"), CouplingKind::inductive);
  EXPECT_THROW(parse_coupling_kind("galvanic"), std::invalid_argument);
  EXPECT_EQ(to_string(BareLabel{2, 1}), "21");
}

TEST_F(Coupled, ZeroCouplingFactorizes) {
  for (auto kind : {CouplingKind::capacitive, CouplingKind::inductive}) {
    const CoupledSystem sys = make(kind, 0.0);
    for (int k = 0; k < 5; ++k) {
      for (int l = 0; l < 5; ++l) {
        EXPECT_NEAR(sys.energy({k, l}), a_->energies(k) + b_->energies(l), 1e-12);
        const int idx = sys.index_of({k, l});
        EXPECT_NEAR(std::abs(sys.eigenvectors(k * 5 + l, idx)), 1.0, 1e-12);
      }
    }
    const GateFiguresOfMerit fom = figures_of_merit(sys);
    EXPECT_NEAR(fom.delta_omega, 0.0, 1e-12);
    EXPECT_NEAR(fom.delta_c, 0.0, 1e-12);
    EXPECT_NEAR(fom.delta, 0.248, 1e-3);
  }
}

TEST_F(Coupled, LabelsFormBijection) {
  const CoupledSystem sys = make(CouplingKind::capacitive, 0.3);
  std::vector<int> seen(25, 0);
  for (const BareLabel& l : sys.labels) {
    ASSERT_GE(l.a, 0);
    ASSERT_LT(l.a, 5);
    ASSERT_GE(l.b, 0);
    ASSERT_LT(l.b, 5);
    ++seen[l.a * 5 + l.b];
  }
  for (int count : seen) EXPECT_EQ(count, 1);
  for (int i = 1; i < sys.dimension(); ++i) EXPECT_GE(sys.dressed_energies(i), sys.dressed_energies(i - 1));
}

TEST_F(Coupled, CrosstalkRatioAtReferenceCoupling) {
  const GateFiguresOfMerit fom = figures_of_merit(make(CouplingKind::capacitive, 0.2));
  EXPECT_NEAR(fom.delta_omega / fom.delta_c, 100.0, 20.0);
  // Frozen from the continuation oracle on the real-space grid.
  EXPECT_NEAR(fom.delta_omega, 0.016529319012, 1e-8);
  EXPECT_NEAR(fom.delta_c, 0.000180738819, 1e-9);
}

TEST_F(Coupled, InductiveCrosstalkSmall) {
  const GateFiguresOfMerit fom = figures_of_merit(make(CouplingKind::inductive, 0.015));
  EXPECT_GT(fom.delta_omega, 20.0 * std::abs(fom.delta_c));
  EXPECT_NEAR(fom.delta_omega, 0.020797135298, 1e-8);
  EXPECT_NEAR(fom.delta_c, 0.000185118076, 1e-9);
}

TEST_F(Coupled, MatchesContinuationOracle) {
  const oracle::GridQubit ga = oracle::grid_qubit(1.5, 1.0, 5.5, pi, 5, 601);
  const oracle::GridQubit gb = oracle::grid_qubit(1.2, 1.0, 5.7, pi, 5, 601);
  struct Case {
    CouplingKind kind;
    oracle::Coupling oracle_kind;
    double stop;
  };
  for (const Case& c : {Case{CouplingKind::capacitive, oracle::Coupling::capacitive, 0.3},
                        Case{CouplingKind::inductive, oracle::Coupling::inductive, 0.03}}) {
    for (double j : grid(c.stop, 10)) {
      const CoupledSystem sys = make(c.kind, j);
      const oracle::ContinuationSpectrum ref = oracle::continued_spectrum(ga, gb, c.oracle_kind, j);
      for (int k = 0; k < 5; ++k)
        for (int l = 0; l < 5; ++l) EXPECT_NEAR(sys.energy({k, l}), ref.energies(k * 5 + l), 1e-7) << j;
    }
  }
}

TEST_F(Coupled, FrequencyMismatchGrowsWithCoupling) {
  for (auto [kind, stop] : {std::pair{CouplingKind::capacitive, 0.3}, std::pair{CouplingKind::inductive, 0.03}}) {
    double previous = -1.0;
    for (double j : grid(stop, 10)) {
      const double dw = figures_of_merit(make(kind, j)).delta_omega;
      EXPECT_GT(dw, previous) << to_string(kind) << " J=" << j;
      previous = dw;
    }
  }
}

TEST_F(Coupled, ChargeElementTrendsWithCapacitiveCoupling) {
  double nb = -1.0;
  double na = 1e9;
  for (double j : grid(0.3, 10)) {
    const CoupledSystem sys = make(CouplingKind::capacitive, j);
    const double nb_now = dressed_matrix_element(sys, DressedOperator::n_b, {1, 1}, {2, 1});
    const double na_now = dressed_matrix_element(sys, DressedOperator::n_a, {1, 1}, {2, 1});
    EXPECT_GT(nb_now, nb);
    EXPECT_LT(na_now, na);
    nb = nb_now;
    na = na_now;
  }
}

TEST_F(Coupled, NoncomputationalRepulsionGrows) {
  double previous = 0.0;
  for (double j : grid(0.3, 10)) {
    const CoupledSystem sys = make(CouplingKind::capacitive, j);
    const double split = std::abs(sys.energy({2, 1}) - sys.energy({1, 2}));
    EXPECT_GE(split, previous);
    previous = split;
  }
}

TEST_F(Coupled, TwentyStateNearlyUnshifted) {
  for (double j : {0.05, 0.1, 0.2}) {
    const CoupledSystem sys = make(CouplingKind::capacitive, j);
    const double shift20 = std::abs(sys.energy({2, 0}) - a_->energies(2));
    const double shift21 = std::abs(sys.energy({2, 1}) - a_->energies(2) - b_->energies(1));
    EXPECT_LT(10.0 * shift20, shift21) << "J=" << j;
  }
}

TEST_F(Coupled, SelectedMatrixElements) {
  const CoupledSystem bare = make(CouplingKind::capacitive, 0.0);
  EXPECT_LT(dressed_matrix_element(bare, DressedOperator::n_b, {1, 1}, {2, 1}), 1e-12);

  const CoupledSystem sys = make(CouplingKind::capacitive, 0.2);
  EXPECT_GT(dressed_matrix_element(sys, DressedOperator::n_b, {1, 1}, {2, 1}),
            5.0 * dressed_matrix_element(sys, DressedOperator::n_b, {1, 0}, {2, 0}));
  EXPECT_LT(dressed_matrix_element(sys, DressedOperator::n_a, {1, 0}, {1, 2}), 1e-8);
  EXPECT_LT(dressed_matrix_element(sys, DressedOperator::n_b, {1, 0}, {1, 2}), 1e-8);
  EXPECT_GT(dressed_matrix_element(sys, DressedOperator::n_b, {1, 0}, {0, 2}), 1e-3);
}

TEST_F(Coupled, TwoQubitParityRule) {
  const CoupledSystem sys = make(CouplingKind::capacitive, 0.2);
  for (auto which : {DressedOperator::n_a, DressedOperator::n_b}) {
    const Eigen::MatrixXcd& op = sys.op(which);
    const double biggest = op.cwiseAbs().maxCoeff();
    for (int i = 0; i < sys.dimension(); ++i) {
      for (int f = 0; f < sys.dimension(); ++f) {
        const int pi_ = sys.labels[i].a + sys.labels[i].b;
        const int pf = sys.labels[f].a + sys.labels[f].b;
        if ((pi_ + pf) % 2 == 0) EXPECT_LT(std::abs(op(i, f)), 1e-8 * biggest);
      }
    }
  }
}

TEST_F(Coupled, DressedOperatorsHermitian) {
  const CoupledSystem sys = make(CouplingKind::inductive, 0.02);
  for (auto which : {DressedOperator::n_a, DressedOperator::n_b, DressedOperator::phi_a, DressedOperator::phi_b}) {
    const Eigen::MatrixXcd& op = sys.op(which);
    EXPECT_LT((op - op.adjoint()).norm() / op.norm(), 1e-12);
  }
}

TEST_F(Coupled, AmbiguousLabelingThrows) {
  EXPECT_THROW(make(CouplingKind::inductive, 0.2), LabelingError);
}

TEST_F(Coupled, UnknownLabelThrows) {
  const CoupledSystem sys = make(CouplingKind::capacitive, 0.1);
  EXPECT_THROW(sys.index_of({5, 0}), LabelingError);
  EXPECT_THROW(dressed_matrix_element(sys, DressedOperator::n_a, {0, 0}, {0, 7}), LabelingError);
}

TEST_F(Coupled, RejectsBadInputs) {
  EXPECT_THROW(make(CouplingKind::capacitive, -0.1), std::invalid_argument);
  const QubitEigensystem small = diagonalize(FluxoniumParams::make(1.2, 1.0, 5.7, pi), 4);
  EXPECT_THROW(assemble(*a_, small, {CouplingKind::capacitive, 0.1}), std::invalid_argument);
}

TEST(CouplingFromElements, CapacitiveFormula) {
  // C_A, C_B giving E_C/h = 1.5, 1.2 GHz; J_C = 8 E_C,B C_M / C_A, so
  // C_M / C_A = 0.2 / 9.6 hits 0.2 GHz.
  const double c_a = 12.913486216439416;
  const double c_b = 16.14185777054927;
  const CouplingFromElements r = coupling_from_elements(CouplingKind::capacitive, c_a / 48.0, c_a, c_b);
  EXPECT_NEAR(r.spec.strength, 0.2, 1e-12);
  EXPECT_EQ(r.spec.kind, CouplingKind::capacitive);
  EXPECT_FALSE(r.warning);

  const double j1 = coupling_from_elements(CouplingKind::capacitive, 0.3, c_a, c_b).spec.strength;
  const double j2 = coupling_from_elements(CouplingKind::capacitive, 0.6, c_a, c_b).spec.strength;
  EXPECT_DOUBLE_EQ(j2, 2.0 * j1);
  EXPECT_EQ(coupling_from_elements(CouplingKind::capacitive, 0.0, c_a, c_b).spec.strength, 0.0);
}

TEST(CouplingFromElements, InductiveFormula) {
  // L giving E_L/h = 1 GHz; J_L = E_L,A L_M / L_B.
  const double l = 163.4615128067812;
  const CouplingFromElements r = coupling_from_elements(CouplingKind::inductive, 0.015 * l, l, l);
  EXPECT_NEAR(r.spec.strength, 0.015, 1e-12);
  EXPECT_NEAR(r.ratio, 0.015, 1e-12);
}

TEST(CouplingFromElements, Limits) {
  const auto warned = coupling_from_elements(CouplingKind::capacitive, 2.0, 10.0, 12.0);
  EXPECT_TRUE(warned.warning.has_value());
  EXPECT_NEAR(warned.ratio, 0.2, 1e-12);
  EXPECT_THROW(coupling_from_elements(CouplingKind::capacitive, 3.5, 10.0, 12.0), std::invalid_argument);
  EXPECT_THROW(coupling_from_elements(CouplingKind::inductive, 1.0, 0.0, 12.0), std::invalid_argument);
  EXPECT_THROW(coupling_from_elements(CouplingKind::inductive, -1.0, 10.0, 12.0), std::invalid_argument);
}
