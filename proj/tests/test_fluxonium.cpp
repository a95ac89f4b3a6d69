#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fluxcz/errors.hpp"
#include "fluxcz/fluxonium.hpp"
#include "oracles.hpp"

using namespace fluxcz;
using std::numbers::pi;

namespace {

const FluxoniumParams kQubitA = FluxoniumParams::make(1.5, 1.0, 5.5, pi);
const FluxoniumParams kQubitB = FluxoniumParams::make(1.2, 1.0, 5.7, pi);

double hermiticity_defect(const Eigen::MatrixXcd& m) { return (m - m.adjoint()).norm() / m.norm(); }

// Lowest levels from the real-space grid, frozen from oracle::grid_qubit.
const double kGridA[] = {0.0, 0.605954692428, 5.620319818233, 8.864818018483, 13.274141253478};
const double kGridB[] = {0.0, 0.354325243131, 5.120682933766, 7.638559758569, 11.552931389060};

}  // namespace

TEST(FluxoniumParams, WrapsFluxIntoPeriod) {
  EXPECT_NEAR(FluxoniumParams::make(1.0, 1.0, 1.0, 3.0 * pi).phi_ext, pi, 1e-12);
  EXPECT_NEAR(FluxoniumParams::make(1.0, 1.0, 1.0, -pi / 2).phi_ext, 1.5 * pi, 1e-12);
  EXPECT_DOUBLE_EQ(FluxoniumParams::make(1.0, 1.0, 1.0, 0.0).phi_ext, 0.0);
}

TEST(FluxoniumParams, RejectsInvalidEnergies) {
  EXPECT_THROW(FluxoniumParams::make(0.0, 1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(FluxoniumParams::make(1.0, -1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(FluxoniumParams::make(1.0, 1.0, -0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(FluxoniumParams::make(1.0, 1.0, 1.0, NAN), std::invalid_argument);
  EXPECT_NO_THROW(FluxoniumParams::make(1.0, 1.0, 0.0, 0.0));
}

TEST(Hamiltonian, SymmetricAndSized) {
  const Eigen::MatrixXd h = build_hamiltonian(kQubitA, 60);
  ASSERT_EQ(h.rows(), 60);
  EXPECT_LT((h - h.transpose()).norm() / h.norm(), 1e-12);
}

TEST(Hamiltonian, RejectsTinyBasis) {
  EXPECT_THROW(build_hamiltonian(kQubitA, 19), TruncationError);
  EXPECT_NO_THROW(build_hamiltonian(kQubitA, kMinBasisSize));
}

TEST(Diagonalize, HarmonicLimit) {
  const auto p = FluxoniumParams::make(0.5, 1.0, 0.0, 0.0);
  for (int basis : {40, 120}) {
    const QubitEigensystem sys = diagonalize(p, 6, {.basis_size = basis});
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(sys.energies(i), 2.0 * i, 1e-9) << "level " << i;
    const double biggest = sys.n_op.cwiseAbs().maxCoeff();
    for (int i = 0; i < 6; ++i) {
      for (int f = 0; f < 6; ++f) {
        if (std::abs(i - f) == 1) {
          EXPECT_GT(std::abs(sys.n_op(i, f)), 0.1);
        } else {
          EXPECT_LT(std::abs(sys.n_op(i, f)), 1e-10 * biggest) << i << "," << f;
        }
      }
    }
  }
}

TEST(Diagonalize, ReferenceQubitScales) {
  const QubitEigensystem a = diagonalize(kQubitA);
  const QubitEigensystem b = diagonalize(kQubitB);
  for (const auto* sys : {&a, &b}) {
    EXPECT_GE(transition(*sys, 0, 1), 0.3);
    EXPECT_LE(transition(*sys, 0, 1), 0.7);
    EXPECT_GT(transition(*sys, 1, 2), 4.0);
    EXPECT_LT(transition(*sys, 1, 2), 6.0);
  }
  EXPECT_NEAR(std::abs(transition(a, 1, 2) - transition(b, 1, 2)), 0.248, 1e-3);
  EXPECT_NEAR(std::abs(transition(a, 1, 2) - transition(b, 1, 2)), 0.24800743517, 1e-8);
}

TEST(Diagonalize, EnergiesAscendingFromZero) {
  const QubitEigensystem a = diagonalize(kQubitA);
  EXPECT_EQ(a.energies(0), 0.0);
  for (int i = 1; i < a.n_keep; ++i) EXPECT_GT(a.energies(i), a.energies(i - 1));
}

TEST(Diagonalize, MatchesFrozenGridValues) {
  const QubitEigensystem a = diagonalize(kQubitA);
  const QubitEigensystem b = diagonalize(kQubitB);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(a.energies(i), kGridA[i], 1e-6);
    EXPECT_NEAR(b.energies(i), kGridB[i], 1e-6);
  }
  EXPECT_NEAR(std::abs(a.n_op(0, 1)), 0.1188907509, 1e-6);
  EXPECT_NEAR(std::abs(a.n_op(1, 2)), 0.5561165857, 1e-6);
  EXPECT_NEAR(std::abs(a.n_op(1, 2)) / std::abs(a.n_op(0, 1)), 4.67754288, 1e-5);
}

TEST(Diagonalize, MatchesRealSpaceGrid) {
  for (const auto& p : {kQubitA, kQubitB, FluxoniumParams::make(1.0, 0.8, 4.0, 2.0)}) {
    const QubitEigensystem sys = diagonalize(p);
    const oracle::GridQubit grid = oracle::grid_qubit(p.e_c, p.e_l, p.e_j, p.phi_ext, 5, 601);
    for (int i = 0; i < 5; ++i) {
      EXPECT_NEAR(sys.energies(i), grid.energies(i), 1e-6);
      for (int f = 0; f < 5; ++f) {
        EXPECT_NEAR(std::abs(sys.n_op(i, f)), std::abs(grid.d_phi(i, f)), 1e-6);
        EXPECT_NEAR(std::abs(sys.phi_op(i, f)), std::abs(grid.phi(i, f)), 1e-6);
      }
    }
  }
}

TEST(Diagonalize, ChargeElementsLargerAboveQubitTransition) {
  const QubitEigensystem a = diagonalize(kQubitA);
  EXPECT_GT(std::abs(a.n_op(1, 2)), 4.0 * std::abs(a.n_op(0, 1)));
}

TEST(Diagonalize, OperatorsHermitian) {
  for (const auto& p : {kQubitA, kQubitB, FluxoniumParams::make(1.0, 0.8, 4.0, 2.0)}) {
    const QubitEigensystem sys = diagonalize(p);
    EXPECT_LT(hermiticity_defect(sys.n_op), 1e-12);
    EXPECT_LT(hermiticity_defect(sys.phi_op), 1e-12);
  }
}

TEST(Diagonalize, CommutatorIdentity) {
  // [H, phi] = -8i E_C n, so |w_if phi_if| = 8 E_C |n_if|.
  for (const auto& p : {kQubitA, kQubitB, FluxoniumParams::make(1.0, 0.8, 4.0, 2.0)}) {
    const QubitEigensystem sys = diagonalize(p);
    for (int i = 0; i < sys.n_keep; ++i) {
      for (int f = 0; f < sys.n_keep; ++f) {
        const double lhs = std::abs(transition(sys, i, f) * sys.phi_op(i, f));
        const double rhs = 8.0 * p.e_c * std::abs(sys.n_op(i, f));
        if (rhs < 1e-6) {
          EXPECT_LT(lhs, 1e-6);
        } else {
          EXPECT_NEAR(lhs / rhs, 1.0, 1e-6) << i << "->" << f;
        }
      }
    }
  }
}

TEST(Diagonalize, ParityAtHalfFlux) {
  for (const auto& p : {kQubitA, kQubitB}) {
    const QubitEigensystem sys = diagonalize(p);
    const double n_max = sys.n_op.cwiseAbs().maxCoeff();
    const double phi_max = sys.phi_op.cwiseAbs().maxCoeff();
    for (int i = 0; i < sys.n_keep; ++i) {
      for (int f = 0; f < sys.n_keep; ++f) {
        if ((i + f) % 2 != 0) continue;
        EXPECT_LT(std::abs(sys.n_op(i, f)), 1e-8 * n_max);
        EXPECT_LT(std::abs(sys.phi_op(i, f)), 1e-8 * phi_max);
      }
    }
  }
}

TEST(Diagonalize, ConvergedAgainstLargerBasis) {
  const QubitEigensystem small = diagonalize(kQubitA, 5, {.basis_size = 120, .check_convergence = false});
  const QubitEigensystem large = diagonalize(kQubitA, 5, {.basis_size = 180, .check_convergence = false});
  const double span = large.energies(4);
  for (int i = 0; i < 5; ++i) EXPECT_LT(std::abs(small.energies(i) - large.energies(i)), 1e-9 * span);
}

TEST(Diagonalize, Errors) {
  EXPECT_THROW(diagonalize(kQubitA, 6, {.basis_size = 20}), TruncationError);
  EXPECT_THROW(diagonalize(kQubitA, 5, {.basis_size = 20}), ConvergenceError);
  EXPECT_THROW(diagonalize(kQubitA, 0), std::invalid_argument);
}

TEST(Transition, BasicProperties) {
  const QubitEigensystem a = diagonalize(kQubitA);
  EXPECT_EQ(transition(a, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(transition(a, 2, 1), -transition(a, 1, 2));
  EXPECT_THROW(transition(a, 0, 5), std::out_of_range);
  EXPECT_THROW(transition(a, -1, 0), std::out_of_range);
}
