#include "fluxcz/fluxonium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fluxcz/errors.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Annihilation operator a in the Fock basis |0>..|size-1>.
MatrixXd lowering(int size) {
  MatrixXd a = MatrixXd::Zero(size, size);
  for (int k = 1; k < size; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

// cos(phi - phi_ext) as a function of the flux operator on an enlarged basis,
// cropped to basis_size. The enlarged tridiagonal phi is diagonalized exactly,
// so the cosine carries no series truncation; cropping only affects the top
// rows of the enlarged matrix.
MatrixXd cosine_of_flux(double phi_scale, double phi_ext, int basis_size) {
  const int padded = 2 * basis_size;
  VectorXd diag = VectorXd::Zero(padded);
  VectorXd sub(padded - 1);
  for (int k = 1; k < padded; ++k) sub(k - 1) = phi_scale * std::sqrt(static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("flux operator diagonalization failed");

  const VectorXd cosines = (solver.eigenvalues().array() - phi_ext).cos();
  const MatrixXd top = solver.eigenvectors().topRows(basis_size);
  return top * cosines.asDiagonal() * top.transpose();
}

void fix_phases(MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index row = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&row);
    if (vectors(row, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

QubitEigensystem solve(const FluxoniumParams& params, int n_keep, int basis_size) {
  const MatrixXd h = build_hamiltonian(params, basis_size);
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericError("fluxonium diagonalization failed");

  MatrixXd vectors = solver.eigenvectors().leftCols(n_keep);
  fix_phases(vectors);

  QubitEigensystem sys;
  sys.params = params;
  sys.n_keep = n_keep;
  sys.basis_size = basis_size;
  sys.energies = solver.eigenvalues().head(n_keep).array() - solver.eigenvalues()(0);
  const MatrixXcd v = vectors.cast<std::complex<double>>();
  sys.n_op = v.adjoint() * charge_operator(params, basis_size) * v;
  sys.phi_op = v.adjoint() * flux_operator(params, basis_size) * v;
  return sys;
}

}  // namespace

FluxoniumParams FluxoniumParams::make(double e_c, double e_l, double e_j, double phi_ext) {
  FluxoniumParams p{e_c, e_l, e_j, std::fmod(phi_ext, units::kTwoPi)};
  if (p.phi_ext < 0.0) p.phi_ext += units::kTwoPi;
  if (p.phi_ext >= units::kTwoPi) p.phi_ext = 0.0;
  p.validate();
  return p;
}

void FluxoniumParams::validate() const {
  if (!(e_c > 0.0)) throw std::invalid_argument("e_c must be positive");
  if (!(e_l > 0.0)) throw std::invalid_argument("e_l must be positive");
  if (!(e_j >= 0.0)) throw std::invalid_argument("e_j must be non-negative");
  if (!std::isfinite(phi_ext)) throw std::invalid_argument("phi_ext must be finite");
}

double FluxoniumParams::oscillator_length() const { return std::pow(8.0 * e_c / e_l, 0.25); }

double FluxoniumParams::plasma_frequency() const { return std::sqrt(8.0 * e_c * e_l); }

double QubitEigensystem::frequency(int i, int f) const {
  if (i < 0 || f < 0 || i >= n_keep || f >= n_keep) {
    throw std::out_of_range("level index outside [0, " + std::to_string(n_keep) + ")");
  }
  return energies(f) - energies(i);
}

MatrixXcd charge_operator(const FluxoniumParams& params, int basis_size) {
  // n = i (a^dag - a) / (sqrt(2) xi)
  const MatrixXd a = lowering(basis_size);
  const double scale = 1.0 / (std::sqrt(2.0) * params.oscillator_length());
  return std::complex<double>(0.0, scale) * (a.transpose() - a).cast<std::complex<double>>();
}

MatrixXcd flux_operator(const FluxoniumParams& params, int basis_size) {
  // phi = xi (a + a^dag) / sqrt(2)
  const MatrixXd a = lowering(basis_size);
  const double scale = params.oscillator_length() / std::sqrt(2.0);
  return (scale * (a + a.transpose())).cast<std::complex<double>>();
}

MatrixXd build_hamiltonian(const FluxoniumParams& params, int basis_size) {
  params.validate();
  if (basis_size < kMinBasisSize) {
    throw TruncationError("basis_size " + std::to_string(basis_size) + " is below the minimum of " +
                          std::to_string(kMinBasisSize));
  }
  MatrixXd h = MatrixXd::Zero(basis_size, basis_size);
  const double omega_p = params.plasma_frequency();
  for (int k = 0; k < basis_size; ++k) h(k, k) = omega_p * (k + 0.5);
  if (params.e_j != 0.0) {
    const double phi_scale = params.oscillator_length() / std::sqrt(2.0);
    h -= params.e_j * cosine_of_flux(phi_scale, params.phi_ext, basis_size);
  }
  // Symmetrize away rounding in the cropped product.
  return 0.5 * (h + h.transpose());
}

QubitEigensystem diagonalize(const FluxoniumParams& params, int n_keep, const DiagonalizeOptions& options) {
  if (n_keep < 1) throw std::invalid_argument("n_keep must be at least 1");
  if (options.basis_size < kMinBasisSize || n_keep > options.basis_size / 4) {
    throw TruncationError("basis_size " + std::to_string(options.basis_size) + " is too small for n_keep " +
                          std::to_string(n_keep) + " (need n_keep <= basis_size / 4)");
  }
  QubitEigensystem sys = solve(params, n_keep, options.basis_size);

  if (options.check_convergence) {
    const int larger = options.basis_size + options.basis_size / 2;
    const QubitEigensystem ref = solve(params, n_keep, larger);
    const double span = std::max(sys.energies(n_keep - 1), 1.0);
    const double shift = (ref.energies - sys.energies).cwiseAbs().maxCoeff() / span;
    if (shift > options.convergence_tolerance) {
      throw ConvergenceError("fluxonium levels not converged at basis_size " + std::to_string(options.basis_size) +
                             ": relative shift " + std::to_string(shift) + " at basis_size " +
                             std::to_string(larger));
    }
  }
  return sys;
}

double transition(const QubitEigensystem& sys, int i, int f) { return sys.frequency(i, f); }

}  // namespace fluxcz
