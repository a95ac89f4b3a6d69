#pragma once

#include <Eigen/Dense>

namespace fluxcz {

inline constexpr int kDefaultBasisSize = 120;
inline constexpr int kDefaultLevels = 5;
inline constexpr int kMinBasisSize = 20;

// Circuit energies of one fluxonium (GHz, as E/h) and its flux bias.
struct FluxoniumParams {
  double e_c = 0.0;
  double e_l = 0.0;
  double e_j = 0.0;
  double phi_ext = 0.0;  // radians, kept in [0, 2pi)

  // Validates the energies and wraps phi_ext into [0, 2pi).
  // Throws std::invalid_argument on e_c <= 0, e_l <= 0 or e_j < 0.
  static FluxoniumParams make(double e_c, double e_l, double e_j, double phi_ext);

  void validate() const;

  // Oscillator length of the LC part, (8 E_C / E_L)^(1/4).
  double oscillator_length() const;
  // Plasma frequency sqrt(8 E_C E_L) in GHz.
  double plasma_frequency() const;
};

// Truncated eigensystem of a single fluxonium. Energies are shifted so that
// energies[0] == 0; operators are expressed in the eigenbasis.
struct QubitEigensystem {
  FluxoniumParams params;
  int n_keep = 0;
  int basis_size = 0;
  Eigen::VectorXd energies;
  Eigen::MatrixXcd n_op;
  Eigen::MatrixXcd phi_op;

  // energies[f] - energies[i]; throws std::out_of_range for bad levels.
  double frequency(int i, int f) const;
};

// Hamiltonian 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext) in the
// harmonic-oscillator basis of the LC sub-circuit. Throws TruncationError for
// basis_size < kMinBasisSize. The matrix is real symmetric in this basis.
Eigen::MatrixXd build_hamiltonian(const FluxoniumParams& params, int basis_size = kDefaultBasisSize);

// Charge and flux operators in the oscillator basis of the given params.
Eigen::MatrixXcd charge_operator(const FluxoniumParams& params, int basis_size);
Eigen::MatrixXcd flux_operator(const FluxoniumParams& params, int basis_size);

struct DiagonalizeOptions {
  int basis_size = kDefaultBasisSize;
  // Re-diagonalize at 1.5x basis_size and compare the kept energies.
  bool check_convergence = true;
  double convergence_tolerance = 1e-9;  // relative to the kept spectral span
};

// Lowest n_keep levels. Each eigenvector is fixed so that its largest
// component is real and positive. Throws TruncationError when
// n_keep > basis_size / 4 and ConvergenceError when the convergence check
// fails.
QubitEigensystem diagonalize(const FluxoniumParams& params, int n_keep = kDefaultLevels,
                             const DiagonalizeOptions& options = {});

// Transition frequency i -> f in GHz (antisymmetric in i, f).
double transition(const QubitEigensystem& sys, int i, int f);

}  // namespace fluxcz
