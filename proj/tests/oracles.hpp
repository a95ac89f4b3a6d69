#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond Eigen.

#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Single fluxonium on a uniform real-space flux grid over [-8 pi, 8 pi]
// with the sinc (infinite-order) discretization of d^2/dphi^2.
struct GridQubit {
  Eigen::VectorXd energies;  // lowest levels, shifted so energies[0] == 0
  Eigen::MatrixXd d_phi;     // <i| d/dphi |f>, real antisymmetric
  Eigen::MatrixXd phi;       // <i| phi |f>, real symmetric
};

GridQubit grid_qubit(double e_c, double e_l, double e_j, double phi_ext, int levels, int points = 801);

// Two qubits built from grid eigenstates; the dressed states are followed
// from J = 0 by small steps in J, matching each state to its predecessor.
struct ContinuationSpectrum {
  Eigen::VectorXd energies;       // indexed by bare label k * levels + l
  Eigen::MatrixXd vectors;        // same ordering, columns in the product basis
};

enum class Coupling { capacitive, inductive };

ContinuationSpectrum continued_spectrum(const GridQubit& a, const GridQubit& b, Coupling kind, double strength,
                                        double max_step = 2e-3);

// Average gate fidelity of the 4x4 (possibly leaky) matrix m against CZ,
// after removing the single-qubit Z phases, estimated from Haar-random states.
double monte_carlo_fidelity(const Eigen::Matrix4cd& m, int samples, std::mt19937_64& rng);

}  // namespace oracle
