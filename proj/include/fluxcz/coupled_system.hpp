#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fluxcz/fluxonium.hpp"

namespace fluxcz {

enum class CouplingKind { capacitive, inductive };

std::string_view to_string(CouplingKind kind);
CouplingKind parse_coupling_kind(std::string_view text);

// V = +J n_A n_B (capacitive) or V = -J phi_A phi_B (inductive); strength is
// J/h in GHz.
struct CouplingSpec {
  CouplingKind kind = CouplingKind::capacitive;
  double strength = 0.0;
};

// Bare product-state label |k_A l_B>.
struct BareLabel {
  int a = 0;
  int b = 0;

  friend bool operator==(const BareLabel&, const BareLabel&) = default;
};

std::string to_string(const BareLabel& label);

enum class DressedOperator { n_a, n_b, phi_a, phi_b };

// Coupled two-qubit eigensystem. Dressed states are sorted by energy and
// labeled by the bare product state they connect to at zero coupling. The
// product basis index of |k l> is k * n_keep + l.
struct CoupledSystem {
  QubitEigensystem qubit_a;
  QubitEigensystem qubit_b;
  CouplingSpec coupling;
  Eigen::VectorXd dressed_energies;
  Eigen::MatrixXd eigenvectors;  // columns: dressed states in the product basis
  std::vector<BareLabel> labels;
  Eigen::MatrixXcd n_a, n_b, phi_a, phi_b;

  int n_keep() const { return qubit_a.n_keep; }
  int dimension() const { return static_cast<int>(dressed_energies.size()); }

  // Dressed index of a bare label; throws LabelingError when unresolved.
  int index_of(const BareLabel& label) const;
  double energy(const BareLabel& label) const;
  double frequency(const BareLabel& from, const BareLabel& to) const;
  const Eigen::MatrixXcd& op(DressedOperator which) const;
};

// Minimum squared overlap accepted when labeling a dressed state.
inline constexpr double kMinLabelOverlap = 0.5;

// H_A x 1 + 1 x H_B + V diagonalized in the product basis. Labels are chosen
// greedily in descending squared overlap, each bare label used once. Throws
// LabelingError when a dressed state overlaps its label by less than
// kMinLabelOverlap.
CoupledSystem assemble(const QubitEigensystem& qubit_a, const QubitEigensystem& qubit_b, const CouplingSpec& coupling);

struct GateFiguresOfMerit {
  double delta_omega = 0.0;  // w(11->21) - w(10->20)
  double delta_c = 0.0;      // w(00->01) - w(10->11)
  double delta = 0.0;        // |w_A(1->2) - w_B(1->2)|
};

GateFiguresOfMerit figures_of_merit(const CoupledSystem& sys);

// |<from| O |to>| in the dressed basis.
double dressed_matrix_element(const CoupledSystem& sys, DressedOperator op, const BareLabel& from,
                              const BareLabel& to);

// Outcome of converting physical coupler elements into a coupling strength.
struct CouplingFromElements {
  CouplingSpec spec;
  double ratio = 0.0;  // mutual element over the smaller self element
  std::optional<std::string> warning;
};

// Small-coupler ratio above which a warning is attached and above which the
// conversion is refused.
inline constexpr double kCouplerWarnRatio = 0.1;
inline constexpr double kCouplerMaxRatio = 0.3;

// Capacitive: J_C/h = 4 e^2 C_M / (C_A C_B h) with capacitances in fF.
// Inductive: J_L/h = (hbar/2e)^2 L_M / (L_A L_B h) with inductances in nH.
// Throws std::invalid_argument for non-positive self elements, a negative
// mutual element, or a ratio above kCouplerMaxRatio.
CouplingFromElements coupling_from_elements(CouplingKind kind, double mutual, double self_a, double self_b);

}  // namespace fluxcz
