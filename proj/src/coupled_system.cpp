#include "fluxcz/coupled_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "fluxcz/errors.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

MatrixXcd kron(const MatrixXcd& left, const MatrixXcd& right) {
  MatrixXcd out(left.rows() * right.rows(), left.cols() * right.cols());
  for (Eigen::Index i = 0; i < left.rows(); ++i) {
    for (Eigen::Index j = 0; j < left.cols(); ++j) {
      out.block(i * right.rows(), j * right.cols(), right.rows(), right.cols()) = left(i, j) * right;
    }
  }
  return out;
}

// Greedy maximum-overlap assignment of bare labels to dressed states.
std::vector<BareLabel> assign_labels(const MatrixXd& vectors, int n_keep) {
  const int dim = static_cast<int>(vectors.cols());
  std::vector<std::tuple<double, int, int>> candidates;  // (overlap, dressed, bare)
  candidates.reserve(static_cast<std::size_t>(dim) * dim);
  for (int j = 0; j < dim; ++j) {
    for (int b = 0; b < dim; ++b) candidates.emplace_back(vectors(b, j) * vectors(b, j), j, b);
  }
  // Ties broken by index so the assignment is reproducible.
  std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
    return std::get<2>(x) < std::get<2>(y);
  });

  std::vector<int> bare_of(dim, -1);
  std::vector<bool> bare_used(dim, false);
  int assigned = 0;
  for (const auto& [overlap, j, b] : candidates) {
    if (assigned == dim) break;
    if (bare_of[j] >= 0 || bare_used[b]) continue;
    if (overlap < kMinLabelOverlap) {
      throw LabelingError("dressed state " + std::to_string(j) + " has squared overlap " + std::to_string(overlap) +
                          " with its best free bare label " + to_string(BareLabel{b / n_keep, b % n_keep}) +
                          "; labeling is ambiguous");
    }
    bare_of[j] = b;
    bare_used[b] = true;
    ++assigned;
  }

  std::vector<BareLabel> labels(dim);
  for (int j = 0; j < dim; ++j) labels[j] = BareLabel{bare_of[j] / n_keep, bare_of[j] % n_keep};
  return labels;
}

}  // namespace

std::string_view to_string(CouplingKind kind) {
  return kind == CouplingKind::capacitive ? "capacitive" : "inductive";
}

CouplingKind parse_coupling_kind(std::string_view text) {
  if (text == "capacitive") return CouplingKind::capacitive;
  if (text == "inductive") return CouplingKind::inductive;
  throw std::invalid_argument("unknown coupling kind '" + std::string(text) + "' (expected capacitive or inductive)");
}

std::string to_string(const BareLabel& label) { return std::to_string(label.a) + std::to_string(label.b); }

int CoupledSystem::index_of(const BareLabel& label) const {
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] == label) return static_cast<int>(j);
  }
  throw LabelingError("no dressed state carries label |" + to_string(label) + ">");
}

double CoupledSystem::energy(const BareLabel& label) const { return dressed_energies(index_of(label)); }

double CoupledSystem::frequency(const BareLabel& from, const BareLabel& to) const {
  return energy(to) - energy(from);
}

const MatrixXcd& CoupledSystem::op(DressedOperator which) const {
  switch (which) {
    case DressedOperator::n_a: return n_a;
    case DressedOperator::n_b: return n_b;
    case DressedOperator::phi_a: return phi_a;
    case DressedOperator::phi_b: return phi_b;
  }
  throw std::invalid_argument("unknown dressed operator");
}

CoupledSystem assemble(const QubitEigensystem& qubit_a, const QubitEigensystem& qubit_b, const CouplingSpec& coupling) {
  if (qubit_a.n_keep != qubit_b.n_keep) throw std::invalid_argument("qubits must keep the same number of levels");
  if (!(coupling.strength >= 0.0)) throw std::invalid_argument("coupling strength must be non-negative");

  const int n = qubit_a.n_keep;
  const int dim = n * n;
  const MatrixXcd identity = MatrixXcd::Identity(n, n);

  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) h(k * n + l, k * n + l) = qubit_a.energies(k) + qubit_b.energies(l);
  }
  if (coupling.kind == CouplingKind::capacitive) {
    h += coupling.strength * kron(qubit_a.n_op, qubit_b.n_op);
  } else {
    h -= coupling.strength * kron(qubit_a.phi_op, qubit_b.phi_op);
  }

  // Both interactions are real in the oscillator-derived eigenbases.
  if (h.imag().cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw NumericError("coupled Hamiltonian has an unexpected imaginary part");
  }
  const MatrixXd h_real = 0.5 * (h.real() + h.real().transpose());

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h_real);
  if (solver.info() != Eigen::Success) throw NumericError("coupled diagonalization failed");

  CoupledSystem sys;
  sys.qubit_a = qubit_a;
  sys.qubit_b = qubit_b;
  sys.coupling = coupling;
  sys.dressed_energies = solver.eigenvalues();
  sys.eigenvectors = solver.eigenvectors();
  for (int c = 0; c < dim; ++c) {
    Eigen::Index row = 0;
    sys.eigenvectors.col(c).cwiseAbs().maxCoeff(&row);
    if (sys.eigenvectors(row, c) < 0.0) sys.eigenvectors.col(c) *= -1.0;
  }
  sys.labels = assign_labels(sys.eigenvectors, n);

  const MatrixXcd w = sys.eigenvectors.cast<std::complex<double>>();
  sys.n_a = w.adjoint() * kron(qubit_a.n_op, identity) * w;
  sys.n_b = w.adjoint() * kron(identity, qubit_b.n_op) * w;
  sys.phi_a = w.adjoint() * kron(qubit_a.phi_op, identity) * w;
  sys.phi_b = w.adjoint() * kron(identity, qubit_b.phi_op) * w;
  return sys;
}

GateFiguresOfMerit figures_of_merit(const CoupledSystem& sys) {
  if (sys.n_keep() < 3) throw std::invalid_argument("figures of merit need at least three levels per qubit");
  GateFiguresOfMerit fom;
  fom.delta_omega = sys.frequency({1, 1}, {2, 1}) - sys.frequency({1, 0}, {2, 0});
  fom.delta_c = sys.frequency({0, 0}, {0, 1}) - sys.frequency({1, 0}, {1, 1});
  fom.delta = std::abs(sys.qubit_a.frequency(1, 2) - sys.qubit_b.frequency(1, 2));
  return fom;
}

double dressed_matrix_element(const CoupledSystem& sys, DressedOperator op, const BareLabel& from,
                              const BareLabel& to) {
  return std::abs(sys.op(op)(sys.index_of(from), sys.index_of(to)));
}

CouplingFromElements coupling_from_elements(CouplingKind kind, double mutual, double self_a, double self_b) {
  if (!(self_a > 0.0) || !(self_b > 0.0)) throw std::invalid_argument("self elements must be positive");
  if (!(mutual >= 0.0)) throw std::invalid_argument("mutual element must be non-negative");

  CouplingFromElements out;
  out.spec.kind = kind;
  out.ratio = mutual / std::min(self_a, self_b);
  const char* name = kind == CouplingKind::capacitive ? "C_M / min(C_A, C_B)" : "L_M / min(L_A, L_B)";
  if (out.ratio > kCouplerMaxRatio) {
    throw std::invalid_argument(std::string(name) + " = " + std::to_string(out.ratio) +
                                " exceeds the small-coupler limit " + std::to_string(kCouplerMaxRatio));
  }
  if (out.ratio > kCouplerWarnRatio) {
    out.warning = std::string(name) + " = " + std::to_string(out.ratio) + " is outside the small-coupler regime (< " +
                  std::to_string(kCouplerWarnRatio) + ")";
  }

  using namespace units;
  if (kind == CouplingKind::capacitive) {
    const double c_m = mutual * kFemtoFarad;
    const double c_a = self_a * kFemtoFarad;
    const double c_b = self_b * kFemtoFarad;
    out.spec.strength = 4.0 * kElementaryCharge * kElementaryCharge * c_m / (c_a * c_b) / kPlanck / kGigaHertz;
  } else {
    const double phi0 = kHbar / (2.0 * kElementaryCharge);
    const double l_m = mutual * kNanoHenry;
    const double l_a = self_a * kNanoHenry;
    const double l_b = self_b * kNanoHenry;
    out.spec.strength = phi0 * phi0 * l_m / (l_a * l_b) / kPlanck / kGigaHertz;
  }
  return out;
}

}  // namespace fluxcz
