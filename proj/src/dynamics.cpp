#include "fluxcz/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "fluxcz/errors.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void validate(const DrivePulse& pulse) {
  if (!(pulse.gate_time > 0.0)) throw std::invalid_argument("gate time must be positive");
  if (!(pulse.carrier_frequency > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
  if (!std::isfinite(pulse.amplitude)) throw std::invalid_argument("drive amplitude must be finite");
}

// Interaction-picture right-hand side. States are stored as a real matrix
// [Re | Im] of shape dim x 2m. With p_j(t) = exp(i 2 pi E_j t) and drive
// operator D, dY/dt = -i 2 pi s(t) P D P^dag Y.
class DrivenRhs {
 public:
  DrivenRhs(const CoupledSystem& sys, const DrivePulse& pulse, Eigen::Index columns)
      : pulse_(pulse), columns_(columns) {
    const MatrixXcd drive = pulse.eta_a * sys.n_a + pulse.eta_b * sys.n_b;
    drive_im_ = drive.imag();
    drive_re_ = drive.real();
    has_real_part_ = drive_re_.cwiseAbs().maxCoeff() > 0.0;
    angular_energies_ = units::kTwoPi * sys.dressed_energies;
    const Eigen::Index dim = angular_energies_.size();
    z_.resize(dim, 2 * columns);
    w_.resize(dim, 2 * columns);
    v_.resize(dim, 2 * columns);
  }

  double drive_signal(double t) const {
    const double clamped = std::min(std::max(t, 0.0), pulse_.gate_time);
    return units::kTwoPi * envelope(pulse_, clamped) * std::cos(units::kTwoPi * pulse_.carrier_frequency * clamped);
  }

  // out = f(t, y) given the phase vector (cos, sin) of p(t).
  void operator()(double t, const VectorXd& cos_p, const VectorXd& sin_p, const MatrixXd& y, MatrixXd& out) {
    const double g = drive_signal(t);
    if (g == 0.0) {
      out.setZero();
      return;
    }
    const Eigen::Index m = columns_;
    auto yr = y.leftCols(m).array();
    auto yi = y.rightCols(m).array();
    // z = conj(p) * y
    z_.leftCols(m).array() = yr.colwise() * cos_p.array() + yi.colwise() * sin_p.array();
    z_.rightCols(m).array() = yi.colwise() * cos_p.array() - yr.colwise() * sin_p.array();
    // w = -i D z = Im(D) z - i Re(D) z
    w_.noalias() = drive_im_ * z_;
    if (has_real_part_) {
      v_.noalias() = drive_re_ * z_;
      w_.leftCols(m) += v_.rightCols(m);
      w_.rightCols(m) -= v_.leftCols(m);
    }
    // out = g p w
    auto wr = w_.leftCols(m).array();
    auto wi = w_.rightCols(m).array();
    out.leftCols(m).array() = g * (wr.colwise() * cos_p.array() - wi.colwise() * sin_p.array());
    out.rightCols(m).array() = g * (wi.colwise() * cos_p.array() + wr.colwise() * sin_p.array());
  }

  const VectorXd& angular_energies() const { return angular_energies_; }

 private:
  DrivePulse pulse_;
  Eigen::Index columns_;
  MatrixXd drive_im_, drive_re_;
  bool has_real_part_ = false;
  VectorXd angular_energies_;
  MatrixXd z_, w_, v_;
};

std::string format_scientific(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", value);
  return buf;
}

MatrixXd stack(const MatrixXcd& states) {
  MatrixXd y(states.rows(), 2 * states.cols());
  y << states.real(), states.imag();
  return y;
}

MatrixXcd unstack(const MatrixXd& y) {
  const Eigen::Index m = y.cols() / 2;
  MatrixXcd out(y.rows(), m);
  out.real() = y.leftCols(m);
  out.imag() = y.rightCols(m);
  return out;
}

// Multiplies each row j of the complex state by exp(i sign theta_j).
MatrixXcd rotate_rows(const MatrixXcd& states, const VectorXd& theta, double sign) {
  MatrixXcd out = states;
  for (Eigen::Index j = 0; j < theta.size(); ++j) out.row(j) *= std::polar(1.0, sign * theta(j));
  return out;
}

}  // namespace

double envelope(const DrivePulse& pulse, double t) {
  if (!(pulse.gate_time > 0.0)) throw std::invalid_argument("gate time must be positive");
  if (t < 0.0 || t > pulse.gate_time) {
    throw std::invalid_argument("envelope time " + std::to_string(t) + " outside [0, " +
                                std::to_string(pulse.gate_time) + "]");
  }
  const double tg = pulse.gate_time;
  return pulse.amplitude * std::expm1(-8.0 * t * (t - tg) / (tg * tg));
}

double envelope_area_factor() {
  // int_0^1 (exp[8 s (1 - s)] - 1) ds = e^2 sqrt(pi / 8) erf(sqrt 2) - 1
  return std::exp(2.0) * std::sqrt(std::numbers::pi / 8.0) * std::erf(std::sqrt(2.0)) - 1.0;
}

double carrier_step(const DrivePulse& pulse, double divisor) {
  validate(pulse);
  if (!(divisor > 0.0)) throw std::invalid_argument("step divisor must be positive");
  return 1.0 / (divisor * pulse.carrier_frequency);
}

MatrixXcd evolve(const CoupledSystem& sys, const DrivePulse& pulse, const MatrixXcd& states, double t_start,
                 double t_end, double step) {
  validate(pulse);
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (states.rows() != sys.dimension()) throw std::invalid_argument("state dimension does not match the system");
  const double tg = pulse.gate_time;
  if (t_start < 0.0 || t_start > tg || t_end < 0.0 || t_end > tg) {
    throw std::invalid_argument("evolution interval must lie within [0, t_g]");
  }

  DrivenRhs rhs(sys, pulse, states.cols());
  const VectorXd& omega = rhs.angular_energies();

  // Into the interaction picture at t_start.
  MatrixXd y = stack(rotate_rows(states, omega * t_start, +1.0));

  const double span = t_end - t_start;
  const auto steps = static_cast<long>(std::ceil(std::abs(span) / step - 1e-9));
  if (steps > 0) {
    const double h = span / static_cast<double>(steps);
    const VectorXd half_cos = (0.5 * h * omega).array().cos();
    const VectorXd half_sin = (0.5 * h * omega).array().sin();

    MatrixXd k1(y.rows(), y.cols()), k2(y.rows(), y.cols()), k3(y.rows(), y.cols()), k4(y.rows(), y.cols());
    MatrixXd tmp(y.rows(), y.cols());
    VectorXd c0(omega.size()), s0(omega.size()), c1(omega.size()), s1(omega.size()), c2(omega.size()),
        s2(omega.size());

    for (long k = 0; k < steps; ++k) {
      const double t = t_start + h * static_cast<double>(k);
      c0 = (omega * t).array().cos();
      s0 = (omega * t).array().sin();
      c1 = c0.cwiseProduct(half_cos) - s0.cwiseProduct(half_sin);
      s1 = s0.cwiseProduct(half_cos) + c0.cwiseProduct(half_sin);
      c2 = c1.cwiseProduct(half_cos) - s1.cwiseProduct(half_sin);
      s2 = s1.cwiseProduct(half_cos) + c1.cwiseProduct(half_sin);

      rhs(t, c0, s0, y, k1);
      tmp = y + (0.5 * h) * k1;
      rhs(t + 0.5 * h, c1, s1, tmp, k2);
      tmp = y + (0.5 * h) * k2;
      rhs(t + 0.5 * h, c1, s1, tmp, k3);
      tmp = y + h * k3;
      rhs(t + h, c2, s2, tmp, k4);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }

  // Back to the Schroedinger picture at t_end.
  return rotate_rows(unstack(y), omega * t_end, -1.0);
}

PropagationResult propagate(const CoupledSystem& sys, const DrivePulse& pulse, double step, double norm_tolerance) {
  validate(pulse);
  const double max_step = carrier_step(pulse, kMinStepDivisor);
  if (!(step > 0.0) || step > max_step * (1.0 + 1e-12)) {
    throw std::invalid_argument("step " + std::to_string(step) + " ns does not resolve the carrier (max " +
                                std::to_string(max_step) + " ns)");
  }

  MatrixXcd initial = MatrixXcd::Zero(sys.dimension(), 4);
  for (int c = 0; c < 4; ++c) initial(sys.index_of(kComputationalLabels[c]), c) = 1.0;

  PropagationResult result;
  result.evolved_columns = evolve(sys, pulse, initial, 0.0, pulse.gate_time, step);
  for (int c = 0; c < 4; ++c) {
    result.norm_defects[c] = std::abs(result.evolved_columns.col(c).norm() - 1.0);
    if (!(result.norm_defects[c] <= norm_tolerance)) {
      throw IntegrationError("norm of evolved column |" + to_string(kComputationalLabels[c]) + "> drifted by " +
                             format_scientific(result.norm_defects[c]));
    }
  }
  return result;
}

}  // namespace fluxcz
