#pragma once

#include <array>

#include <Eigen/Dense>

#include "fluxcz/coupled_system.hpp"

namespace fluxcz {

// Microwave drive f(t) cos(2 pi nu_d t) (eta_a n_A + eta_b n_B) with the
// envelope f(t) = A (exp[-8 t (t - t_g) / t_g^2] - 1).
struct DrivePulse {
  double amplitude = 0.0;          // A, GHz
  double carrier_frequency = 0.0;  // nu_d, GHz
  double gate_time = 0.0;          // t_g, ns
  double eta_a = 1.0;
  double eta_b = 1.0;
};

// f(t) for 0 <= t <= t_g; throws std::invalid_argument outside that range.
double envelope(const DrivePulse& pulse, double t);

// Integral of f(t) / A over [0, t_g] divided by t_g.
double envelope_area_factor();

inline constexpr double kDefaultStepDivisor = 160.0;
inline constexpr double kMinStepDivisor = 40.0;
inline constexpr double kNormTolerance = 1e-8;

// 1 / (divisor * nu_d).
double carrier_step(const DrivePulse& pulse, double divisor = kDefaultStepDivisor);

struct PropagationResult {
  // Columns: dressed |00>, |01>, |10>, |11> evolved to t_g, in the dressed basis.
  Eigen::MatrixXcd evolved_columns;
  std::array<double, 4> norm_defects{};
};

// Evolves the given dressed-basis states (columns) from t_start to t_end,
// both within [0, t_g]. t_end < t_start integrates backwards. Uses classic
// RK4 with the requested nominal step, shortened so the interval is an
// integer number of steps. The free dressed evolution is factored out
// exactly; the drive is kept in full (no rotating-wave approximation).
Eigen::MatrixXcd evolve(const CoupledSystem& sys, const DrivePulse& pulse, const Eigen::MatrixXcd& states,
                        double t_start, double t_end, double step);

// Evolves the four computational dressed states over [0, t_g]. Throws
// std::invalid_argument when step > 1 / (40 nu_d) and IntegrationError when a
// column norm drifts from 1 by more than norm_tolerance.
PropagationResult propagate(const CoupledSystem& sys, const DrivePulse& pulse, double step,
                            double norm_tolerance = kNormTolerance);

// The four computational labels in basis order (00, 01, 10, 11).
inline constexpr std::array<BareLabel, 4> kComputationalLabels{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

}  // namespace fluxcz
