#pragma once

#include <array>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fluxcz/coupled_system.hpp"
#include "fluxcz/dynamics.hpp"

namespace fluxcz {

// [U_c]_{kl,k'l'} = <kl| U(t_g) |k'l'> over (00, 01, 10, 11).
struct ComputationalEvolution {
  Eigen::Matrix4cd u_c = Eigen::Matrix4cd::Identity();

  // 4 - Tr(U_c^dag U_c): population that left the computational subspace.
  double leakage() const;
};

struct FidelityReport {
  double fidelity = 0.0;
  std::array<double, 4> phases{};  // phi_kl = -arg [U_c]_{kl,kl}
  Eigen::Matrix4cd corrected = Eigen::Matrix4cd::Zero();
  double conditional_phase = 0.0;  // phi_11 - phi_10 - phi_01 + phi_00 in [0, 2pi)
  double leakage = 0.0;
};

ComputationalEvolution project(const PropagationResult& result, const CoupledSystem& sys);

// Applies the single-qubit Z correction U_Z = diag(1, e^{i dphi01},
// e^{i dphi10}, e^{i (dphi01 + dphi10)}) and evaluates
// F = [Tr(U'^dag U') + |Tr(U_CZ^dag U')|^2] / 20.
// Throws IllDefinedPhaseError when a diagonal entry is below 1e-12 in magnitude.
FidelityReport fidelity(const ComputationalEvolution& evolution);

enum class TargetTransition { t11_21, t10_02 };

std::string_view to_string(TargetTransition target);
TargetTransition parse_target_transition(std::string_view text);

// Initial and final labels of the driven transition.
std::array<BareLabel, 2> transition_labels(TargetTransition target);

// Dressed frequency of the driven transition, GHz.
double target_frequency(const CoupledSystem& sys, TargetTransition target);

// Amplitude completing one full Rabi cycle on the target transition under
// the rotating-wave estimate, A0 = 1 / (t_g |<i|D|f>| area), where area is
// envelope_area_factor().
double rabi_cycle_amplitude(const CoupledSystem& sys, TargetTransition target, double gate_time, double eta_a,
                            double eta_b);

struct OptimizerSettings {
  double window = 0.015;                     // total width of the carrier window, GHz
  int frequency_points = 31;
  int amplitude_points = 5;                  // geometric grid centred on A0
  double amplitude_ratio = 1.189207115002721;  // 2^(1/4) between neighbouring amplitudes
  double frequency_resolution = 1e-6;        // GHz (1 kHz)
  double amplitude_resolution = 1e-4;        // relative
  int max_refinement_rounds = 3;
  double step_divisor = kDefaultStepDivisor;
  double norm_tolerance = kNormTolerance;
};

struct TrialPoint {
  double amplitude = 0.0;
  double carrier_frequency = 0.0;
  double fidelity = 0.0;
};

struct OptimizationOutcome {
  DrivePulse best_pulse;
  double best_fidelity = 0.0;
  FidelityReport best_report;
  double target_frequency = 0.0;
  double seed_amplitude = 0.0;
  std::vector<TrialPoint> search_trace;
};

// Fidelity of one pulse (propagate, project, correct).
FidelityReport evaluate_pulse(const CoupledSystem& sys, const DrivePulse& pulse,
                              double step_divisor = kDefaultStepDivisor, double norm_tolerance = kNormTolerance);

// Maximizes F over the carrier within the window around the target
// transition and over A > 0. A coarse (carrier x amplitude) grid is followed
// by coordinate-wise golden-section refinement. Throws OptimizerError when
// the transition is not driven or no grid point beats the undriven gate.
OptimizationOutcome optimize(const CoupledSystem& sys, double gate_time, TargetTransition target, double eta_a,
                             double eta_b, const OptimizerSettings& settings = {});

}  // namespace fluxcz
