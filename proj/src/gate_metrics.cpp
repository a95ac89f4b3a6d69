#include "fluxcz/gate_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "fluxcz/errors.hpp"
#include "fluxcz/parallel.hpp"
#include "fluxcz/units.hpp"

namespace fluxcz {

namespace {

using cd = std::complex<double>;

double wrap_phase(double phase) {
  double wrapped = std::fmod(phase, units::kTwoPi);
  if (wrapped < 0.0) wrapped += units::kTwoPi;
  return wrapped;
}

class Search {
 public:
  Search(const CoupledSystem& sys, double gate_time, double eta_a, double eta_b, double step_divisor, double norm_tolerance,
         std::vector<TrialPoint>& trace)
      : sys_(sys), gate_time_(gate_time), eta_a_(eta_a), eta_b_(eta_b), step_divisor_(step_divisor), norm_tolerance_(norm_tolerance), trace_(trace) {}

  DrivePulse pulse(double amplitude, double carrier) const {
    return DrivePulse{amplitude, carrier, gate_time_, eta_a_, eta_b_};
  }

  double fidelity_at(double amplitude, double carrier) const {
    try {
      return evaluate_pulse(sys_, pulse(amplitude, carrier), step_divisor_, norm_tolerance_).fidelity;
    } catch (const IllDefinedPhaseError&) {
      return 0.0;
    }
  }

  double record(double amplitude, double carrier) {
    const double f = fidelity_at(amplitude, carrier);
    trace_.push_back({amplitude, carrier, f});
    return f;
  }

 private:
  const CoupledSystem& sys_;
  double gate_time_, eta_a_, eta_b_, step_divisor_, norm_tolerance_;
  std::vector<TrialPoint>& trace_;
};

// Golden-section maximization of fn on [lo, hi] down to a bracket of width tol.
void golden_section(double lo, double hi, double tol, const std::function<double(double)>& fn) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (hi - lo > tol) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fn(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fn(x2);
    }
  }
}

const TrialPoint& best_of(const std::vector<TrialPoint>& trace) {
  // First maximum wins so the choice is independent of later ties.
  return *std::max_element(trace.begin(), trace.end(),
                           [](const TrialPoint& x, const TrialPoint& y) { return x.fidelity < y.fidelity; });
}

}  // namespace

double ComputationalEvolution::leakage() const { return 4.0 - (u_c.adjoint() * u_c).trace().real(); }

ComputationalEvolution project(const PropagationResult& result, const CoupledSystem& sys) {
  if (result.evolved_columns.rows() != sys.dimension() || result.evolved_columns.cols() != 4) {
    throw std::invalid_argument("propagation result does not match the coupled system");
  }
  ComputationalEvolution out;
  for (int r = 0; r < 4; ++r) {
    const int row = sys.index_of(kComputationalLabels[r]);
    for (int c = 0; c < 4; ++c) out.u_c(r, c) = result.evolved_columns(row, c);
  }
  return out;
}

FidelityReport fidelity(const ComputationalEvolution& evolution) {
  const Eigen::Matrix4cd& u = evolution.u_c;
  FidelityReport report;
  for (int k = 0; k < 4; ++k) {
    if (std::abs(u(k, k)) < 1e-12) {
      throw IllDefinedPhaseError("diagonal entry |" + to_string(kComputationalLabels[k]) +
                                 "> of U_c vanishes; its phase is undefined");
    }
    report.phases[k] = -std::arg(u(k, k));
  }
  const double d01 = report.phases[1] - report.phases[0];
  const double d10 = report.phases[2] - report.phases[0];
  const Eigen::Vector4cd z(1.0, std::polar(1.0, d01), std::polar(1.0, d10), std::polar(1.0, d01 + d10));
  report.corrected = z.asDiagonal() * u;

  const Eigen::Vector4cd cz(1.0, 1.0, 1.0, -1.0);
  const double norm_term = (report.corrected.adjoint() * report.corrected).trace().real();
  const cd overlap = (cz.asDiagonal() * report.corrected).trace();  // U_CZ is real diagonal
  report.fidelity = (norm_term + std::norm(overlap)) / 20.0;
  report.conditional_phase =
      wrap_phase(report.phases[3] - report.phases[2] - report.phases[1] + report.phases[0]);
  report.leakage = evolution.leakage();
  return report;
}

std::string_view to_string(TargetTransition target) {
  return target == TargetTransition::t11_21 ? "t11_21" : "t10_02";
}

TargetTransition parse_target_transition(std::string_view text) {
  if (text == "t11_21" || text == "11-21") return TargetTransition::t11_21;
  if (text == "t10_02" || text == "10-02") return TargetTransition::t10_02;
  throw std::invalid_argument("unknown target transition '" + std::string(text) + "' (expected t11_21 or t10_02)");
}

std::array<BareLabel, 2> transition_labels(TargetTransition target) {
  if (target == TargetTransition::t11_21) return {BareLabel{1, 1}, BareLabel{2, 1}};
  return {BareLabel{1, 0}, BareLabel{0, 2}};
}

double target_frequency(const CoupledSystem& sys, TargetTransition target) {
  const auto [from, to] = transition_labels(target);
  return sys.frequency(from, to);
}

double rabi_cycle_amplitude(const CoupledSystem& sys, TargetTransition target, double gate_time, double eta_a,
                            double eta_b) {
  if (!(gate_time > 0.0)) throw std::invalid_argument("gate time must be positive");
  const auto [from, to] = transition_labels(target);
  const cd element = eta_a * sys.n_a(sys.index_of(from), sys.index_of(to)) +
                     eta_b * sys.n_b(sys.index_of(from), sys.index_of(to));
  const double magnitude = std::abs(element);
  if (magnitude < 1e-10) return std::numeric_limits<double>::infinity();
  return 1.0 / (gate_time * magnitude * envelope_area_factor());
}

FidelityReport evaluate_pulse(const CoupledSystem& sys, const DrivePulse& pulse, double step_divisor,
                              double norm_tolerance) {
  const PropagationResult result = propagate(sys, pulse, carrier_step(pulse, step_divisor), norm_tolerance);
  return fidelity(project(result, sys));
}

OptimizationOutcome optimize(const CoupledSystem& sys, double gate_time, TargetTransition target, double eta_a,
                             double eta_b, const OptimizerSettings& settings) {
  if (!(gate_time > 0.0)) throw std::invalid_argument("gate time must be positive");
  if (settings.frequency_points < 1 || settings.amplitude_points < 1) {
    throw std::invalid_argument("optimizer grids need at least one point");
  }
  if (!(settings.window >= 0.0) || !(settings.amplitude_ratio > 1.0)) {
    throw std::invalid_argument("invalid optimizer window or amplitude ratio");
  }

  OptimizationOutcome out;
  out.target_frequency = target_frequency(sys, target);
  out.seed_amplitude = rabi_cycle_amplitude(sys, target, gate_time, eta_a, eta_b);
  if (!std::isfinite(out.seed_amplitude)) {
    throw OptimizerError("transition " + std::string(to_string(target)) + " is not driven by the chosen weights");
  }

  // Undriven reference: free dressed phases only.
  ComputationalEvolution idle;
  idle.u_c.setZero();
  for (int k = 0; k < 4; ++k) {
    idle.u_c(k, k) = std::polar(1.0, -units::kTwoPi * sys.energy(kComputationalLabels[k]) * gate_time);
  }
  const double idle_fidelity = fidelity(idle).fidelity;

  const double lo_freq = out.target_frequency - 0.5 * settings.window;
  const double hi_freq = out.target_frequency + 0.5 * settings.window;
  const double freq_spacing =
      settings.frequency_points > 1 ? settings.window / (settings.frequency_points - 1) : settings.window;
  const double log_ratio = std::log(settings.amplitude_ratio);

  std::vector<TrialPoint> grid;
  for (int a = 0; a < settings.amplitude_points; ++a) {
    const double offset = a - 0.5 * (settings.amplitude_points - 1);
    const double amplitude = out.seed_amplitude * std::exp(offset * log_ratio);
    for (int f = 0; f < settings.frequency_points; ++f) {
      const double carrier = settings.frequency_points > 1 ? lo_freq + f * freq_spacing : out.target_frequency;
      grid.push_back({amplitude, carrier, 0.0});
    }
  }

  std::vector<TrialPoint> unused;
  const Search probe(sys, gate_time, eta_a, eta_b, settings.step_divisor, settings.norm_tolerance, unused);
  parallel_for(grid.size(), [&](std::size_t i) { grid[i].fidelity = probe.fidelity_at(grid[i].amplitude, grid[i].carrier_frequency); });
  out.search_trace = grid;

  if (!(best_of(out.search_trace).fidelity > idle_fidelity + 1e-9)) {
    throw OptimizerError("no grid point improves on the undriven gate (F = " + std::to_string(idle_fidelity) +
                         "); transition " + std::string(to_string(target)) + " unreachable at t_g = " +
                         std::to_string(gate_time) + " ns");
  }

  Search search(sys, gate_time, eta_a, eta_b, settings.step_divisor, settings.norm_tolerance, out.search_trace);
  double freq_half_width = freq_spacing;
  double log_amp_half_width = log_ratio;
  for (int round = 0; round < settings.max_refinement_rounds; ++round) {
    const double before = best_of(out.search_trace).fidelity;

    const double amp = best_of(out.search_trace).amplitude;
    const double centre = best_of(out.search_trace).carrier_frequency;
    golden_section(std::max(lo_freq, centre - freq_half_width), std::min(hi_freq, centre + freq_half_width),
                   settings.frequency_resolution, [&](double carrier) { return search.record(amp, carrier); });

    const double carrier = best_of(out.search_trace).carrier_frequency;
    const double log_amp = std::log(best_of(out.search_trace).amplitude);
    golden_section(log_amp - log_amp_half_width, log_amp + log_amp_half_width,
                   std::log1p(settings.amplitude_resolution),
                   [&](double x) { return search.record(std::exp(x), carrier); });

    const double gained = best_of(out.search_trace).fidelity - before;
    if (gained < 1e-9) break;
    freq_half_width *= 0.5;
    log_amp_half_width *= 0.5;
  }

  const TrialPoint& best = best_of(out.search_trace);
  out.best_pulse = search.pulse(best.amplitude, best.carrier_frequency);
  out.best_fidelity = best.fidelity;
  out.best_report = evaluate_pulse(sys, out.best_pulse, settings.step_divisor, settings.norm_tolerance);
  return out;
}

}  // namespace fluxcz
