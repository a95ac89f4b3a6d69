#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxcz/coupled_system.hpp"
#include "fluxcz/fluxonium.hpp"
#include "fluxcz/gate_metrics.hpp"

namespace fluxcz {

enum class ExperimentKind { spectrum, coupled_spectrum, fom_sweep, gate_vs_time, gate_vs_coupling };

std::string_view to_string(ExperimentKind kind);
// Throws ConfigError for unknown names.
ExperimentKind parse_experiment_kind(std::string_view text);

struct CouplerElements {
  double mutual = 0.0;  // C_M (fF) or L_M (nH)
  double self_a = 0.0;  // C_A / L_A
  double self_b = 0.0;  // C_B / L_B
};

struct CouplingBlock {
  CouplingKind kind = CouplingKind::capacitive;
  std::optional<double> strength = 0.2;  // J/h, GHz
  std::optional<CouplerElements> elements;
};

struct DriveBlock {
  double gate_time = 50.0;  // ns
  double eta_a = 0.0;
  double eta_b = 1.0;
  TargetTransition target = TargetTransition::t11_21;
  std::optional<double> window_mhz;  // total width; default depends on target
};

struct SweepBlock {
  std::string variable;  // coupling.strength or drive.gate_time
  double start = 0.0;
  double stop = 0.0;
  int points = 0;

  std::vector<double> values() const;
};

struct NumericsBlock {
  int basis_size = kDefaultBasisSize;
  int n_keep = kDefaultLevels;
  bool check_convergence = true;
  double convergence_tolerance = 1e-9;
  double step_divisor = kDefaultStepDivisor;
  double norm_tolerance = kNormTolerance;
  std::optional<int> frequency_points;  // default keeps a 0.5 MHz grid spacing across the window
  int amplitude_points = 5;
  double frequency_resolution_khz = 1.0;
  double amplitude_resolution = 1e-4;
  int refinement_rounds = 3;
};

// Two qubits, coupler, drive, optional sweep, numerics and output path.
// Defaults reproduce the reference device: E_C/h = 1.5 / 1.2 GHz,
// E_J/h = 5.5 / 5.7 GHz, E_L/h = 1 GHz, both at half flux quantum.
struct ExperimentConfig {
  FluxoniumParams qubit_a = FluxoniumParams::make(1.5, 1.0, 5.5, std::numbers::pi);
  FluxoniumParams qubit_b = FluxoniumParams::make(1.2, 1.0, 5.7, std::numbers::pi);
  CouplingBlock coupling;
  DriveBlock drive;
  std::optional<SweepBlock> sweep;
  NumericsBlock numerics;
  std::string output;
};

// Window used when drive.window_mhz is not set: 15 MHz around 11->21 and
// 60 MHz around 10->02, whose resonance is Stark-shifted further at short t_g.
double default_window_mhz(TargetTransition target);

// Carrier grid points used when numerics.frequency_points is not set.
int default_frequency_points(double window_mhz);

// Reads a YAML config and applies dotted "key=value" overrides on top of it.
// An empty path starts from the defaults. A "<output>.meta.yaml" sidecar is
// accepted as well. Throws ConfigError with the offending key in the message.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides = {});

// YAML text in the same schema accepted by parse_config.
std::string dump_config(const ExperimentConfig& config);

// Checks that every block needed by the experiment is present and valid.
void validate(const ExperimentConfig& config, ExperimentKind kind);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // RFC 4180 text with CRLF line endings.
  std::string to_string() const;
};

// Numbers in CSV and metadata use 12 significant digits.
std::string format_number(double value);

struct ExperimentResult {
  CsvTable table;
  std::vector<std::string> warnings;
};

// Runs the experiment in memory.
ExperimentResult compute_experiment(const ExperimentConfig& config, ExperimentKind kind);

struct RunOutput {
  std::string csv_path;
  std::string metadata_path;
  std::vector<std::string> warnings;
};

// Runs the experiment and writes config.output plus a "<output>.meta.yaml"
// sidecar with the fully resolved configuration.
RunOutput run_experiment(const ExperimentConfig& config, ExperimentKind kind);

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitOptimizer = 4;

// Full CLI: <kind> --config <path> [--set key=value ...] --out <path>.
int run_cli(int argc, char** argv);

}  // namespace fluxcz
