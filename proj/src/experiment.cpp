#include "fluxcz/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "CLI11.hpp"
#include "fluxcz/errors.hpp"
#include "fluxcz/parallel.hpp"

namespace fluxcz {

namespace {

constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// YAML helpers

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& item : node) {
    const auto key = item.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + "." + key + ": unknown key");
  }
}

template <typename T>
T read(const YAML::Node& node, const std::string& key, const std::string& where, T fallback) {
  const YAML::Node value = node[key];
  if (!value) return fallback;
  try {
    return value.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": cannot read value '" + YAML::Dump(value) + "'");
  }
}

double read_phase(const YAML::Node& node, const std::string& key, const std::string& where, double fallback) {
  const YAML::Node value = node[key];
  if (!value) return fallback;
  if (value.IsScalar() && value.Scalar() == "pi") return std::numbers::pi;
  return read<double>(node, key, where, fallback);
}

// Sets root[a][b]... = value for the dotted key.
void set_path(YAML::Node node, const std::vector<std::string>& parts, std::size_t depth, const YAML::Node& value) {
  if (depth + 1 == parts.size()) {
    node[parts[depth]] = value;
    return;
  }
  if (!node[parts[depth]] || !node[parts[depth]].IsMap()) node[parts[depth]] = YAML::Node(YAML::NodeType::Map);
  set_path(node[parts[depth]], parts, depth + 1, value);
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  std::vector<std::string> parts;
  std::stringstream path(assignment.substr(0, eq));
  for (std::string part; std::getline(path, part, '.');) {
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key segment");
    parts.push_back(part);
  }
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + assignment + "': " + e.what());
  }
  if (!root.IsMap()) root = YAML::Node(YAML::NodeType::Map);
  set_path(root, parts, 0, value);
}

FluxoniumParams parse_qubit(const YAML::Node& node, const std::string& where, const FluxoniumParams& fallback) {
  if (!node) return fallback;
  check_keys(node, where, {"e_c", "e_l", "e_j", "phi_ext"});
  try {
    return FluxoniumParams::make(read(node, "e_c", where, fallback.e_c), read(node, "e_l", where, fallback.e_l),
                                 read(node, "e_j", where, fallback.e_j),
                                 read_phase(node, "phi_ext", where, fallback.phi_ext));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  ExperimentConfig config;
  if (!root || root.IsNull()) return config;
  check_keys(root, "config", {"qubit_a", "qubit_b", "coupling", "drive", "sweep", "numerics", "output"});

  config.qubit_a = parse_qubit(root["qubit_a"], "qubit_a", config.qubit_a);
  config.qubit_b = parse_qubit(root["qubit_b"], "qubit_b", config.qubit_b);

  if (const YAML::Node c = root["coupling"]) {
    check_keys(c, "coupling", {"kind", "strength", "elements"});
    try {
      config.coupling.kind = parse_coupling_kind(read<std::string>(c, "kind", "coupling", "capacitive"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("coupling.kind: ") + e.what());
    }
    if (const YAML::Node e = c["elements"]) {
      check_keys(e, "coupling.elements", {"mutual", "self_a", "self_b"});
      if (c["strength"]) throw ConfigError("coupling: give either strength or elements, not both");
      config.coupling.strength.reset();
      config.coupling.elements = CouplerElements{read(e, "mutual", "coupling.elements", 0.0),
                                                 read(e, "self_a", "coupling.elements", 0.0),
                                                 read(e, "self_b", "coupling.elements", 0.0)};
    } else {
      config.coupling.strength = read(c, "strength", "coupling", *config.coupling.strength);
    }
  }

  if (const YAML::Node d = root["drive"]) {
    check_keys(d, "drive", {"gate_time", "eta_a", "eta_b", "target", "window_mhz"});
    config.drive.gate_time = read(d, "gate_time", "drive", config.drive.gate_time);
    config.drive.eta_a = read(d, "eta_a", "drive", config.drive.eta_a);
    config.drive.eta_b = read(d, "eta_b", "drive", config.drive.eta_b);
    try {
      config.drive.target = parse_target_transition(read<std::string>(d, "target", "drive", "t11_21"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("drive.target: ") + e.what());
    }
    if (d["window_mhz"]) config.drive.window_mhz = read(d, "window_mhz", "drive", 0.0);
  }

  if (const YAML::Node s = root["sweep"]) {
    check_keys(s, "sweep", {"variable", "start", "stop", "points"});
    SweepBlock sweep;
    sweep.variable = read<std::string>(s, "variable", "sweep", "");
    sweep.start = read(s, "start", "sweep", 0.0);
    sweep.stop = read(s, "stop", "sweep", 0.0);
    sweep.points = read(s, "points", "sweep", 0);
    config.sweep = sweep;
  }

  if (const YAML::Node n = root["numerics"]) {
    check_keys(n, "numerics",
               {"basis_size", "n_keep", "check_convergence", "convergence_tolerance", "step_divisor",
                "norm_tolerance", "frequency_points", "amplitude_points", "frequency_resolution_khz",
                "amplitude_resolution", "refinement_rounds"});
    NumericsBlock& num = config.numerics;
    num.basis_size = read(n, "basis_size", "numerics", num.basis_size);
    num.n_keep = read(n, "n_keep", "numerics", num.n_keep);
    num.check_convergence = read(n, "check_convergence", "numerics", num.check_convergence);
    num.convergence_tolerance = read(n, "convergence_tolerance", "numerics", num.convergence_tolerance);
    num.step_divisor = read(n, "step_divisor", "numerics", num.step_divisor);
    num.norm_tolerance = read(n, "norm_tolerance", "numerics", num.norm_tolerance);
    if (n["frequency_points"]) num.frequency_points = read(n, "frequency_points", "numerics", 0);
    num.amplitude_points = read(n, "amplitude_points", "numerics", num.amplitude_points);
    num.frequency_resolution_khz = read(n, "frequency_resolution_khz", "numerics", num.frequency_resolution_khz);
    num.amplitude_resolution = read(n, "amplitude_resolution", "numerics", num.amplitude_resolution);
    num.refinement_rounds = read(n, "refinement_rounds", "numerics", num.refinement_rounds);
  }

  config.output = read<std::string>(root, "output", "config", "");
  return config;
}

// Full-precision numbers for the sidecar so a re-run is bit-identical.
std::string exact_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void emit_qubit(YAML::Emitter& out, const char* name, const FluxoniumParams& q) {
  out << YAML::Key << name << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "e_c" << YAML::Value << exact_number(q.e_c);
  out << YAML::Key << "e_l" << YAML::Value << exact_number(q.e_l);
  out << YAML::Key << "e_j" << YAML::Value << exact_number(q.e_j);
  out << YAML::Key << "phi_ext" << YAML::Value << exact_number(q.phi_ext);
  out << YAML::EndMap;
}

void emit_config(YAML::Emitter& out, const ExperimentConfig& config) {
  emit_qubit(out, "qubit_a", config.qubit_a);
  emit_qubit(out, "qubit_b", config.qubit_b);

  out << YAML::Key << "coupling" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(config.coupling.kind));
  if (config.coupling.strength) out << YAML::Key << "strength" << YAML::Value << exact_number(*config.coupling.strength);
  if (config.coupling.elements) {
    out << YAML::Key << "elements" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "mutual" << YAML::Value << exact_number(config.coupling.elements->mutual);
    out << YAML::Key << "self_a" << YAML::Value << exact_number(config.coupling.elements->self_a);
    out << YAML::Key << "self_b" << YAML::Value << exact_number(config.coupling.elements->self_b);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  out << YAML::Key << "drive" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "gate_time" << YAML::Value << exact_number(config.drive.gate_time);
  out << YAML::Key << "eta_a" << YAML::Value << exact_number(config.drive.eta_a);
  out << YAML::Key << "eta_b" << YAML::Value << exact_number(config.drive.eta_b);
  out << YAML::Key << "target" << YAML::Value << std::string(to_string(config.drive.target));
  out << YAML::Key << "window_mhz" << YAML::Value
      << exact_number(config.drive.window_mhz.value_or(default_window_mhz(config.drive.target)));
  out << YAML::EndMap;

  if (config.sweep) {
    out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "variable" << YAML::Value << config.sweep->variable;
    out << YAML::Key << "start" << YAML::Value << exact_number(config.sweep->start);
    out << YAML::Key << "stop" << YAML::Value << exact_number(config.sweep->stop);
    out << YAML::Key << "points" << YAML::Value << config.sweep->points;
    out << YAML::EndMap;
  }

  const NumericsBlock& n = config.numerics;
  out << YAML::Key << "numerics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "basis_size" << YAML::Value << n.basis_size;
  out << YAML::Key << "n_keep" << YAML::Value << n.n_keep;
  out << YAML::Key << "check_convergence" << YAML::Value << n.check_convergence;
  out << YAML::Key << "convergence_tolerance" << YAML::Value << exact_number(n.convergence_tolerance);
  out << YAML::Key << "step_divisor" << YAML::Value << exact_number(n.step_divisor);
  out << YAML::Key << "norm_tolerance" << YAML::Value << exact_number(n.norm_tolerance);
  out << YAML::Key << "frequency_points" << YAML::Value
      << n.frequency_points.value_or(default_frequency_points(
             config.drive.window_mhz.value_or(default_window_mhz(config.drive.target))));
  out << YAML::Key << "amplitude_points" << YAML::Value << n.amplitude_points;
  out << YAML::Key << "frequency_resolution_khz" << YAML::Value << exact_number(n.frequency_resolution_khz);
  out << YAML::Key << "amplitude_resolution" << YAML::Value << exact_number(n.amplitude_resolution);
  out << YAML::Key << "refinement_rounds" << YAML::Value << n.refinement_rounds;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << config.output;
}

// ---------------------------------------------------------------------------
// Experiment building blocks

struct Qubits {
  QubitEigensystem a;
  QubitEigensystem b;
};

Qubits build_qubits(const ExperimentConfig& config) {
  DiagonalizeOptions options;
  options.basis_size = config.numerics.basis_size;
  options.check_convergence = config.numerics.check_convergence;
  options.convergence_tolerance = config.numerics.convergence_tolerance;
  return {diagonalize(config.qubit_a, config.numerics.n_keep, options),
          diagonalize(config.qubit_b, config.numerics.n_keep, options)};
}

CouplingSpec resolve_coupling(const CouplingBlock& block, std::vector<std::string>& warnings) {
  if (block.strength) return CouplingSpec{block.kind, *block.strength};
  const CouplerElements& e = *block.elements;
  try {
    CouplingFromElements converted = coupling_from_elements(block.kind, e.mutual, e.self_a, e.self_b);
    if (converted.warning) warnings.push_back("coupling.elements: " + *converted.warning);
    return converted.spec;
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("coupling.elements: ") + err.what());
  }
}

OptimizerSettings optimizer_settings(const ExperimentConfig& config) {
  OptimizerSettings s;
  s.window = 1e-3 * config.drive.window_mhz.value_or(default_window_mhz(config.drive.target));
  s.frequency_points = config.numerics.frequency_points.value_or(default_frequency_points(1e3 * s.window));
  s.amplitude_points = config.numerics.amplitude_points;
  s.frequency_resolution = 1e-6 * config.numerics.frequency_resolution_khz;
  s.amplitude_resolution = config.numerics.amplitude_resolution;
  s.max_refinement_rounds = config.numerics.refinement_rounds;
  s.step_divisor = config.numerics.step_divisor;
  s.norm_tolerance = config.numerics.norm_tolerance;
  return s;
}

const std::vector<std::string> kGateColumns = {
    "t_g_ns",      "J_over_h_GHz", "target",         "eta_a",       "eta_b",
    "fidelity",    "error",        "amplitude_GHz",  "carrier_GHz", "target_GHz",
    "detuning_MHz", "seed_amplitude_GHz", "leakage", "conditional_phase_rad", "evaluations"};

std::vector<std::string> gate_row(const ExperimentConfig& config, double gate_time, double strength,
                                  const OptimizationOutcome& o) {
  return {format_number(gate_time),
          format_number(strength),
          std::string(to_string(config.drive.target)),
          format_number(config.drive.eta_a),
          format_number(config.drive.eta_b),
          format_number(o.best_fidelity),
          format_number(1.0 - o.best_fidelity),
          format_number(o.best_pulse.amplitude),
          format_number(o.best_pulse.carrier_frequency),
          format_number(o.target_frequency),
          format_number(1e3 * (o.best_pulse.carrier_frequency - o.target_frequency)),
          format_number(o.seed_amplitude),
          format_number(o.best_report.leakage),
          format_number(o.best_report.conditional_phase),
          std::to_string(o.search_trace.size())};
}

OptimizationOutcome optimize_gate(const CoupledSystem& sys, const ExperimentConfig& config, double gate_time) {
  const OptimizerSettings settings = optimizer_settings(config);
  return optimize(sys, gate_time, config.drive.target, config.drive.eta_a, config.drive.eta_b, settings);
}

CsvTable spectrum_table(const ExperimentConfig& config) {
  const Qubits q = build_qubits(config);
  CsvTable t;
  t.columns = {"qubit", "level_i", "level_f", "frequency_GHz", "n_element", "phi_element"};
  for (const auto& [name, sys] : {std::pair<const char*, const QubitEigensystem*>{"A", &q.a}, {"B", &q.b}}) {
    for (int i = 0; i < sys->n_keep; ++i) {
      for (int f = i + 1; f < sys->n_keep; ++f) {
        t.rows.push_back({name, std::to_string(i), std::to_string(f), format_number(transition(*sys, i, f)),
                          format_number(std::abs(sys->n_op(i, f))), format_number(std::abs(sys->phi_op(i, f)))});
      }
    }
  }
  return t;
}

CsvTable coupled_spectrum_table(const ExperimentConfig& config, std::vector<std::string>& warnings) {
  const Qubits q = build_qubits(config);
  const CoupledSystem sys = assemble(q.a, q.b, resolve_coupling(config.coupling, warnings));
  CsvTable t;
  t.columns = {"from_label", "to_label", "from_index", "to_index", "frequency_GHz", "n_a", "n_b", "phi_a", "phi_b"};
  const int lowest = std::min(9, sys.dimension());
  for (int i = 0; i < lowest; ++i) {
    for (int j = i + 1; j < lowest; ++j) {
      t.rows.push_back({to_string(sys.labels[i]), to_string(sys.labels[j]), std::to_string(i), std::to_string(j),
                        format_number(sys.dressed_energies(j) - sys.dressed_energies(i)),
                        format_number(std::abs(sys.n_a(i, j))), format_number(std::abs(sys.n_b(i, j))),
                        format_number(std::abs(sys.phi_a(i, j))), format_number(std::abs(sys.phi_b(i, j)))});
    }
  }
  return t;
}

CsvTable fom_sweep_table(const ExperimentConfig& config) {
  const Qubits q = build_qubits(config);
  const std::vector<double> values = config.sweep->values();
  CsvTable t;
  t.columns = {"J_over_h_GHz", "delta_omega_GHz", "delta_c_GHz", "delta_GHz", "ratio_omega_c",
               "n_a_10_20",    "n_a_11_21",       "n_b_10_20",   "n_b_11_21", "n_b_10_02",
               "n_b_01_02",    "n_a_10_12",       "n_b_10_12"};
  t.rows.resize(values.size());
  parallel_for(values.size(), [&](std::size_t i) {
    const CoupledSystem sys = assemble(q.a, q.b, CouplingSpec{config.coupling.kind, values[i]});
    const GateFiguresOfMerit fom = figures_of_merit(sys);
    auto el = [&](DressedOperator op, BareLabel from, BareLabel to) {
      return format_number(dressed_matrix_element(sys, op, from, to));
    };
    t.rows[i] = {format_number(values[i]),
                 format_number(fom.delta_omega),
                 format_number(fom.delta_c),
                 format_number(fom.delta),
                 format_number(std::abs(fom.delta_c) < 1e-12 ? std::nan("") : fom.delta_omega / fom.delta_c),
                 el(DressedOperator::n_a, {1, 0}, {2, 0}),
                 el(DressedOperator::n_a, {1, 1}, {2, 1}),
                 el(DressedOperator::n_b, {1, 0}, {2, 0}),
                 el(DressedOperator::n_b, {1, 1}, {2, 1}),
                 el(DressedOperator::n_b, {1, 0}, {0, 2}),
                 el(DressedOperator::n_b, {0, 1}, {0, 2}),
                 el(DressedOperator::n_a, {1, 0}, {1, 2}),
                 el(DressedOperator::n_b, {1, 0}, {1, 2})};
  });
  return t;
}

CsvTable gate_vs_time_table(const ExperimentConfig& config, std::vector<std::string>& warnings) {
  const Qubits q = build_qubits(config);
  const CouplingSpec coupling = resolve_coupling(config.coupling, warnings);
  const CoupledSystem sys = assemble(q.a, q.b, coupling);
  const std::vector<double> times = config.sweep->values();
  CsvTable t;
  t.columns = kGateColumns;
  t.rows.resize(times.size());
  parallel_for(times.size(), [&](std::size_t i) {
    t.rows[i] = gate_row(config, times[i], coupling.strength, optimize_gate(sys, config, times[i]));
  });
  return t;
}

CsvTable gate_vs_coupling_table(const ExperimentConfig& config) {
  const Qubits q = build_qubits(config);
  const std::vector<double> strengths = config.sweep->values();
  CsvTable t;
  t.columns = kGateColumns;
  t.rows.resize(strengths.size());
  parallel_for(strengths.size(), [&](std::size_t i) {
    const CoupledSystem sys = assemble(q.a, q.b, CouplingSpec{config.coupling.kind, strengths[i]});
    t.rows[i] = gate_row(config, config.drive.gate_time, strengths[i], optimize_gate(sys, config, config.drive.gate_time));
  });
  return t;
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output: cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ConfigError("output: failed writing '" + path + "'");
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::coupled_spectrum: return "coupled-spectrum";
    case ExperimentKind::fom_sweep: return "fom-sweep";
    case ExperimentKind::gate_vs_time: return "gate-vs-time";
    case ExperimentKind::gate_vs_coupling: return "gate-vs-coupling";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (ExperimentKind kind : {ExperimentKind::spectrum, ExperimentKind::coupled_spectrum, ExperimentKind::fom_sweep,
                              ExperimentKind::gate_vs_time, ExperimentKind::gate_vs_coupling}) {
    if (text == to_string(kind)) return kind;
  }
  throw ConfigError("unknown experiment kind '" + std::string(text) +
                    "' (expected spectrum, coupled-spectrum, fom-sweep, gate-vs-time or gate-vs-coupling)");
}

std::vector<double> SweepBlock::values() const {
  std::vector<double> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    out.push_back(points == 1 ? start : start + (stop - start) * i / static_cast<double>(points - 1));
  }
  return out;
}

double default_window_mhz(TargetTransition target) { return target == TargetTransition::t11_21 ? 15.0 : 60.0; }

int default_frequency_points(double window_mhz) {
  return 1 + static_cast<int>(std::lround(std::max(window_mhz, 0.0) / 0.5));
}

ExperimentConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  // A metadata sidecar carries the resolved config under "config".
  if (root.IsMap() && root["config"] && root["experiment"]) root = YAML::Clone(root["config"]);
  for (const std::string& o : overrides) apply_override(root, o);
  return from_yaml(root);
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  return parse_config(text, overrides);
}

std::string dump_config(const ExperimentConfig& config) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  emit_config(out, config);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void validate(const ExperimentConfig& config, ExperimentKind kind) {
  auto qubit = [](const FluxoniumParams& p, const char* where) {
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(where) + ": " + e.what());
    }
  };
  qubit(config.qubit_a, "qubit_a");
  qubit(config.qubit_b, "qubit_b");

  const NumericsBlock& n = config.numerics;
  if (n.basis_size < kMinBasisSize) throw ConfigError("numerics.basis_size: must be at least 20");
  if (n.n_keep < 3) throw ConfigError("numerics.n_keep: must be at least 3");
  if (n.n_keep > n.basis_size / 4) throw ConfigError("numerics.n_keep: must not exceed basis_size / 4");
  if (!(n.convergence_tolerance > 0.0)) throw ConfigError("numerics.convergence_tolerance: must be positive");
  if (!(n.step_divisor >= kMinStepDivisor)) throw ConfigError("numerics.step_divisor: must be at least 40");
  if (!(n.norm_tolerance > 0.0)) throw ConfigError("numerics.norm_tolerance: must be positive");
  if (n.frequency_points && *n.frequency_points < 1) throw ConfigError("numerics.frequency_points: must be at least 1");
  if (n.amplitude_points < 1) throw ConfigError("numerics.amplitude_points: must be at least 1");
  if (!(n.frequency_resolution_khz > 0.0)) throw ConfigError("numerics.frequency_resolution_khz: must be positive");
  if (!(n.amplitude_resolution > 0.0)) throw ConfigError("numerics.amplitude_resolution: must be positive");
  if (n.refinement_rounds < 0) throw ConfigError("numerics.refinement_rounds: must be non-negative");

  if (kind == ExperimentKind::spectrum) return;

  const CouplingBlock& c = config.coupling;
  if (c.strength.has_value() == c.elements.has_value()) {
    throw ConfigError("coupling: exactly one of strength or elements is required");
  }
  if (c.strength && !(*c.strength >= 0.0)) throw ConfigError("coupling.strength: must be non-negative");

  const bool gate = kind == ExperimentKind::gate_vs_time || kind == ExperimentKind::gate_vs_coupling;
  if (gate) {
    const DriveBlock& d = config.drive;
    if (!(d.gate_time > 0.0)) throw ConfigError("drive.gate_time: must be positive");
    if (!std::isfinite(d.eta_a) || !std::isfinite(d.eta_b)) throw ConfigError("drive.eta_a/eta_b: must be finite");
    if (d.eta_a == 0.0 && d.eta_b == 0.0) throw ConfigError("drive: eta_a and eta_b cannot both be zero");
    if (d.window_mhz && !(*d.window_mhz >= 0.0)) throw ConfigError("drive.window_mhz: must be non-negative");
  }

  const bool needs_sweep = kind == ExperimentKind::fom_sweep || gate;
  if (!needs_sweep) return;
  if (!config.sweep) throw ConfigError("sweep: block required for " + std::string(to_string(kind)));
  const SweepBlock& s = *config.sweep;
  const std::string expected = kind == ExperimentKind::gate_vs_time ? "drive.gate_time" : "coupling.strength";
  if (s.variable != expected) {
    throw ConfigError("sweep.variable: " + std::string(to_string(kind)) + " sweeps " + expected + ", got '" +
                      s.variable + "'");
  }
  if (s.points < 1) throw ConfigError("sweep.points: must be at least 1");
  if (!std::isfinite(s.start) || !std::isfinite(s.stop)) throw ConfigError("sweep.start/stop: must be finite");
  if (expected == "drive.gate_time" && !(std::min(s.start, s.stop) > 0.0)) {
    throw ConfigError("sweep.start/stop: gate times must be positive");
  }
  if (expected == "coupling.strength") {
    if (!(std::min(s.start, s.stop) >= 0.0)) throw ConfigError("sweep.start/stop: strengths must be non-negative");
    if (!c.strength) throw ConfigError("sweep.variable: coupling.strength sweeps need coupling.strength, not elements");
  }
}

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  line(columns);
  for (const auto& row : rows) line(row);
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

ExperimentResult compute_experiment(const ExperimentConfig& config, ExperimentKind kind) {
  validate(config, kind);
  ExperimentResult result;
  switch (kind) {
    case ExperimentKind::spectrum: result.table = spectrum_table(config); break;
    case ExperimentKind::coupled_spectrum: result.table = coupled_spectrum_table(config, result.warnings); break;
    case ExperimentKind::fom_sweep: result.table = fom_sweep_table(config); break;
    case ExperimentKind::gate_vs_time: result.table = gate_vs_time_table(config, result.warnings); break;
    case ExperimentKind::gate_vs_coupling: result.table = gate_vs_coupling_table(config); break;
  }
  return result;
}

RunOutput run_experiment(const ExperimentConfig& config, ExperimentKind kind) {
  if (config.output.empty()) throw ConfigError("output: an output path is required");
  const ExperimentResult result = compute_experiment(config, kind);

  RunOutput out;
  out.csv_path = config.output;
  out.metadata_path = config.output + ".meta.yaml";
  out.warnings = result.warnings;

  YAML::Emitter meta;
  meta << YAML::BeginMap;
  meta << YAML::Key << "experiment" << YAML::Value << std::string(to_string(kind));
  meta << YAML::Key << "tool_version" << YAML::Value << kToolVersion;
  meta << YAML::Key << "columns" << YAML::Value << YAML::Flow << result.table.columns;
  meta << YAML::Key << "rows" << YAML::Value << result.table.rows.size();
  if (!result.warnings.empty()) meta << YAML::Key << "warnings" << YAML::Value << result.warnings;
  meta << YAML::Key << "config" << YAML::Value << YAML::BeginMap;
  emit_config(meta, config);
  meta << YAML::EndMap;
  meta << YAML::EndMap;

  write_file(out.csv_path, result.table.to_string());
  write_file(out.metadata_path, std::string(meta.c_str()) + "\n");
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Fluxonium controlled-Z gate simulator"};
  std::string kind_name;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  app.add_option("experiment", kind_name,
                 "spectrum | coupled-spectrum | fom-sweep | gate-vs-time | gate-vs-coupling")
      ->required();
  app.add_option("--config", config_path, "YAML experiment config (defaults to the reference device)");
  app.add_option("--set", overrides, "Override a config key, e.g. coupling.strength=0.15");
  app.add_option("--out", out_path, "Output CSV path (overrides config 'output')");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const ExperimentKind kind = parse_experiment_kind(kind_name);
    ExperimentConfig config = load_config(config_path, overrides);
    if (!out_path.empty()) config.output = out_path;
    const RunOutput out = run_experiment(config, kind);
    for (const std::string& w : out.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << out.csv_path << "\n" << out.metadata_path << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OptimizerError& e) {
    std::cerr << "optimizer error: " << e.what() << "\n";
    return kExitOptimizer;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace fluxcz
