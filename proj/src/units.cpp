#include "fluxcz/units.hpp"

#include <stdexcept>

namespace fluxcz::units {

namespace {

constexpr double kFluxQuantumReduced = kHbar / (2.0 * kElementaryCharge);  // hbar / 2e

void require_positive(double value, const char* what) {
  if (!(value > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

double charging_energy_ghz(double capacitance_ff) {
  require_positive(capacitance_ff, "capacitance");
  const double c = capacitance_ff * kFemtoFarad;
  return kElementaryCharge * kElementaryCharge / (2.0 * c * kPlanck) / kGigaHertz;
}

double inductive_energy_ghz(double inductance_nh) {
  require_positive(inductance_nh, "inductance");
  const double l = inductance_nh * kNanoHenry;
  return kFluxQuantumReduced * kFluxQuantumReduced / (l * kPlanck) / kGigaHertz;
}

double capacitance_for_charging_energy(double e_c_ghz) {
  require_positive(e_c_ghz, "charging energy");
  return kElementaryCharge * kElementaryCharge / (2.0 * e_c_ghz * kGigaHertz * kPlanck) / kFemtoFarad;
}

double inductance_for_inductive_energy(double e_l_ghz) {
  require_positive(e_l_ghz, "inductive energy");
  return kFluxQuantumReduced * kFluxQuantumReduced / (e_l_ghz * kGigaHertz * kPlanck) / kNanoHenry;
}

}  // namespace fluxcz::units
