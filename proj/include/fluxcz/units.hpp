#pragma once

#include <numbers>

// Unit system: energies are stored as frequencies E/h in GHz, times in ns,
// capacitances in fF and inductances in nH. The only place where 2*pi enters
// is angular().

namespace fluxcz::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CODATA 2018 (exact SI values).
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kHbar = kPlanck / kTwoPi;

inline constexpr double kFemtoFarad = 1e-15;
inline constexpr double kNanoHenry = 1e-9;
inline constexpr double kGigaHertz = 1e9;

// Angular frequency in rad/ns of a quantity given in GHz.
constexpr double angular(double ghz) { return kTwoPi * ghz; }

// E_C/h = e^2 / (2 C h), in GHz, for C in fF.
double charging_energy_ghz(double capacitance_ff);

// E_L/h = (hbar / 2e)^2 / (L h), in GHz, for L in nH.
double inductive_energy_ghz(double inductance_nh);

// Inverses of the two conversions above.
double capacitance_for_charging_energy(double e_c_ghz);
double inductance_for_inductive_energy(double e_l_ghz);

}  // namespace fluxcz::units
