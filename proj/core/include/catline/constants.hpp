#pragma once

namespace catline {

// CODATA 2018 exact values.
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
inline constexpr double elementary_charge = 1.602176634e-19;  // C

inline constexpr double pi = 3.14159265358979323846;

// 1 micro-eV in joules, used for the gap/charging-energy bookkeeping.
inline constexpr double micro_ev = 1.602176634e-25;

inline constexpr double planck = 6.62607015e-34;  // J s
// Superconducting flux quantum h / 2e. Applied fluxes elsewhere are already
// expressed in units of this, so it only enters the inductive-energy formula.
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);  // Wb

}  // namespace catline
