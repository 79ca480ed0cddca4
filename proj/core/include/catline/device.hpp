#pragma once

#include <complex>
#include <vector>

#include "catline/constants.hpp"
#include "catline/fock.hpp"

namespace catline {

// literal_complex keeps the drive's imaginary part (the detuning then picks up
// an imaginary component); hermitized keeps only Re of the flux.
enum class PulseMode { literal_complex, hermitized };

enum class CosExpansion { exact_cos, quadratic };

enum class Frame { lab, rotating };

struct DeviceParams {
  double e_j = 1.59e11;     // Josephson energy over hbar, rad/s
  double omega_c = 7.07e11; // resonator frequency, rad/s
  double g = 0.0;           // atom-field coupling, rad/s; calibrated, not given
  double e_c_uev = 250.0;   // single-electron charging energy, micro-eV (diagnostic only)
  double gap_uev = 458.3;   // superconducting gap, micro-eV (diagnostic only)
  double temperature = 0.030;  // K

  void validate() const;
};

// k_B T < E_J < E_C < gap, reported, never enforced.
struct RegimeReport {
  double kbt_over_ej = 0.0;
  double ej_over_ec = 0.0;
  double ec_over_gap = 0.0;
  bool ok = false;
};

RegimeReport device_regime(const DeviceParams& p);

// Classical flux drive through the SQUID loop, in units of the flux quantum:
// (A/2) exp(i [nu (t - t_on) + phi]) inside [t_on, t_off], zero outside.
struct FluxPulse {
  double amplitude = 0.7;
  double nu = 16.0e6 * pi;  // rad/s
  double phi = 0.0;
  double t_on = 0.0;
  double t_off = 62.5e-9;
  PulseMode mode = PulseMode::literal_complex;

  double half_period() const { return pi / nu; }
  bool contains(double t) const { return t >= t_on && t <= t_off; }
  void validate() const;
};

std::complex<double> flux_at(const FluxPulse& pulse, double t);

// E_J/hbar cos(pi flux), or its small-flux quadratic expansion.
std::complex<double> qubit_frequency(const DeviceParams& params, const FluxPulse& pulse,
                                     double t, CosExpansion expansion);

// qubit_frequency - omega_c.
std::complex<double> detuning(const DeviceParams& params, const FluxPulse& pulse,
                              double t, CosExpansion expansion);

// Single qubit + one mode. All Hamiltonians here and below are returned as
// H/hbar in rad/s. lab: omega_c a^dag a + nu_a(t) sigma_z + g sigma_x (a^dag + a)
// in the (|g>, |e>) basis. rotating: Delta(t) sigma_z + g (sigma~+ + sigma~-)
// (a~^dag + a~) in the (|+>, |->) basis, phase factors written out.
DenseOperator build_single_qubit_hamiltonian(const DeviceParams& params, const FluxPulse& pulse,
                                             double t, Frame frame, const SpaceLayout& layout,
                                             CosExpansion expansion = CosExpansion::exact_cos);

struct TwoModeParams {
  double omega_a = 0.0;  // rad/s
  double omega_b = 0.0;  // rad/s
  double c_j = 0.0;      // Josephson capacitance, F
  double c_g_a = 0.0;    // gate capacitance to mode a, F
  double c_g_b = 0.0;    // gate capacitance to mode b, F
  double l_a = 0.0;      // line length, m
  double l_b = 0.0;      // line length, m
  double c_a = 0.0;      // line capacitance density, F/m
  double c_b = 0.0;      // line capacitance density, F/m
  double b_amp = 0.0;    // classical pump amplitude <b>, dimensionless
};

struct Couplings {
  double g_a = 0.0;   // rad/s
  double g_b = 0.0;   // rad/s
  double g_ab = 0.0;  // rad/s
};

Couplings two_mode_couplings(const TwoModeParams& p);

enum class TwoModeVariant { full, classical_pump, reduced };

// full keeps mode b quantized: the field register is a (x) b, flattened
// a-major, so layout.fock_dim = dim_a * fock_dim_b. classical_pump replaces
// b by <b> e^{-i omega_b t} (c-number energy, sigma_z drive, and a residual
// g_ab drive on mode a); reduced drops the g_ab drive.
DenseOperator build_two_mode_hamiltonian(const TwoModeParams& p, const DeviceParams& params,
                                         const FluxPulse& pulse, double t, TwoModeVariant variant,
                                         const SpaceLayout& layout, int fock_dim_b = 1);

// Same matrix with the couplings supplied directly instead of derived from p.
DenseOperator build_two_mode_hamiltonian(const Couplings& c, double omega_a, double omega_b,
                                         double b_amp, const DeviceParams& params,
                                         const FluxPulse& pulse, double t, TwoModeVariant variant,
                                         const SpaceLayout& layout, int fock_dim_b = 1);

struct NQubitParams {
  std::vector<double> e_j;        // per-qubit Josephson energy over hbar, rad/s
  std::vector<FluxPulse> pulses;  // per-qubit drive
  double e_l = 0.0;               // inductive energy over hbar, rad/s
  bool include_qq = false;
};

// E_L/hbar from the junction capacitances and the coupling inductance:
// C_qb = C_J C_q / (C_J + C_q), E_L = C_J Phi_0^2 / (C_qb pi^2 L).
double inductive_energy(double c_j, double c_q, double l);

// N qubits sharing one mode: omega_c a^dag a + sum_j E_j cos(pi flux_j) sigma_x^j
// + g sum_j sigma_z^j (a^dag + a), plus the qubit-qubit term
// -sum_j (4 E_j E_{j+1} / E_L) cos_j cos_{j+1} sigma_y^j sigma_y^{j+1} when enabled.
DenseOperator build_n_qubit_hamiltonian(const NQubitParams& np, const DeviceParams& params,
                                        double t, const SpaceLayout& layout);

}  // namespace catline
