#pragma once

#include <vector>

#include "catline/device.hpp"
#include "catline/fock.hpp"
#include "catline/propagator.hpp"

namespace catline {

// Two engines behind one interface. effective tracks coherent components in
// closed form under a supplied EffectiveMap; exact integrates the drive over
// each pulse window in the interaction picture.
//
// The exact engine works in the computational basis: each pulsed qubit is
// rotated into the |+->/|-> frame, evolved, and rotated back. Besides the
// conditional amplitude transform, the integrated window deposits a scalar
// exponent e^{c_pm} on each branch; with dress_branch_phases (default) these
// are divided back out using the window's own effective map, which is the
// frame in which the closed-form algebra is stated. Set it to false to keep
// the raw window evolution.
enum class EngineKind { effective, exact };

struct GateEngine {
  EngineKind kind = EngineKind::effective;
  DeviceParams params;
  FluxPulse pulse;  // drive integrated by the exact engine
  PropagatorOptions opts;
  int fock_dim = 32;
  bool dress_branch_phases = true;
};

// One "qubit pattern x coherent component" term. bits uses the layout's
// ordering (qubit 0 is the highest bit); weights carry the full amplitude,
// the field factor |beta> being unit-normalized.
struct CoherentTerm {
  unsigned bits = 0;
  complexd beta{};
  complexd weight{};
};

struct CoherentSuperposition {
  int n_qubits = 0;
  std::vector<CoherentTerm> terms;

  double norm() const;
  // Combines terms with equal bits and nearly equal beta, drops negligible
  // weights.
  void merge(double tol = 1e-9);
  StateVector to_state(int fock_dim) const;
};

// Recovers a small coherent decomposition of each qubit pattern's field slice
// (Hankel null-space roots plus a least-squares weight fit). Throws a
// representation error when some slice is not a superposition of at most
// max_components coherent states within tol (relative residual).
CoherentSuperposition recognize_coherent(const StateVector& state, int max_components = 4,
                                         double tol = 1e-8);

// Conditional pulse on one qubit: each |+->|beta> component becomes
// |+->|beta e^{theta_pm}>. The StateVector overload recognizes the field
// content first (effective engine) or integrates the window (exact engine).
StateVector conditional_pulse(const StateVector& state, int qubit_index, const EffectiveMap& map,
                              const GateEngine& engine = {});
CoherentSuperposition conditional_pulse(const CoherentSuperposition& sup, int qubit_index,
                                        const EffectiveMap& map);

enum class MeasureAction { none, project_0, project_1, sample };

struct ScheduleEntry {
  int qubit_index = 0;
  FluxPulse pulse;
  MeasureAction measurement = MeasureAction::none;
};

struct PulseSchedule {
  std::vector<ScheduleEntry> entries;
  double delta_t_m = 0.0;  // s, readout window after the generator pulse

  // Checks qubit indices, pulse windows, per-qubit ordering and overlap.
  void validate(int n_qubits) const;
};

// The three-pulse bus sequence: generate on qubit 0 (measured), copy onto
// qubit 1 after the readout gap, then target qubit 0 again; equal durations.
PulseSchedule cnot_schedule(const FluxPulse& pulse_template, double delta_t_m);

enum class OutcomePolicy { sample, both_branches };

struct BranchRecord {
  int outcome = -1;
  double probability = 0.0;
  bool impossible = false;
  StateVector state;  // collapsed continuation; empty when impossible or not propagated
};

struct ProtocolResult {
  StateVector final_state;
  StateVector pre_measurement;  // state before the protocol's readout, when it has one
  std::vector<BranchRecord> branch_log;
  EngineKind engine = EngineKind::effective;
  double ideal_fidelity = -1.0;  // ghz_generate only
};

// Pulse on |0>|alpha>, then read the charge qubit. Outcome 0 leaves the even
// cat with probability (1 + e^{-2|alpha|^2})/2, outcome 1 the odd cat with
// the complement. both_branches logs both collapsed results (final_state is
// the outcome-0 branch); sample draws one outcome from the seed. alpha = 0
// marks the odd branch impossible.
ProtocolResult encode_field_qubit(complexd alpha, const EffectiveMap& map, OutcomePolicy policy,
                                  const GateEngine& engine = {}, unsigned long long seed = 1);

// Entangling pulse without the readout: atom_in = 0 gives
// w_+|0>|even> + w_-|1>|odd>, w_pm = sqrt((1 pm e^{-2|alpha|^2})/2); for
// atom_in = 1 the logical field labels come out flipped against the atom.
StateVector hadamard_field(int atom_in, complexd alpha, const EffectiveMap& map,
                           const GateEngine& engine = {});

struct CnotReadout {
  int atom_out = 0;
  int field_out = 0;
  double certainty = 1.0;  // probability mass behind atom_out
  StateVector state;       // pulsed joint state before readout collapse
};

// Field-controlled NOT on the atom. The field input must be a parity
// eigenstate (the logical cat basis is read out by photon-number parity);
// anything else is rejected with a pointer to conditional_pulse. atom_out is
// the majority readout; under the effective engine it is exact.
CnotReadout cnot_field_control(int atom_in, const StateVector& field_in, const EffectiveMap& map,
                               const GateEngine& engine = {});

// Two charge qubits sharing the bus: the first schedule entry generates the
// field qubit from qubit A (starting in |0>), its readout is post-selected on
// the requested control value, qubit A is re-prepared to q1_in, the copy
// pulse writes the field value onto qubit B (starting in |0>), and the final
// pulse targets qubit A. Both readout branches are logged; under the exact
// engine only the selected branch is propagated to the end. The effective
// engine realizes each scheduled pulse as the idealized conditional map; the
// exact engine integrates the schedule's own pulses.
ProtocolResult cnot_two_qubits(int q1_in, int q2_in, complexd alpha, const PulseSchedule& schedule,
                               const GateEngine& engine = {});

struct GhzOptions {
  bool include_qq = false;  // next-neighbor sigma_y sigma_y term (simultaneous only)
  double e_l = 0.0;         // inductive energy over hbar, rad/s
};

// N qubits pulsed against one field register, all starting in |0>|alpha>.
// Branch weights and the fidelity against the equal-weight target are
// reported. maps drive the effective engine (one per qubit); the exact
// engine integrates engine.pulse on every qubit, in one shared window when
// simultaneous, else back to back.
ProtocolResult ghz_generate(int n, complexd alpha, const std::vector<EffectiveMap>& maps,
                            bool simultaneous, const GateEngine& engine = {},
                            const GhzOptions& qq = {});

enum class RotateGate { generic, hadamard };

struct PumpDrive {
  double lambda = 0.0;   // g_b <b>, rad/s
  double omega_b = 0.0;  // rad/s
  double duration = 0.0; // s
};

struct RotateResult {
  StateVector state;
  PumpDrive drive;  // knobs actually applied
  bool regime_warning = false;
};

// Single-qubit rotation from the classical second mode: evolves
// E_J sigma_x + 2 g_b <b> cos(omega_b t) sigma_z on the qubit subspace and
// applies the resulting 2x2 to qubit_index (lab frame, free phase included).
// hadamard solves (lambda, omega_b, duration) so the full propagator equals
// the Hadamard up to a global phase, seeded near the requested pump strength;
// the passed omega_b/duration are ignored in that mode. regime_warning is
// set when g_a is not small against g_b <b>.
RotateResult rotate_qubit_classical_pump(const StateVector& state, int qubit_index,
                                         const DeviceParams& params, const Couplings& couplings,
                                         double pump_amplitude, double omega_b, double duration,
                                         RotateGate gate = RotateGate::generic,
                                         const PropagatorOptions& opts = {});

}  // namespace catline
