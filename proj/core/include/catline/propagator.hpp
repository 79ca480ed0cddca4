#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "catline/device.hpp"
#include "catline/fock.hpp"

namespace catline {

struct PropagatorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 1.0e-11;  // s
  int dyson_order = 2;
  // The perturbative series follows the small-flux expansion by default.
  CosExpansion expansion = CosExpansion::quadratic;

  void validate() const;
};

enum class AtomBranch { plus, minus };

// One perturbative expectation value. The literal-complex drive produces
// envelope factors exp[(B/nu)(cos 2phi - cos 2u)] that overflow mid-period;
// contributions whose log-magnitude passes 600 are dropped from `value`,
// flagged, and their largest log recorded. At half-period multiples the
// envelope returns to exactly 1 and nothing is clipped.
struct DysonValue {
  complexd value{};
  double error_estimate = 0.0;
  bool envelope_clipped = false;
  double clipped_log_weight = 0.0;
};

struct ThetaTrace {
  std::vector<double> times;  // absolute, ascending
  std::vector<complexd> theta_plus;
  std::vector<complexd> theta_minus;
  std::vector<complexd> c_plus;   // photon-number-independent exponent parts
  std::vector<complexd> c_minus;
  std::vector<bool> clipped;      // either branch hit the envelope clip here
};

struct EffectiveMap {
  complexd theta_plus_T{};
  complexd theta_minus_T{};
  complexd c_plus_T{};
  complexd c_minus_T{};
  double duration_T = 0.0;

  // The idealized conditional map: theta_minus = i pi, theta_plus = 0.
  static EffectiveMap ideal(double duration);
};

// ---- exact propagation ----------------------------------------------------

using HamiltonianFn = std::function<DenseOperator(double)>;
// apply(t, psi, out): out = (H(t)/hbar) psi, in rad/s.
using HamiltonianApply = std::function<void(double, const VectorXcd&, VectorXcd&)>;

struct EvolveResult {
  StateVector state;
  double norm_drift = 0.0;  // |norm - 1| before any renormalization
  long steps = 0;
};

EvolveResult evolve_exact_full(const HamiltonianApply& apply, const StateVector& psi0, double t0,
                               double t1, const PropagatorOptions& opts, bool renormalize);

EvolveResult evolve_exact_full(const HamiltonianFn& h, const StateVector& psi0, double t0,
                               double t1, const PropagatorOptions& opts, bool renormalize);

StateVector evolve_exact(const HamiltonianFn& h, const StateVector& psi0, double t0, double t1,
                         const PropagatorOptions& opts, bool renormalize = true);

// Interaction-picture drive for one qubit and the mode, on layout (1, fock_dim):
// g [sigma_+ e^{2i w tau - 2i Lambda(tau)} + sigma_- e^{-2i w tau + 2i Lambda(tau)}]
//   x (a^dag e^{i w tau} + a e^{-i w tau}),  tau = t - t_on.
// Valid inside the pulse window. literal_complex mode is rejected once the
// accumulated Im Lambda would exceed double range (integration_failure).
HamiltonianApply pulsed_interaction(const DeviceParams& params, const FluxPulse& pulse,
                                    const PropagatorOptions& opts, int fock_dim);

// ---- second-order expansion ------------------------------------------------

DysonValue dyson_expectation_full(const FluxPulse& pulse, const DeviceParams& params,
                                  complexd alpha, AtomBranch branch, double t,
                                  const PropagatorOptions& opts);

complexd dyson_expectation(const FluxPulse& pulse, const DeviceParams& params, complexd alpha,
                           AtomBranch branch, double t, const PropagatorOptions& opts);

// Norm of the first-order transition amplitude out of |branch>|alpha>;
// reported separately because the expansion's diagonal first order vanishes.
DysonValue first_order_magnitude(const FluxPulse& pulse, const DeviceParams& params,
                                 complexd alpha, AtomBranch branch, double t,
                                 const PropagatorOptions& opts);

// theta and the constant exponent at each sample time, by the two-alpha
// linear extraction (alpha^2 = 0.1 and 0.3). Accumulation stops at t_off.
ThetaTrace theta_trace(const FluxPulse& pulse, const DeviceParams& params,
                       const PropagatorOptions& opts, const std::vector<double>& sample_times);

complexd effective_apply(const EffectiveMap& map, AtomBranch branch, complexd alpha);

// ---- calibration -----------------------------------------------------------

struct CalibrationTarget {
  double im_theta = pi;  // Im theta_minus at the half-period
};

struct CalibrationResult {
  double g = 0.0;
  double phi = 0.0;
  double achieved_im_theta = 0.0;
  double first_order_ratio = 0.0;  // |first order| / |second order| at the half-period
};

// Root-solves g on [1e6, 1e10] rad/s for the phase target, then picks phi
// minimizing the first-order remnant, then refreshes g. The achieved ratio is
// reported, not enforced; only a failed g bracket throws.
CalibrationResult calibrate_pulse(const DeviceParams& params, const FluxPulse& pulse_template,
                                  const CalibrationTarget& target = {},
                                  const PropagatorOptions& opts = {});

EffectiveMap make_effective_map(const FluxPulse& pulse, const DeviceParams& params,
                                const PropagatorOptions& opts, double duration);

// Worse-branch infidelity between the exact evolution and the effective-map
// product prediction at t_on + duration. Runs on the hermitized counterpart
// of the pulse (the literal drive is not exactly integrable), with the map
// recomputed in the same mode, so this measures the resummation error alone.
double approximation_error(const FluxPulse& pulse, const DeviceParams& params, complexd alpha,
                           double duration, const PropagatorOptions& opts, int fock_dim = 32);

}  // namespace catline
