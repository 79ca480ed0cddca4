#pragma once

#include "catline/device.hpp"
#include "catline/fock.hpp"

namespace catline {

struct BathParams {
  double beta = 1.0e-3;        // dimensionless ohmic damping constant
  double temperature = 0.030;  // K
  double tau_kappa = 1.0e-6;   // s, field amplitude-damping time

  void validate() const;
};

struct RelaxationTimes {
  double lambda_cap = 0.0;  // hbar E_J / (k_B T)
  double tau_r = 0.0;       // s
  double tau_phi = 0.0;     // s
};

RelaxationTimes relaxation_times(const DeviceParams& params, const BathParams& bath);

// The qubit starts in its upper level. full keeps the thermal equilibrium
// factor tanh(Lambda); tanh1 is the low-temperature shortcut tanh -> 1.
enum class PopulationModel { full, tanh1 };

struct AtomPopulations {
  double p0 = 0.0;
  double p1 = 0.0;
  complexd pt{};  // coherence term, purely imaginary
};

AtomPopulations atom_population_probs(double t, const DeviceParams& params, const BathParams& bath,
                                      PopulationModel model = PopulationModel::full);

// Amplitude-damped cat: alpha shrinks to alpha e^{-t/2 tau_kappa} while the
// cross-dyad coherence carries exp(-2|alpha|^2 (1 - e^{-t/tau_kappa})).
struct DampedCat {
  complexd alpha0{};
  complexd alpha_t{};
  double coherence_weight = 1.0;
  Parity parity = Parity::even;
  double t = 0.0;
  double tau_kappa = 0.0;
};

DampedCat damped_cat(complexd alpha, Parity parity, double t, const BathParams& bath);

// Exact rank-2 density matrix of the damped cat in the truncated Fock basis;
// trace equals 1 up to truncation.
MatrixXcd damped_cat_density(const DampedCat& cat, int fock_dim);

// Two-pulse probe of the decaying cat: P_j0 is the probability of reading j
// on the second charge measurement given 0 on the first. closed_form is the
// piecewise expression (its t > tau_kappa branch is kept verbatim although
// P00 + P10 there falls short of 1; the flag marks it). channel_oracle runs
// the damping channel on the encoded density and reads the parity projectors
// numerically.
enum class ProbeSource { closed_form, channel_oracle };

struct SequentialProbs {
  double p00 = 0.0;
  double p10 = 0.0;
  bool nonphysical_branch = false;
};

SequentialProbs sequential_pulse_probs(complexd alpha, double t, const BathParams& bath,
                                       ProbeSource source, int fock_dim = 64);

}  // namespace catline
