#include "catline/dissipation.hpp"

#include <cmath>

#include "catline/constants.hpp"
#include "catline/errors.hpp"

namespace catline {

void BathParams::validate() const {
  if (!(beta > 0.0)) throw Error(ErrorCode::invalid_argument, "bath beta must be positive");
  if (!(temperature > 0.0))
    throw Error(ErrorCode::invalid_argument, "bath temperature must be positive");
  if (!(tau_kappa > 0.0)) throw Error(ErrorCode::invalid_argument, "tau_kappa must be positive");
}

RelaxationTimes relaxation_times(const DeviceParams& params, const BathParams& bath) {
  params.validate();
  bath.validate();
  RelaxationTimes out;
  out.lambda_cap = hbar * params.e_j / (k_boltzmann * bath.temperature);
  const double coth = 1.0 / std::tanh(out.lambda_cap);
  out.tau_r = 1.0 / (2.0 * pi * bath.beta * params.e_j * coth);
  const double dephasing_rate =
      1.0 / (2.0 * out.tau_r) + 2.0 * pi * bath.beta * k_boltzmann * bath.temperature / hbar;
  out.tau_phi = 1.0 / dephasing_rate;
  return out;
}

AtomPopulations atom_population_probs(double t, const DeviceParams& params, const BathParams& bath,
                                      PopulationModel model) {
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_argument, "time must be nonnegative");
  const RelaxationTimes rt = relaxation_times(params, bath);
  const double th = model == PopulationModel::tanh1 ? 1.0 : std::tanh(rt.lambda_cap);
  const double relax = std::exp(-t / rt.tau_r);
  const double deph = std::exp(-t / rt.tau_phi);
  const double osc = std::cos(2.0 * params.e_j * t) * deph;

  AtomPopulations p;
  p.p0 = 0.5 * (th + (1.0 - th) * relax + osc);
  p.p1 = 0.5 * (th + (1.0 - th) * relax - osc);
  p.pt = complexd(0.0, -std::sin(2.0 * params.e_j * t) * deph);
  return p;
}

DampedCat damped_cat(complexd alpha, Parity parity, double t, const BathParams& bath) {
  bath.validate();
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_argument, "time must be nonnegative");
  cat_info(alpha, parity);  // rejects the degenerate odd alpha = 0 case

  DampedCat c;
  c.alpha0 = alpha;
  c.parity = parity;
  c.t = t;
  c.tau_kappa = bath.tau_kappa;
  const double eta2 = std::exp(-t / bath.tau_kappa);
  c.alpha_t = alpha * std::sqrt(eta2);
  c.coherence_weight = std::exp(-2.0 * std::norm(alpha) * (1.0 - eta2));
  return c;
}

MatrixXcd damped_cat_density(const DampedCat& cat, int fock_dim) {
  const CatState info = cat_info(cat.alpha0, cat.parity);
  const VectorXcd p = coherent_state(cat.alpha_t, fock_dim).amps;
  const VectorXcd m = coherent_state(-cat.alpha_t, fock_dim).amps;
  const double sign = cat.parity == Parity::even ? 1.0 : -1.0;
  const double n2 = info.norm_constant * info.norm_constant;

  MatrixXcd rho = p * p.adjoint() + m * m.adjoint();
  rho += sign * cat.coherence_weight * (p * m.adjoint() + m * p.adjoint());
  rho /= n2;
  return rho;
}

SequentialProbs sequential_pulse_probs(complexd alpha, double t, const BathParams& bath,
                                       ProbeSource source, int fock_dim) {
  bath.validate();
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_argument, "time must be nonnegative");
  if (!(std::abs(alpha) > 0.0))
    throw Error(ErrorCode::invalid_argument, "probe needs a nonzero cat amplitude");

  const double a2 = std::norm(alpha);
  const double x = t / bath.tau_kappa;
  SequentialProbs out;
  out.nonphysical_branch = x > 1.0;

  if (source == ProbeSource::closed_form) {
    const double shrink = std::exp(-2.0 * a2 * std::exp(-x));
    const double decohere = std::exp(-2.0 * a2 * (1.0 - std::exp(-x)));
    const double d = (shrink + decohere) / (1.0 + std::exp(-2.0 * a2));
    if (x <= 1.0) {
      out.p00 = 0.5 * (1.0 + d);
      out.p10 = 0.5 * (1.0 - d);
    } else {
      // Stated branch for late times; P00 + P10 = 1 - d there, short of 1.
      out.p00 = 0.5 * (1.0 - d);
      out.p10 = 0.5 * (1.0 - d);
    }
    return out;
  }

  // Channel oracle: damp the even-cat density, then read the parity
  // projectors; the second pulse maps parity onto the charge readout.
  const DampedCat dc = damped_cat(alpha, Parity::even, t, bath);
  const MatrixXcd rho = damped_cat_density(dc, fock_dim);
  double even = 0.0, odd = 0.0;
  for (int n = 0; n < fock_dim; ++n) {
    const double pop = rho(n, n).real();
    (n % 2 == 0 ? even : odd) += pop;
  }
  out.p00 = even;
  out.p10 = odd;
  return out;
}

}  // namespace catline
