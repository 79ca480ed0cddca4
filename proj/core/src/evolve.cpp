#include <algorithm>
#include <cmath>
#include <memory>

#include "catline/propagator.hpp"
#include "phase_model.hpp"

namespace catline {

namespace {

// Dormand-Prince 5(4), 7 stages, first-same-as-last.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

EvolveResult evolve_exact_full(const HamiltonianApply& apply, const StateVector& psi0, double t0,
                               double t1, const PropagatorOptions& opts, bool renormalize) {
  opts.validate();
  if (!(t1 > t0)) throw Error(ErrorCode::invalid_argument, "need t1 > t0");
  const long n = psi0.amps.size();
  if (n < 1) throw Error(ErrorCode::invalid_dimension, "empty state");

  const complexd minus_i(0.0, -1.0);
  VectorXcd y = psi0.amps, hy(n);
  VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n), errv(n);

  auto rhs = [&](double t, const VectorXcd& v, VectorXcd& out) {
    apply(t, v, hy);
    out = minus_i * hy;
  };

  double t = t0;
  double h = std::min(opts.max_step, (t1 - t0) / 16.0);
  const double h_floor = (t1 - t0) * 1e-15;
  long accepted = 0;
  bool have_k1 = false;

  while (t < t1 - (t1 - t0) * 1e-14) {
    h = std::min(h, t1 - t);
    if (h < h_floor)
      throw Error(ErrorCode::integration_failure,
                  "step size underflow, last good time t = " + std::to_string(t));
    if (!have_k1) {
      rhs(t, y, k1);
      have_k1 = true;
    }

    ytmp = y + h * a21 * k1;
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, y5, k7);
    errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_sq = 0.0;
    for (long i = 0; i < n; ++i) {
      const double scale =
          opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double q = std::abs(errv[i]) / scale;
      err_sq += q * q;
    }
    const double err = std::sqrt(err_sq / double(n));

    if (err <= 1.0) {
      t += h;
      y.swap(y5);
      k1.swap(k7);  // first-same-as-last
      ++accepted;
    }
    const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h = std::min(opts.max_step, h * std::clamp(factor, 0.2, 5.0));
  }

  EvolveResult out;
  out.steps = accepted;
  const double norm = y.norm();
  out.norm_drift = std::abs(norm - 1.0);
  if (renormalize && norm > 0.0) y /= norm;
  out.state = StateVector(psi0.layout, std::move(y));
  return out;
}

EvolveResult evolve_exact_full(const HamiltonianFn& h, const StateVector& psi0, double t0,
                               double t1, const PropagatorOptions& opts, bool renormalize) {
  const long n = psi0.amps.size();
  HamiltonianApply apply = [&h, n](double t, const VectorXcd& v, VectorXcd& out) {
    const DenseOperator op = h(t);
    if (op.m.rows() != n)
      throw Error(ErrorCode::layout_mismatch, "hamiltonian dimension does not match the state");
    out = op.m * v;
  };
  return evolve_exact_full(apply, psi0, t0, t1, opts, renormalize);
}

StateVector evolve_exact(const HamiltonianFn& h, const StateVector& psi0, double t0, double t1,
                         const PropagatorOptions& opts, bool renormalize) {
  return evolve_exact_full(h, psi0, t0, t1, opts, renormalize).state;
}

HamiltonianApply pulsed_interaction(const DeviceParams& params, const FluxPulse& pulse,
                                    const PropagatorOptions& opts, int fock_dim) {
  params.validate();
  pulse.validate();
  opts.validate();
  if (fock_dim < 2) throw Error(ErrorCode::invalid_dimension, "need fock_dim >= 2");

  auto pm = std::make_shared<detail::PhaseModel>(params, pulse, opts.expansion);
  const double g = params.g;
  const double w = params.omega_c;
  const double t_on = pulse.t_on;
  const bool literal = pulse.mode == PulseMode::literal_complex;
  const long f = fock_dim;

  return [pm, g, w, t_on, literal, f](double t, const VectorXcd& y, VectorXcd& out) {
    if (y.size() != 2 * f || out.size() != 2 * f)
      throw Error(ErrorCode::layout_mismatch, "state must be qubit x field");
    const double tau = t - t_on;
    const complexd lam = pm->lambda(tau);
    if (literal && std::abs(2.0 * lam.imag()) > 40.0)
      throw Error(ErrorCode::integration_failure,
                  "literal drive envelope exceeds the integrable range; use the hermitized mode");
    const complexd i1(0.0, 1.0);
    const complexd up = std::exp(2.0 * i1 * (w * tau - lam));    // sigma_+ factor
    const complexd dn = std::exp(-2.0 * i1 * (w * tau - lam));   // sigma_- factor
    const complexd er = std::exp(i1 * w * tau);                  // a^dag factor
    const complexd el = std::conj(er);

    // H y with H = g [sigma_+ up + sigma_- dn] x (a^dag er + a el);
    // qubit index 0 is the upper sigma_z state.
    for (long nn = 0; nn < f; ++nn) {
      complexd x0(0.0, 0.0), x1(0.0, 0.0);
      if (nn > 0) {
        const double r = std::sqrt(double(nn));
        x0 += er * r * y[nn - 1];
        x1 += er * r * y[f + nn - 1];
      }
      if (nn + 1 < f) {
        const double r = std::sqrt(double(nn + 1));
        x0 += el * r * y[nn + 1];
        x1 += el * r * y[f + nn + 1];
      }
      out[nn] = g * up * x1;
      out[f + nn] = g * dn * x0;
    }
  };
}

}  // namespace catline
