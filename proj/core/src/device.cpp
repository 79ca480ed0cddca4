#include "catline/device.hpp"

#include <cmath>
#include <complex>
#include <utility>

#include "catline/errors.hpp"

namespace catline {

namespace {

using cd = std::complex<double>;
const cd I_UNIT(0.0, 1.0);

MatrixXcd pauli_x() {
  MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

MatrixXcd pauli_y() {
  MatrixXcd m(2, 2);
  m << 0, -I_UNIT, I_UNIT, 0;
  return m;
}

MatrixXcd pauli_z() {
  MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Raising operator in whichever basis the frame uses; index 0 is the upper state.
MatrixXcd sigma_plus() {
  MatrixXcd m = MatrixXcd::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

// Non-throwing hermiticity tag: literal_complex drives legitimately produce
// non-Hermitian matrices, so this only records what the matrix turned out to be.
void tag_if_hermitian(DenseOperator& op) {
  double scale = std::max(op.m.cwiseAbs().maxCoeff(), 1.0);
  op.hermitian = (op.m - op.m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

// Kronecker chain over the qubit registers with up to two single-qubit
// insertions, then the field factor on the right.
MatrixXcd embed(int n_qubits, int j1, const MatrixXcd& m1, int j2, const MatrixXcd& m2,
                const MatrixXcd& field) {
  const MatrixXcd i2 = MatrixXcd::Identity(2, 2);
  MatrixXcd acc = MatrixXcd::Identity(1, 1);
  for (int k = 0; k < n_qubits; ++k) {
    if (k == j1)
      acc = kronecker(acc, m1);
    else if (k == j2)
      acc = kronecker(acc, m2);
    else
      acc = kronecker(acc, i2);
  }
  return kronecker(acc, field);
}

MatrixXcd embed(int n_qubits, int j, const MatrixXcd& m, const MatrixXcd& field) {
  return embed(n_qubits, j, m, -1, m, field);
}

}  // namespace

void DeviceParams::validate() const {
  if (!(e_j > 0.0) || !(omega_c > 0.0) || !(e_c_uev > 0.0) || !(gap_uev > 0.0) ||
      !(temperature > 0.0))
    throw Error(ErrorCode::invalid_argument, "device parameters must be positive");
  if (g < 0.0) throw Error(ErrorCode::invalid_argument, "coupling g must be nonnegative");
}

RegimeReport device_regime(const DeviceParams& p) {
  p.validate();
  const double kbt = k_boltzmann * p.temperature;
  const double ej = hbar * p.e_j;
  const double ec = p.e_c_uev * micro_ev;
  const double gap = p.gap_uev * micro_ev;
  RegimeReport r;
  r.kbt_over_ej = kbt / ej;
  r.ej_over_ec = ej / ec;
  r.ec_over_gap = ec / gap;
  r.ok = kbt < ej && ej < ec && ec < gap;
  return r;
}

void FluxPulse::validate() const {
  if (!(amplitude > 0.0) || amplitude > 1.0)
    throw Error(ErrorCode::invalid_argument, "pulse strength must lie in (0, 1]");
  if (!(nu > 0.0)) throw Error(ErrorCode::invalid_argument, "pulse frequency must be positive");
  if (!(t_off > t_on)) throw Error(ErrorCode::invalid_argument, "pulse window must be nonempty");
}

cd flux_at(const FluxPulse& pulse, double t) {
  if (!pulse.contains(t)) return 0.0;
  const cd f = 0.5 * pulse.amplitude * std::exp(I_UNIT * (pulse.nu * (t - pulse.t_on) + pulse.phi));
  if (pulse.mode == PulseMode::hermitized) return cd(f.real(), 0.0);
  return f;
}

cd qubit_frequency(const DeviceParams& params, const FluxPulse& pulse, double t,
                   CosExpansion expansion) {
  const cd x = pi * flux_at(pulse, t);
  if (expansion == CosExpansion::quadratic) return params.e_j * (1.0 - 0.5 * x * x);
  return params.e_j * std::cos(x);
}

cd detuning(const DeviceParams& params, const FluxPulse& pulse, double t, CosExpansion expansion) {
  return qubit_frequency(params, pulse, t, expansion) - params.omega_c;
}

DenseOperator build_single_qubit_hamiltonian(const DeviceParams& params, const FluxPulse& pulse,
                                             double t, Frame frame, const SpaceLayout& layout,
                                             CosExpansion expansion) {
  params.validate();
  if (layout.n_qubits != 1)
    throw Error(ErrorCode::layout_mismatch, "single-qubit Hamiltonian needs exactly one qubit");
  if (layout.fock_dim < 2)
    throw Error(ErrorCode::layout_mismatch, "single-qubit Hamiltonian needs a field register");

  const LadderOperators lad = ladder_operators(layout.fock_dim);
  const MatrixXcd i2 = MatrixXcd::Identity(2, 2);
  const MatrixXcd i_f = MatrixXcd::Identity(layout.fock_dim, layout.fock_dim);

  MatrixXcd h;
  if (frame == Frame::lab) {
    const cd nu_a = qubit_frequency(params, pulse, t, expansion);
    h = params.omega_c * kronecker(i2, lad.number.m) + nu_a * kronecker(pauli_z(), i_f) +
        params.g * kronecker(pauli_x(), lad.a_dagger.m + lad.a.m);
  } else {
    const cd delta = detuning(params, pulse, t, expansion);
    const cd ph = std::exp(I_UNIT * (params.omega_c * t));
    const cd ph2 = ph * ph;
    const MatrixXcd sp = sigma_plus();
    const MatrixXcd s_tilde = ph2 * sp + std::conj(ph2) * sp.adjoint();
    const MatrixXcd x_tilde = ph * lad.a_dagger.m + std::conj(ph) * lad.a.m;
    h = delta * kronecker(pauli_z(), i_f) + params.g * kronecker(s_tilde, x_tilde);
  }

  DenseOperator op(layout, std::move(h));
  tag_if_hermitian(op);
  return op;
}

Couplings two_mode_couplings(const TwoModeParams& p) {
  const double required[] = {p.omega_a, p.omega_b, p.c_j, p.c_g_a, p.c_g_b,
                             p.l_a,     p.l_b,     p.c_a, p.c_b};
  for (double v : required)
    if (!(v > 0.0))
      throw Error(ErrorCode::invalid_argument, "two-mode parameters must be positive");

  const double e = elementary_charge;
  Couplings c;
  c.g_a = e * p.c_g_a / (hbar * (p.c_j + p.c_g_a)) * std::sqrt(hbar * p.omega_a / (p.l_a * p.c_a));
  c.g_b = e * p.c_g_b / (hbar * (p.c_j + p.c_g_b)) * std::sqrt(hbar * p.omega_b / (p.l_b * p.c_b));
  c.g_ab = e * e * p.c_g_a * p.c_g_b / (hbar * (p.c_j + p.c_g_a)) *
           std::sqrt(hbar * hbar * p.omega_a * p.omega_b / (p.l_a * p.l_b * p.c_a * p.c_b));
  return c;
}

DenseOperator build_two_mode_hamiltonian(const TwoModeParams& p, const DeviceParams& params,
                                         const FluxPulse& pulse, double t, TwoModeVariant variant,
                                         const SpaceLayout& layout, int fock_dim_b) {
  return build_two_mode_hamiltonian(two_mode_couplings(p), p.omega_a, p.omega_b, p.b_amp, params,
                                    pulse, t, variant, layout, fock_dim_b);
}

DenseOperator build_two_mode_hamiltonian(const Couplings& c, double omega_a, double omega_b,
                                         double b_amp, const DeviceParams& params,
                                         const FluxPulse& pulse, double t, TwoModeVariant variant,
                                         const SpaceLayout& layout, int fock_dim_b) {
  params.validate();
  if (layout.n_qubits != 1)
    throw Error(ErrorCode::layout_mismatch, "two-mode Hamiltonian needs exactly one qubit");

  const MatrixXcd i2 = MatrixXcd::Identity(2, 2);
  const cd cos_flux = std::cos(pi * flux_at(pulse, t));

  MatrixXcd h;
  if (variant == TwoModeVariant::full) {
    if (fock_dim_b < 2)
      throw Error(ErrorCode::layout_mismatch, "full variant needs a quantized b register");
    if (layout.fock_dim % fock_dim_b != 0 || layout.fock_dim / fock_dim_b < 2)
      throw Error(ErrorCode::layout_mismatch,
                  "layout field dimension must factor as dim_a * fock_dim_b");
    const int fda = layout.fock_dim / fock_dim_b;
    const LadderOperators la = ladder_operators(fda);
    const LadderOperators lb = ladder_operators(fock_dim_b);
    const MatrixXcd ia = MatrixXcd::Identity(fda, fda);
    const MatrixXcd ib = MatrixXcd::Identity(fock_dim_b, fock_dim_b);
    const MatrixXcd xa = la.a_dagger.m + la.a.m;
    const MatrixXcd xb = lb.a_dagger.m + lb.a.m;

    h = omega_a * kronecker(i2, kronecker(la.number.m, ib)) +
        params.e_j * cos_flux * kronecker(pauli_x(), kronecker(ia, ib)) +
        c.g_a * kronecker(pauli_z(), kronecker(xa, ib)) +
        omega_b * kronecker(i2, kronecker(ia, lb.number.m)) +
        c.g_b * kronecker(pauli_z(), kronecker(ia, xb)) +
        c.g_ab * kronecker(i2, kronecker(xa, xb));
  } else {
    if (fock_dim_b != 1)
      throw Error(ErrorCode::layout_mismatch, "classical-pump variants keep mode b classical");
    if (layout.fock_dim < 2)
      throw Error(ErrorCode::layout_mismatch, "two-mode Hamiltonian needs a field register");
    const LadderOperators la = ladder_operators(layout.fock_dim);
    const MatrixXcd ia = MatrixXcd::Identity(layout.fock_dim, layout.fock_dim);
    const MatrixXcd xa = la.a_dagger.m + la.a.m;
    const double pump = std::cos(omega_b * t);

    h = omega_a * kronecker(i2, la.number.m) +
        omega_b * b_amp * b_amp * MatrixXcd::Identity(layout.dim(), layout.dim()) +
        params.e_j * cos_flux * kronecker(pauli_x(), ia) + c.g_a * kronecker(pauli_z(), xa) +
        2.0 * c.g_b * b_amp * pump * kronecker(pauli_z(), ia);
    if (variant == TwoModeVariant::classical_pump)
      h += 2.0 * b_amp * c.g_ab * pump * kronecker(i2, xa);
  }

  DenseOperator op(layout, std::move(h));
  tag_if_hermitian(op);
  return op;
}

double inductive_energy(double c_j, double c_q, double l) {
  if (!(c_j > 0.0) || !(c_q > 0.0) || !(l > 0.0))
    throw Error(ErrorCode::invalid_argument, "inductive energy needs positive C_J, C_q, L");
  const double c_qb = c_j * c_q / (c_j + c_q);
  return c_j * flux_quantum * flux_quantum / (c_qb * pi * pi * l) / hbar;
}

DenseOperator build_n_qubit_hamiltonian(const NQubitParams& np, const DeviceParams& params,
                                        double t, const SpaceLayout& layout) {
  params.validate();
  const int n = int(np.e_j.size());
  if (n < 1) throw Error(ErrorCode::invalid_argument, "need at least one qubit");
  if (int(np.pulses.size()) != n)
    throw Error(ErrorCode::invalid_argument, "one pulse per qubit required");
  if (layout.n_qubits != n)
    throw Error(ErrorCode::layout_mismatch, "layout qubit count must match the parameter set");
  if (layout.fock_dim < 2)
    throw Error(ErrorCode::layout_mismatch, "shared-mode Hamiltonian needs a field register");
  if (np.include_qq && !(np.e_l > 0.0))
    throw Error(ErrorCode::invalid_argument, "qubit-qubit term needs a positive inductive energy");

  const LadderOperators lad = ladder_operators(layout.fock_dim);
  const MatrixXcd i_f = MatrixXcd::Identity(layout.fock_dim, layout.fock_dim);
  const MatrixXcd x_f = lad.a_dagger.m + lad.a.m;

  std::vector<cd> cos_flux(n);
  for (int j = 0; j < n; ++j) cos_flux[j] = std::cos(pi * flux_at(np.pulses[j], t));

  const MatrixXcd i_q = MatrixXcd::Identity(1L << n, 1L << n);
  MatrixXcd h = params.omega_c * kronecker(i_q, lad.number.m);
  for (int j = 0; j < n; ++j) {
    h += np.e_j[j] * cos_flux[j] * embed(n, j, pauli_x(), i_f);
    h += params.g * embed(n, j, pauli_z(), x_f);
  }
  if (np.include_qq) {
    for (int j = 0; j + 1 < n; ++j) {
      const cd w = 4.0 * np.e_j[j] * np.e_j[j + 1] / np.e_l * cos_flux[j] * cos_flux[j + 1];
      h -= w * embed(n, j, pauli_y(), j + 1, pauli_y(), i_f);
    }
  }

  DenseOperator op(layout, std::move(h));
  tag_if_hermitian(op);
  return op;
}

}  // namespace catline
