#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "catline/device.hpp"
#include "doctest.h"

using namespace catline;
using std::complex;

namespace {

DeviceParams reference_device() {
  DeviceParams d;
  d.g = 1.0e9;
  return d;
}

FluxPulse reference_pulse() {
  FluxPulse p;
  p.t_off = p.t_on + p.half_period();  // 62.5 ns at nu = 16 pi MHz
  return p;
}

MatrixXcd sx() {
  MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

MatrixXcd sz() {
  MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

double rel_diff(const MatrixXcd& a, const MatrixXcd& b) {
  double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

TEST_CASE("flux pulse window and phase") {
  FluxPulse p = reference_pulse();
  CHECK(p.half_period() == doctest::Approx(62.5e-9).epsilon(1e-12));

  complex<double> at_on = flux_at(p, p.t_on);
  CHECK(at_on.real() == doctest::Approx(0.35).epsilon(1e-14));
  CHECK(std::abs(at_on.imag()) < 1e-15);

  CHECK(flux_at(p, p.t_on - 1e-12) == complex<double>(0.0));
  CHECK(flux_at(p, p.t_off + 1e-12) == complex<double>(0.0));
  CHECK(flux_at(p, p.t_off) != complex<double>(0.0));  // window inclusive

  // One half-period in: e^{i nu T} = e^{i pi}.
  complex<double> at_half = flux_at(p, p.t_on + 62.5e-9);
  CHECK(at_half.real() == doctest::Approx(-0.35).epsilon(1e-12));
  CHECK(std::abs(at_half.imag()) < 1e-12);

  FluxPulse shifted = p;
  shifted.phi = pi / 2.0;
  complex<double> at_phi = flux_at(shifted, p.t_on);
  CHECK(std::abs(at_phi.real()) < 1e-15);
  CHECK(at_phi.imag() == doctest::Approx(0.35).epsilon(1e-14));

  shifted.mode = PulseMode::hermitized;
  complex<double> herm = flux_at(shifted, p.t_on);
  CHECK(herm.imag() == 0.0);
  CHECK(std::abs(herm.real()) < 1e-15);

  FluxPulse bad = p;
  bad.amplitude = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.t_off = bad.t_on;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("qubit frequency and detuning") {
  DeviceParams d = reference_device();
  FluxPulse p = reference_pulse();

  // Pulse off: bare Josephson frequency, both expansions.
  double t_out = p.t_off + 1.0e-9;
  CHECK(qubit_frequency(d, p, t_out, CosExpansion::exact_cos).real() ==
        doctest::Approx(1.59e11).epsilon(1e-14));
  CHECK(qubit_frequency(d, p, t_out, CosExpansion::quadratic).real() ==
        doctest::Approx(1.59e11).epsilon(1e-14));
  CHECK(detuning(d, p, t_out, CosExpansion::exact_cos).real() ==
        doctest::Approx(-5.48e11).epsilon(1e-14));

  // Real flux 0.35 under the quadratic expansion.
  double expected = 1.59e11 * (1.0 - 0.5 * std::pow(0.35 * pi, 2));
  complex<double> nu_quad = qubit_frequency(d, p, p.t_on, CosExpansion::quadratic);
  CHECK(nu_quad.real() == doctest::Approx(expected).epsilon(1e-13));
  CHECK(nu_quad.real() == doctest::Approx(6.288e10).epsilon(1e-3));

  // Quadratic vs exact at |flux| = 0.1.
  FluxPulse small = p;
  small.amplitude = 0.2;
  complex<double> e1 = qubit_frequency(d, small, p.t_on, CosExpansion::exact_cos);
  complex<double> e2 = qubit_frequency(d, small, p.t_on, CosExpansion::quadratic);
  CHECK(std::abs(e1 - e2) / std::abs(e1) < 5e-3);

  // Hermitized detuning is real inside the window.
  FluxPulse herm = p;
  herm.mode = PulseMode::hermitized;
  CHECK(detuning(d, herm, p.t_on + 10.0e-9, CosExpansion::exact_cos).imag() == 0.0);

  // Literal mode mid-window carries an imaginary part.
  CHECK(std::abs(qubit_frequency(d, p, p.t_on + 10.0e-9, CosExpansion::exact_cos).imag()) > 0.0);
}

TEST_CASE("device regime diagnostic at the published operating point") {
  RegimeReport r = device_regime(reference_device());
  CHECK(r.ok);
  CHECK(r.kbt_over_ej == doctest::Approx(0.0247).epsilon(2e-2));
  CHECK(r.ej_over_ec == doctest::Approx(0.4186).epsilon(2e-2));
  CHECK(r.ec_over_gap == doctest::Approx(250.0 / 458.3).epsilon(1e-6));

  DeviceParams hot = reference_device();
  hot.temperature = 30.0;  // 30 K swamps the Josephson energy
  CHECK(!device_regime(hot).ok);

  DeviceParams bad = reference_device();
  bad.e_j = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("single-qubit lab Hamiltonian matches its definition") {
  DeviceParams d = reference_device();
  FluxPulse p = reference_pulse();
  SpaceLayout layout(1, 6);
  LadderOperators lad = ladder_operators(6);
  MatrixXcd i2 = MatrixXcd::Identity(2, 2);
  MatrixXcd i_f = MatrixXcd::Identity(6, 6);

  double t_out = p.t_off + 1.0e-9;
  DenseOperator h = build_single_qubit_hamiltonian(d, p, t_out, Frame::lab, layout);
  MatrixXcd expected = d.omega_c * kronecker(i2, lad.number.m) +
                       d.e_j * kronecker(sz(), i_f) +
                       d.g * kronecker(sx(), lad.a_dagger.m + lad.a.m);
  CHECK(rel_diff(h.m, expected) < 1e-14);
  CHECK(h.hermitian);

  // Literal complex drive mid-window breaks hermiticity.
  DenseOperator h_mid =
      build_single_qubit_hamiltonian(d, p, p.t_on + 10.0e-9, Frame::lab, layout);
  CHECK(!h_mid.hermitian);

  FluxPulse herm = p;
  herm.mode = PulseMode::hermitized;
  for (double frac : {0.0, 0.25, 0.5, 0.8}) {
    DenseOperator hh = build_single_qubit_hamiltonian(
        d, herm, p.t_on + frac * 62.5e-9, Frame::lab, layout);
    CHECK(hh.hermitian);
  }

  CHECK_THROWS_AS(build_single_qubit_hamiltonian(d, p, 0.0, Frame::lab, SpaceLayout(2, 6)),
                  Error);
}

TEST_CASE("single-qubit rotating Hamiltonian: structure and periodicity") {
  DeviceParams d = reference_device();
  FluxPulse p = reference_pulse();
  SpaceLayout layout(1, 6);
  LadderOperators lad = ladder_operators(6);
  MatrixXcd i_f = MatrixXcd::Identity(6, 6);

  // g = 0 leaves the diagonal detuning term only.
  DeviceParams d0 = d;
  d0.g = 0.0;
  double t_out = p.t_off + 1.0e-9;
  DenseOperator h0 = build_single_qubit_hamiltonian(d0, p, t_out, Frame::rotating, layout);
  complex<double> delta = detuning(d0, p, t_out, CosExpansion::exact_cos);
  CHECK(rel_diff(h0.m, delta * kronecker(sz(), i_f)) < 1e-14);

  // Full rotating form, written out by hand at one time point past the window.
  double t = 70.0e-9;
  DenseOperator h = build_single_qubit_hamiltonian(d, p, t, Frame::rotating, layout);
  complex<double> ph = std::exp(complex<double>(0.0, d.omega_c * t));
  MatrixXcd sp = MatrixXcd::Zero(2, 2);
  sp(0, 1) = 1.0;
  MatrixXcd s_tilde = ph * ph * sp + std::conj(ph * ph) * sp.adjoint();
  MatrixXcd x_tilde = ph * lad.a_dagger.m + std::conj(ph) * lad.a.m;
  MatrixXcd expected = detuning(d, p, t, CosExpansion::exact_cos) * kronecker(sz(), i_f) +
                       d.g * kronecker(s_tilde, x_tilde);
  CHECK(rel_diff(h.m, expected) < 1e-14);
  CHECK(h.hermitian);  // pulse is off at this t, detuning real

  // Phase factors are 2 pi / omega_c periodic (pulse off at both samples).
  DeviceParams dp = d;
  dp.g = 1.0e3;
  double t2 = t + 2.0 * pi / d.omega_c;
  DenseOperator ha = build_single_qubit_hamiltonian(dp, p, t, Frame::rotating, layout);
  DenseOperator hb = build_single_qubit_hamiltonian(dp, p, t2, Frame::rotating, layout);
  // Relative to the coupling scale: only the phase factors can differ.
  double scale = dp.g * std::sqrt(5.0);
  CHECK((ha.m - hb.m).cwiseAbs().maxCoeff() / scale < 1e-10);
}

TEST_CASE("two-mode couplings: regression values and exact scalings") {
  TwoModeParams p;
  p.omega_a = 4.0e10;
  p.omega_b = 3.0e10;
  p.c_j = 1.0e-15;
  p.c_g_a = 1.0e-16;
  p.c_g_b = 1.0e-16;
  p.l_a = 0.02;
  p.l_b = 0.02;
  p.c_a = 1.6e-10;
  p.c_b = 1.6e-10;

  Couplings c = two_mode_couplings(p);
  CHECK(c.g_a == doctest::Approx(1.586e8).epsilon(1e-3));
  CHECK(c.g_b == doctest::Approx(1.373e8).epsilon(1e-3));
  // The cross coupling lands some 41 orders below g_b for cm-scale lines,
  // which is what lets the pump treatment drop it.
  CHECK(c.g_ab / c.g_b == doctest::Approx(1.84e-41).epsilon(1e-2));

  // Formula reproduction with independent arithmetic.
  double lhs = elementary_charge * p.c_g_a / (hbar * (p.c_j + p.c_g_a)) *
               std::sqrt(hbar * p.omega_a / (p.l_a * p.c_a));
  CHECK(c.g_a == doctest::Approx(lhs).epsilon(1e-13));

  // Exact scaling laws of the closed forms.
  TwoModeParams q = p;
  q.l_a = 2.0 * p.l_a;
  CHECK(two_mode_couplings(q).g_a == doctest::Approx(c.g_a / std::sqrt(2.0)).epsilon(1e-12));
  q = p;
  q.omega_a = 4.0 * p.omega_a;
  CHECK(two_mode_couplings(q).g_a == doctest::Approx(2.0 * c.g_a).epsilon(1e-12));
  CHECK(two_mode_couplings(q).g_ab == doctest::Approx(2.0 * c.g_ab).epsilon(1e-12));
  q = p;
  q.c_a = 4.0 * p.c_a;
  CHECK(two_mode_couplings(q).g_a == doctest::Approx(0.5 * c.g_a).epsilon(1e-12));

  // Shrinking the gate capacitance kills both g_a and g_ab.
  q = p;
  q.c_g_a = 1.0e-22;
  Couplings tiny = two_mode_couplings(q);
  CHECK(tiny.g_a < 2e-6 * c.g_a);
  CHECK(tiny.g_ab < 2e-6 * c.g_ab);

  q = p;
  q.l_b = 0.0;
  CHECK_THROWS_AS(two_mode_couplings(q), Error);
}

TEST_CASE("two-mode Hamiltonian variants") {
  DeviceParams d = reference_device();
  FluxPulse p = reference_pulse();
  double t_out = p.t_off + 1.0e-9;  // pulse off, cos factor is exactly 1

  Couplings c;
  c.g_a = 2.0e8;
  c.g_b = 1.5e8;
  c.g_ab = 3.0e7;
  double omega_a = 4.0e10, omega_b = 3.0e10, b_amp = 0.7;

  SpaceLayout layout(1, 5);
  LadderOperators la = ladder_operators(5);
  MatrixXcd i2 = MatrixXcd::Identity(2, 2);
  MatrixXcd ia = MatrixXcd::Identity(5, 5);
  MatrixXcd xa = la.a_dagger.m + la.a.m;

  // reduced with <b> = 0 is the bare single-mode form.
  DenseOperator h_red0 = build_two_mode_hamiltonian(c, omega_a, omega_b, 0.0, d, p, t_out,
                                                    TwoModeVariant::reduced, layout);
  MatrixXcd bare = omega_a * kronecker(i2, la.number.m) + d.e_j * kronecker(sx(), ia) +
                   c.g_a * kronecker(sz(), xa);
  CHECK(rel_diff(h_red0.m, bare) < 1e-14);

  // classical_pump minus reduced isolates the residual cross drive.
  double t = 1.7e-11;
  DenseOperator h_cp = build_two_mode_hamiltonian(c, omega_a, omega_b, b_amp, d, p, t,
                                                  TwoModeVariant::classical_pump, layout);
  DenseOperator h_red = build_two_mode_hamiltonian(c, omega_a, omega_b, b_amp, d, p, t,
                                                   TwoModeVariant::reduced, layout);
  MatrixXcd cross = 2.0 * b_amp * c.g_ab * std::cos(omega_b * t) * kronecker(i2, xa);
  CHECK(rel_diff(h_cp.m - h_red.m, cross) < 1e-12);

  // sigma_z drive amplitude at t = 0 is 2 g_b <b> on top of the c-number shift.
  DenseOperator h0 = build_two_mode_hamiltonian(c, omega_a, omega_b, b_amp, d, p, 0.0,
                                                TwoModeVariant::reduced, layout);
  double shift = omega_b * b_amp * b_amp;
  CHECK(h0.m(0, 0).real() - shift == doctest::Approx(2.0 * c.g_b * b_amp).epsilon(1e-12));

  // full variant: quantized b register, flattened a-major.
  SpaceLayout big(1, 4 * 3);
  DenseOperator h_full = build_two_mode_hamiltonian(c, omega_a, omega_b, b_amp, d, p, t_out,
                                                    TwoModeVariant::full, big, 3);
  CHECK(h_full.m.rows() == 24);
  CHECK(h_full.hermitian);
  // Diagonal at (bits=0, n_a=0, n_b=2).
  CHECK(h_full.m(2, 2).real() == doctest::Approx(2.0 * omega_b).epsilon(1e-12));
  // Cross coupling (0,0) -> (1,1): g_ab.
  CHECK(h_full.m(4, 0).real() == doctest::Approx(c.g_ab).epsilon(1e-12));

  // The physical-parameter entry point agrees with the coupling overload.
  TwoModeParams tp;
  tp.omega_a = omega_a;
  tp.omega_b = omega_b;
  tp.c_j = 1.0e-15;
  tp.c_g_a = 1.0e-16;
  tp.c_g_b = 1.0e-16;
  tp.l_a = 0.02;
  tp.l_b = 0.02;
  tp.c_a = 1.6e-10;
  tp.c_b = 1.6e-10;
  tp.b_amp = b_amp;
  Couplings derived = two_mode_couplings(tp);
  DenseOperator via_params =
      build_two_mode_hamiltonian(tp, d, p, 0.0, TwoModeVariant::reduced, layout);
  DenseOperator via_couplings = build_two_mode_hamiltonian(
      derived, omega_a, omega_b, b_amp, d, p, 0.0, TwoModeVariant::reduced, layout);
  CHECK(rel_diff(via_params.m, via_couplings.m) < 1e-15);

  CHECK_THROWS_AS(build_two_mode_hamiltonian(c, omega_a, omega_b, b_amp, d, p, 0.0,
                                             TwoModeVariant::full, big, 1),
                  Error);
  CHECK_THROWS_AS(build_two_mode_hamiltonian(c, omega_a, omega_b, b_amp, d, p, 0.0,
                                             TwoModeVariant::classical_pump, big, 3),
                  Error);
}

TEST_CASE("inductive energy helper") {
  double c_j = 1.0e-15, c_q = 1.0e-15, l = 1.0e-9;
  double expected = 2.0 * flux_quantum * flux_quantum / (pi * pi * l) / hbar;
  CHECK(inductive_energy(c_j, c_q, l) == doctest::Approx(expected).epsilon(1e-13));
  CHECK_THROWS_AS(inductive_energy(-1.0, c_q, l), Error);
}

TEST_CASE("n-qubit Hamiltonian: embeddings and the qubit-qubit term") {
  DeviceParams d = reference_device();
  FluxPulse p = reference_pulse();
  double t_out = p.t_off + 1.0e-9;

  NQubitParams np;
  np.e_j = {1.59e11, 1.2e11};
  np.pulses = {p, p};
  np.include_qq = false;

  SpaceLayout layout(2, 4);
  LadderOperators lad = ladder_operators(4);
  MatrixXcd i2 = MatrixXcd::Identity(2, 2);
  MatrixXcd i_f = MatrixXcd::Identity(4, 4);
  MatrixXcd xf = lad.a_dagger.m + lad.a.m;

  DenseOperator h = build_n_qubit_hamiltonian(np, d, t_out, layout);
  MatrixXcd expected = d.omega_c * kronecker(kronecker(i2, i2), lad.number.m) +
                       np.e_j[0] * kronecker(kronecker(sx(), i2), i_f) +
                       np.e_j[1] * kronecker(kronecker(i2, sx()), i_f) +
                       d.g * kronecker(kronecker(sz(), i2), xf) +
                       d.g * kronecker(kronecker(i2, sz()), xf);
  CHECK(rel_diff(h.m, expected) < 1e-14);
  CHECK(h.hermitian);

  // Switching the coupling term on adds -w sigma_y sigma_y with
  // w = 4 E_1 E_2 / E_L at unit cosine factors.
  NQubitParams nq = np;
  nq.include_qq = true;
  nq.e_l = 1.0e4 * 1.59e11;
  DenseOperator hq = build_n_qubit_hamiltonian(nq, d, t_out, layout);
  double w = 4.0 * np.e_j[0] * np.e_j[1] / nq.e_l;
  MatrixXcd sy(2, 2);
  sy << 0, complex<double>(0, -1), complex<double>(0, 1), 0;
  MatrixXcd qq = -w * kronecker(kronecker(sy, sy), i_f);
  CHECK(rel_diff(hq.m - h.m, qq) < 1e-12);

  // Published scale: E_L = 1e4 E_J^2 makes the term a < 4e-4 perturbation.
  NQubitParams ns = np;
  ns.e_j = {1.59e11, 1.59e11};
  SpaceLayout small(2, 3);
  DenseOperator h_off = build_n_qubit_hamiltonian(ns, d, t_out, small);
  ns.include_qq = true;
  ns.e_l = 1.0e4 * 1.59e11 * 1.59e11;
  DenseOperator h_on = build_n_qubit_hamiltonian(ns, d, t_out, small);
  Eigen::JacobiSVD<MatrixXcd> svd_diff(h_on.m - h_off.m);
  Eigen::JacobiSVD<MatrixXcd> svd_full(h_on.m);
  double ratio = svd_diff.singularValues()(0) / svd_full.singularValues()(0);
  CHECK(ratio < 4e-4);
  CHECK(ratio > 0.0);

  // N = 3 shape.
  NQubitParams n3;
  n3.e_j = {1.0e11, 1.0e11, 1.0e11};
  n3.pulses = {p, p, p};
  DenseOperator h3 = build_n_qubit_hamiltonian(n3, d, 0.0, SpaceLayout(3, 5));
  CHECK(h3.m.rows() == 40);

  CHECK_THROWS_AS(build_n_qubit_hamiltonian(np, d, 0.0, SpaceLayout(3, 4)), Error);
  NQubitParams bad = np;
  bad.pulses.pop_back();
  CHECK_THROWS_AS(build_n_qubit_hamiltonian(bad, d, 0.0, layout), Error);
}
