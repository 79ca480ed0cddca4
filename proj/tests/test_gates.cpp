#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "catline/gates.hpp"
#include "doctest.h"

using namespace catline;

namespace {

const double a2 = 0.4;
const complexd alpha = std::sqrt(a2);
const int fd = 16;
const double wp = std::sqrt((1.0 + std::exp(-2.0 * a2)) / 2.0);
const double wm = std::sqrt((1.0 - std::exp(-2.0 * a2)) / 2.0);

GateEngine effective_engine(int fock_dim = fd) {
  GateEngine e;
  e.fock_dim = fock_dim;
  return e;
}

// Calibrated operating point for the exact engine (coupling solved so the
// conditional phase lands on pi over one half-period window).
GateEngine exact_engine() {
  GateEngine e;
  e.kind = EngineKind::exact;
  e.params.g = 7.7858227039e9;
  e.pulse.mode = PulseMode::hermitized;
  e.pulse.phi = 6.8108420090e-06;
  e.opts.rel_tol = 1e-7;
  e.opts.abs_tol = 1e-9;
  e.fock_dim = 12;
  return e;
}

double overlap2(const StateVector& a, const StateVector& b) {
  return fidelity(a, b) / (a.amps.squaredNorm() * b.amps.squaredNorm());
}

}  // namespace

TEST_CASE("coherent superposition bookkeeping") {
  CoherentSuperposition sup;
  sup.n_qubits = 1;
  sup.terms = {{0u, alpha, 0.25}, {0u, alpha, complexd(0.0, 0.5)}, {1u, -alpha, 1e-14}};
  sup.merge();
  REQUIRE(sup.terms.size() == 1);
  CHECK(sup.terms[0].weight == complexd(0.25, 0.5));
  CHECK(sup.norm() == doctest::Approx(std::abs(complexd(0.25, 0.5))).epsilon(1e-12));

  CoherentSuperposition cat;
  cat.n_qubits = 0;
  cat.terms = {{0u, alpha, 0.5}, {0u, -alpha, 0.5}};
  // interference enters through the coherent overlap
  const double n2 = 0.5 * (1.0 + std::exp(-2.0 * a2));
  CHECK(cat.norm() == doctest::Approx(std::sqrt(n2)).epsilon(1e-12));
  CHECK(std::abs(fidelity(cat.to_state(fd), cat_state(alpha, Parity::even, fd)) - n2) < 1e-12);

  CoherentSuperposition bad = sup;
  bad.terms[0].bits = 2u;  // outside one qubit's patterns
  CHECK_THROWS_AS(bad.to_state(fd), Error);
}

TEST_CASE("recognition inverts to_state and rejects generic vectors") {
  CoherentSuperposition sup;
  sup.n_qubits = 1;
  sup.terms = {{0u, alpha, 0.3}, {0u, -alpha, complexd(0.1, 0.4)}, {1u, complexd(0.2, -0.7), 0.5}};
  StateVector st = sup.to_state(fd);
  CoherentSuperposition rec = recognize_coherent(st);
  CHECK((st.amps - rec.to_state(fd).amps).norm() < 1e-9);

  std::mt19937_64 rng(3);
  VectorXcd v(2 * fd);
  for (long i = 0; i < v.size(); ++i)
    v[i] = complexd(double(rng() >> 11) * 0x1.0p-53 - 0.5, double(rng() >> 11) * 0x1.0p-53 - 0.5);
  v /= v.norm();
  CHECK_THROWS_WITH_AS(recognize_coherent(StateVector(SpaceLayout(1, fd), v)),
                       doctest::Contains("coherent"), Error);
}

TEST_CASE("conditional pulse: cat splitting, inverse, spectators") {
  const EffectiveMap ideal = EffectiveMap::ideal(62.5e-9);
  const GateEngine eff = effective_engine();

  StateVector st = tensor_compose({qubit_basis({0}), coherent_state(alpha, fd)});
  StateVector once = conditional_pulse(st, 0, ideal, eff);
  // |0>|alpha> -> w+|0>|even> + w-|1>|odd>
  StateVector even = cat_state(alpha, Parity::even, fd);
  StateVector odd = cat_state(alpha, Parity::odd, fd);
  complexd a_even = even.amps.dot(once.amps.segment(0, fd));
  complexd a_odd = odd.amps.dot(once.amps.segment(fd, fd));
  CHECK(std::abs(a_even - complexd(wp)) < 1e-12);
  CHECK(std::abs(a_odd - complexd(wm)) < 1e-12);

  StateVector twice = conditional_pulse(once, 0, ideal, eff);
  CHECK(std::abs(fidelity(twice, st) - 1.0) < 1e-12);

  StateVector two = tensor_compose({qubit_basis({0, 0}), coherent_state(alpha, fd)});
  StateVector p1 = conditional_pulse(two, 1, ideal, eff);
  CHECK(p1.amps.segment(2 * fd, 2 * fd).norm() < 1e-12);  // qubit 0 untouched

  CHECK_THROWS_AS(conditional_pulse(st, 1, ideal, eff), Error);
  GateEngine uncalibrated;
  uncalibrated.kind = EngineKind::exact;
  CHECK_THROWS_AS(conditional_pulse(st, 0, ideal, uncalibrated), Error);
}

TEST_CASE("field qubit encoding collapses onto the parity cats") {
  const EffectiveMap ideal = EffectiveMap::ideal(62.5e-9);
  const GateEngine eff = effective_engine();

  ProtocolResult r = encode_field_qubit(alpha, ideal, OutcomePolicy::both_branches, eff);
  REQUIRE(r.branch_log.size() == 2);
  CHECK(r.branch_log[0].probability == doctest::Approx(wp * wp).epsilon(1e-12));
  CHECK(r.branch_log[0].probability + r.branch_log[1].probability ==
        doctest::Approx(1.0).epsilon(1e-12));
  StateVector field0(SpaceLayout(0, fd), r.branch_log[0].state.amps.segment(0, fd));
  StateVector field1(SpaceLayout(0, fd), r.branch_log[1].state.amps.segment(fd, fd));
  CHECK(std::abs(fidelity(field0, cat_state(alpha, Parity::even, fd)) - 1.0) < 1e-12);
  CHECK(std::abs(fidelity(field1, cat_state(alpha, Parity::odd, fd)) - 1.0) < 1e-12);

  // one seed, one outcome
  ProtocolResult s1 = encode_field_qubit(alpha, ideal, OutcomePolicy::sample, eff, 7);
  ProtocolResult s2 = encode_field_qubit(alpha, ideal, OutcomePolicy::sample, eff, 7);
  CHECK((s1.final_state.amps - s2.final_state.amps).norm() == 0.0);

  ProtocolResult rz = encode_field_qubit(0.0, ideal, OutcomePolicy::both_branches, eff);
  CHECK(rz.branch_log[1].impossible);
  CHECK(rz.branch_log[0].probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("field hadamard weights and readout correlations") {
  const EffectiveMap ideal = EffectiveMap::ideal(62.5e-9);
  GateEngine e2 = effective_engine(24);
  const complexd al = std::sqrt(2.0);

  StateVector h0 = hadamard_field(0, al, ideal, e2);
  Measurement m0 = measure_qubit(h0, 0, 0);
  CHECK(m0.probability == doctest::Approx((1.0 + std::exp(-4.0)) / 2.0).epsilon(1e-10));

  StateVector h1 = hadamard_field(1, al, ideal, e2);
  Measurement m1 = measure_qubit(h1, 0, 0);
  CHECK(m1.probability == doctest::Approx((1.0 - std::exp(-4.0)) / 2.0).epsilon(1e-10));
  StateVector f0(SpaceLayout(0, 24), m1.collapsed->amps.segment(0, 24));
  CHECK(std::abs(fidelity(f0, cat_state(al, Parity::odd, 24)) - 1.0) < 1e-10);
}

TEST_CASE("field-controlled NOT on the atom") {
  const EffectiveMap ideal = EffectiveMap::ideal(62.5e-9);
  const GateEngine eff = effective_engine();

  for (int atom = 0; atom < 2; ++atom)
    for (int fld = 0; fld < 2; ++fld) {
      StateVector cat = cat_state(alpha, fld ? Parity::odd : Parity::even, fd);
      CnotReadout r = cnot_field_control(atom, cat, ideal, eff);
      CHECK(r.atom_out == (atom ^ fld));
      CHECK(r.field_out == fld);
      CHECK(r.certainty > 1.0 - 1e-12);
    }

  // a number state drives by its parity
  VectorXcd f2 = VectorXcd::Zero(fd);
  f2[2] = 1.0;
  CnotReadout r2 = cnot_field_control(1, StateVector(SpaceLayout(0, fd), f2), ideal, eff);
  CHECK(r2.atom_out == 1);
  CHECK(r2.field_out == 0);

  CHECK_THROWS_WITH_AS(cnot_field_control(0, coherent_state(alpha, fd), ideal, eff),
                       doctest::Contains("parity"), Error);
}

TEST_CASE("bus schedule construction and validation") {
  FluxPulse tmpl;
  const double d = tmpl.t_off - tmpl.t_on;
  PulseSchedule sched = cnot_schedule(tmpl, 10e-9);
  REQUIRE(sched.entries.size() == 3);
  CHECK(sched.entries[0].qubit_index == 0);
  CHECK(sched.entries[0].measurement == MeasureAction::sample);
  CHECK(sched.entries[1].qubit_index == 1);
  CHECK(sched.entries[1].measurement == MeasureAction::none);
  CHECK(sched.entries[2].qubit_index == 0);
  CHECK(sched.entries[1].pulse.t_on ==
        doctest::Approx(sched.entries[0].pulse.t_off + 10e-9).epsilon(1e-12));
  CHECK(sched.entries[2].pulse.t_on >= sched.entries[1].pulse.t_off - 1e-12 * d);
  for (const ScheduleEntry& e : sched.entries)
    CHECK(e.pulse.t_off - e.pulse.t_on == doctest::Approx(d).epsilon(1e-12));
  CHECK_NOTHROW(sched.validate(2));

  PulseSchedule bad = sched;
  bad.entries[1].qubit_index = 5;
  CHECK_THROWS_AS(bad.validate(2), Error);
  bad = sched;
  bad.entries[2].pulse.t_on = bad.entries[0].pulse.t_on;  // overlaps entry 0 on qubit 0
  CHECK_THROWS_AS(bad.validate(2), Error);
  bad = sched;
  bad.delta_t_m = -1.0;
  CHECK_THROWS_AS(bad.validate(2), Error);
  PulseSchedule empty;
  CHECK_THROWS_AS(empty.validate(2), Error);
}

TEST_CASE("two-qubit gate truth table through the bus") {
  const GateEngine eff = effective_engine();
  FluxPulse tmpl;
  PulseSchedule sched = cnot_schedule(tmpl, 10e-9);

  for (int q1 = 0; q1 < 2; ++q1)
    for (int q2 = 0; q2 < 2; ++q2) {
      ProtocolResult r = cnot_two_qubits(q1, q2, alpha, sched, eff);
      Measurement ma = measure_qubit(r.final_state, 0, q1 ^ q2);
      Measurement mb = measure_qubit(r.final_state, 1, q2);
      CHECK(ma.probability > 1.0 - 1e-10);
      CHECK(mb.probability > 1.0 - 1e-10);
      CHECK(r.branch_log[0].probability + r.branch_log[1].probability ==
            doctest::Approx(1.0).epsilon(1e-12));
    }

  PulseSchedule bad = sched;
  bad.entries[1].measurement = MeasureAction::sample;
  CHECK_THROWS_AS(cnot_two_qubits(0, 0, alpha, bad, eff), Error);
  PulseSchedule bad2 = sched;
  bad2.entries[0].measurement = MeasureAction::project_0;
  CHECK_THROWS_AS(cnot_two_qubits(0, 1, alpha, bad2, eff), Error);
}

TEST_CASE("ghz chain: anchors, weights, and target fidelity") {
  const EffectiveMap ideal = EffectiveMap::ideal(62.5e-9);
  const GateEngine eff = effective_engine();

  for (int n = 1; n <= 3; ++n) {
    std::vector<EffectiveMap> maps(n, ideal);
    ProtocolResult r = ghz_generate(n, alpha, maps, false, eff);
    StateVector even = cat_state(alpha, Parity::even, fd);
    StateVector odd = cat_state(alpha, Parity::odd, fd);
    complexd a_even = even.amps.dot(r.final_state.amps.segment(0, fd));
    complexd a_odd = odd.amps.dot(r.final_state.amps.segment(((1L << n) - 1) * long(fd), fd));
    const double s = (n % 2 == 0) ? -1.0 : 1.0;
    CHECK(std::abs(a_even - complexd(wp)) < 1e-10);
    CHECK(std::abs(a_odd - complexd(s * wm)) < 1e-10);
    CHECK(r.branch_log[0].probability + r.branch_log[1].probability ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.ideal_fidelity == doctest::Approx((wp + wm) * (wp + wm) / 2.0).epsilon(1e-10));
  }

  // large field amplitude: the weights converge and fidelity approaches 1
  std::vector<EffectiveMap> maps(3, ideal);
  GateEngine big = effective_engine(64);
  ProtocolResult r10 = ghz_generate(3, std::sqrt(10.0), maps, false, big);
  CHECK(r10.ideal_fidelity > 1.0 - 1e-8);

  // n = 1 reduces to the encoding pulse before readout
  ProtocolResult g1 = ghz_generate(1, alpha, {ideal}, false, eff);
  ProtocolResult enc = encode_field_qubit(alpha, ideal, OutcomePolicy::both_branches, eff);
  CHECK((g1.final_state.amps - enc.pre_measurement.amps).norm() == 0.0);

  CHECK_THROWS_AS(ghz_generate(0, alpha, {}, false, eff), Error);
  CHECK_THROWS_AS(ghz_generate(2, alpha, {ideal}, false, eff), Error);  // one map short
  GhzOptions qq;
  qq.include_qq = true;
  qq.e_l = 1e20;
  std::vector<EffectiveMap> maps2(2, ideal);
  CHECK_THROWS_AS(ghz_generate(2, alpha, maps2, true, eff, qq), Error);  // needs exact engine
}

TEST_CASE("exact engine reproduces the closed-form conditional pulse") {
  const GateEngine ex = exact_engine();
  const EffectiveMap map =
      make_effective_map(ex.pulse, ex.params, ex.opts, ex.pulse.t_off - ex.pulse.t_on);
  // the calibrated window should sit at the pi point
  CHECK(std::abs(map.theta_minus_T.imag() - M_PI) < 1e-6);

  StateVector st = tensor_compose({qubit_basis({0}), coherent_state(alpha, 12)});
  StateVector exact = conditional_pulse(st, 0, map, ex);
  StateVector pred = conditional_pulse(st, 0, map, effective_engine(12));
  CHECK(overlap2(exact, pred) > 0.999);

  // an idle second qubit factors out (up to integrator step-size noise)
  StateVector two = tensor_compose({qubit_basis({0, 0}), coherent_state(alpha, 12)});
  StateVector p1 = conditional_pulse(two, 1, map, ex);
  StateVector single = conditional_pulse(st, 0, map, ex);
  StateVector top(SpaceLayout(1, 12), p1.amps.segment(0, 2 * 12));
  CHECK(overlap2(top, single) > 1.0 - 1e-8);
  CHECK(p1.amps.segment(2 * 12, 2 * 12).norm() < 1e-8);
}

TEST_CASE("exact ghz tracks the effective chain and ignores a stiff pair term") {
  const GateEngine ex = exact_engine();
  const EffectiveMap map =
      make_effective_map(ex.pulse, ex.params, ex.opts, ex.pulse.t_off - ex.pulse.t_on);
  std::vector<EffectiveMap> maps(2, map);

  ProtocolResult ge = ghz_generate(2, alpha, maps, false, ex);
  ProtocolResult gf = ghz_generate(2, alpha, maps, false, effective_engine(12));
  CHECK(overlap2(ge.final_state, gf.final_state) > 0.999);

  ProtocolResult gs = ghz_generate(2, alpha, maps, true, ex);
  GhzOptions qq;
  qq.include_qq = true;
  qq.e_l = 1e4 * ex.params.e_j * ex.params.e_j;
  ProtocolResult gq = ghz_generate(2, alpha, maps, true, ex, qq);
  CHECK((gs.final_state.amps - gq.final_state.amps).norm() < 1e-6);
}

TEST_CASE("pump rotation: static oracle, free evolution, hadamard preset") {
  DeviceParams params;
  Couplings cpl;
  cpl.g_a = 1e6;
  cpl.g_b = 1e8;
  StateVector q0 = qubit_basis({0});

  // <b> = 0 leaves only the sigma_x term
  const double t_free = 3.7e-11;
  RotateResult rf = rotate_qubit_classical_pump(q0, 0, params, cpl, 0.0, 0.0, t_free);
  const double th = params.e_j * t_free;
  VectorXcd want(2);
  want << std::cos(th), complexd(0.0, -std::sin(th));
  CHECK((rf.state.amps - want).norm() < 1e-8);

  // omega_b = 0 keeps the Hamiltonian constant: closed-form 2x2 exponential
  const double amp = 10.0;
  const double lam = cpl.g_b * amp;
  RotateResult rs = rotate_qubit_classical_pump(q0, 0, params, cpl, amp, 0.0, t_free);
  const double big = std::sqrt(4.0 * lam * lam + params.e_j * params.e_j);
  const double c = std::cos(big * t_free), s = std::sin(big * t_free) / big;
  VectorXcd want2(2);
  want2 << complexd(c, -2.0 * lam * s), complexd(0.0, -params.e_j * s);
  CHECK((rs.state.amps - want2).norm() < 1e-7);

  RotateResult rh =
      rotate_qubit_classical_pump(q0, 0, params, cpl, 1.0, 0.0, 0.0, RotateGate::hadamard);
  CHECK(rh.drive.lambda == doctest::Approx(9.9932347828e7).epsilon(1e-6));
  CHECK(rh.drive.omega_b == doctest::Approx(3.1780004103e11).epsilon(1e-6));
  CHECK(rh.drive.duration == doctest::Approx(1.1111232495e-8).epsilon(1e-6));
  VectorXcd plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(std::norm(plus.dot(rh.state.amps)) > 1.0 - 1e-7);
  CHECK(!rh.regime_warning);

  // hadamard is its own inverse up to the tracked free phase
  RotateResult rh2 = rotate_qubit_classical_pump(rh.state, 0, params, cpl, 1.0, rh.drive.omega_b,
                                                 rh.drive.duration);
  CHECK(fidelity(rh2.state, q0) > 1.0 - 1e-6);

  Couplings strong = cpl;
  strong.g_a = 2e7;
  RotateResult rw =
      rotate_qubit_classical_pump(q0, 0, params, strong, 1.0, 0.0, 0.0, RotateGate::hadamard);
  CHECK(rw.regime_warning);

  CHECK_THROWS_AS(rotate_qubit_classical_pump(q0, 0, params, cpl, 1.0, 0.0, -1.0), Error);
}
