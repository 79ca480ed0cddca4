#include "catline/gates.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "phase_model.hpp"

namespace catline {

namespace {

// Charge basis to the |+->/|-> frame on one qubit; the frame diagonalizes the
// tunneling term. Row 0 picks the plus branch, matching block 0 of the
// single-qubit drive kernel. Real orthogonal, so the inverse is the transpose.
Eigen::Matrix2cd charge_to_branch() {
  Eigen::Matrix2cd r;
  r << 1.0, -1.0, 1.0, 1.0;
  return r / std::sqrt(2.0);
}

Eigen::Matrix2cd pauli_x_gate() {
  Eigen::Matrix2cd x;
  x << 0.0, 1.0, 1.0, 0.0;
  return x;
}

long qubit_stride(const SpaceLayout& l, int q) { return l.dim() >> (q + 1); }

void check_qubit_index(const SpaceLayout& l, int q) {
  if (q < 0 || q >= l.n_qubits)
    throw Error(ErrorCode::invalid_argument, "qubit index out of range");
}

void apply_qubit_2x2(StateVector& state, int q, const Eigen::Matrix2cd& u) {
  check_qubit_index(state.layout, q);
  const long stride = qubit_stride(state.layout, q);
  for (long i0 = 0; i0 < state.layout.dim(); ++i0) {
    if ((i0 / stride) & 1) continue;
    const long i1 = i0 + stride;
    const complexd a0 = state.amps[i0];
    const complexd a1 = state.amps[i1];
    state.amps[i0] = u(0, 0) * a0 + u(0, 1) * a1;
    state.amps[i1] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

// Same interaction-picture drive as the single-qubit kernel, acting on qubit q
// of an n-qubit register; the other qubits spectate.
HamiltonianApply pulsed_on_qubit(const DeviceParams& params, const FluxPulse& pulse,
                                 const PropagatorOptions& opts, const SpaceLayout& layout, int q) {
  auto pm = std::make_shared<detail::PhaseModel>(params, pulse, opts.expansion);
  const double g = params.g;
  const double w = params.omega_c;
  const double t_on = pulse.t_on;
  const bool literal = pulse.mode == PulseMode::literal_complex;
  const long dim = layout.dim();
  const long f = layout.fock_dim;
  const long stride = qubit_stride(layout, q);

  return [pm, g, w, t_on, literal, dim, f, stride](double t, const VectorXcd& y, VectorXcd& out) {
    if (y.size() != dim || out.size() != dim)
      throw Error(ErrorCode::layout_mismatch, "state does not match the pulse layout");
    const double tau = t - t_on;
    const complexd lam = pm->lambda(tau);
    if (literal && std::abs(2.0 * lam.imag()) > 40.0)
      throw Error(ErrorCode::integration_failure,
                  "literal drive envelope exceeds the integrable range; use the hermitized mode");
    const complexd i1(0.0, 1.0);
    const complexd up = std::exp(2.0 * i1 * (w * tau - lam));
    const complexd dn = std::exp(-2.0 * i1 * (w * tau - lam));
    const complexd er = std::exp(i1 * w * tau);
    const complexd el = std::conj(er);

    for (long i0 = 0; i0 < dim; ++i0) {
      if ((i0 / stride) & 1) continue;
      const long i1x = i0 + stride;
      const long nn = i0 % f;
      complexd x0(0.0, 0.0), x1(0.0, 0.0);
      if (nn > 0) {
        const double r = std::sqrt(double(nn));
        x0 += er * r * y[i0 - 1];
        x1 += er * r * y[i1x - 1];
      }
      if (nn + 1 < f) {
        const double r = std::sqrt(double(nn + 1));
        x0 += el * r * y[i0 + 1];
        x1 += el * r * y[i1x + 1];
      }
      out[i0] = g * up * x1;
      out[i1x] = g * dn * x0;
    }
  };
}

// All qubits driven by one shared pulse, optionally with the next-neighbor
// pair term. In this frame sigma_y sigma_y keeps its cross terms bare while
// the double raising and lowering parts ride the squared drive phase.
HamiltonianApply pulsed_all_qubits(const DeviceParams& params, const FluxPulse& pulse,
                                   const PropagatorOptions& opts, const SpaceLayout& layout,
                                   bool include_qq, double e_l) {
  auto pm = std::make_shared<detail::PhaseModel>(params, pulse, opts.expansion);
  const double g = params.g;
  const double w = params.omega_c;
  const double ej = params.e_j;
  const double t_on = pulse.t_on;
  const bool literal = pulse.mode == PulseMode::literal_complex;
  const int nq = layout.n_qubits;
  const long dim = layout.dim();
  const long f = layout.fock_dim;
  const FluxPulse pl = pulse;

  return [pm, g, w, ej, t_on, literal, nq, dim, f, pl, include_qq,
          e_l](double t, const VectorXcd& y, VectorXcd& out) {
    if (y.size() != dim || out.size() != dim)
      throw Error(ErrorCode::layout_mismatch, "state does not match the pulse layout");
    const double tau = t - t_on;
    const complexd lam = pm->lambda(tau);
    if (literal && std::abs(2.0 * lam.imag()) > 40.0)
      throw Error(ErrorCode::integration_failure,
                  "literal drive envelope exceeds the integrable range; use the hermitized mode");
    const complexd i1(0.0, 1.0);
    const complexd up = std::exp(2.0 * i1 * (w * tau - lam));
    const complexd dn = std::exp(-2.0 * i1 * (w * tau - lam));
    const complexd er = std::exp(i1 * w * tau);
    const complexd el = std::conj(er);

    out.setZero();
    for (int q = 0; q < nq; ++q) {
      const long stride = dim >> (q + 1);
      for (long i0 = 0; i0 < dim; ++i0) {
        if ((i0 / stride) & 1) continue;
        const long i1x = i0 + stride;
        const long nn = i0 % f;
        complexd x0(0.0, 0.0), x1(0.0, 0.0);
        if (nn > 0) {
          const double r = std::sqrt(double(nn));
          x0 += er * r * y[i0 - 1];
          x1 += er * r * y[i1x - 1];
        }
        if (nn + 1 < f) {
          const double r = std::sqrt(double(nn + 1));
          x0 += el * r * y[i0 + 1];
          x1 += el * r * y[i1x + 1];
        }
        out[i0] += g * up * x1;
        out[i1x] += g * dn * x0;
      }
    }

    if (include_qq && nq > 1) {
      const complexd cosf = std::cos(pi * flux_at(pl, t));
      const complexd wqq = 4.0 * ej * ej * cosf * cosf / e_l;
      const complexd up2 = up * up;
      const complexd dn2 = dn * dn;
      for (int j = 0; j + 1 < nq; ++j) {
        const long sj = dim >> (j + 1);
        const long sk = dim >> (j + 2);
        for (long i = 0; i < dim; ++i) {
          if (((i / sj) & 1) || ((i / sk) & 1)) continue;
          const long b00 = i;
          const long b01 = i + sk;
          const long b10 = i + sj;
          const long b11 = i + sj + sk;
          out[b00] += wqq * up2 * y[b11];
          out[b11] += wqq * dn2 * y[b00];
          out[b01] -= wqq * y[b10];
          out[b10] -= wqq * y[b01];
        }
      }
    }
  };
}

// Divides out the window's scalar branch exponents e^{c_pm} on qubit q (bit 0
// holds the plus branch after the frame rotation), then renormalizes.
void dress_qubit(StateVector& state, int q, const EffectiveMap& map) {
  const complexd dp = std::exp(-map.c_plus_T);
  const complexd dm = std::exp(-map.c_minus_T);
  const long stride = qubit_stride(state.layout, q);
  for (long i = 0; i < state.layout.dim(); ++i)
    state.amps[i] *= ((i / stride) & 1) ? dm : dp;
  const double n = state.amps.norm();
  if (n > 0.0) state.amps /= n;
}

void check_exact_engine(const GateEngine& engine) {
  engine.params.validate();
  engine.pulse.validate();
  engine.opts.validate();
  if (!(engine.params.g > 0.0))
    throw Error(ErrorCode::invalid_argument, "the exact engine needs params.g > 0; calibrate first");
}

// One pulse on one qubit, charge basis in and out.
StateVector exact_pulse_comp(const StateVector& in, int q, const FluxPulse& pulse,
                             const GateEngine& engine) {
  check_exact_engine(engine);
  pulse.validate();
  check_qubit_index(in.layout, q);
  if (in.layout.fock_dim < 2)
    throw Error(ErrorCode::invalid_argument, "the pulse needs a field register");

  StateVector st = in;
  const Eigen::Matrix2cd r = charge_to_branch();
  apply_qubit_2x2(st, q, r);
  const HamiltonianApply apply = pulsed_on_qubit(engine.params, pulse, engine.opts, st.layout, q);
  st = evolve_exact_full(apply, st, pulse.t_on, pulse.t_off, engine.opts, true).state;
  if (engine.dress_branch_phases) {
    const EffectiveMap map =
        make_effective_map(pulse, engine.params, engine.opts, pulse.t_off - pulse.t_on);
    dress_qubit(st, q, map);
  }
  apply_qubit_2x2(st, q, r.transpose());
  return st;
}

// Least-squares fit of one field slice onto coherent columns; the truncated
// columns are renormalized, so the recovered weights absorb that factor.
bool fit_slice(const VectorXcd& fvec, unsigned bits, int max_components, double tol,
               std::vector<CoherentTerm>& out) {
  const long f = fvec.size();
  const double fn = fvec.norm();
  const double fn2 = fn * fn;

  double nbar = 0.0;
  for (long n = 0; n < f; ++n) nbar += double(n) * std::norm(fvec[n]);
  nbar /= fn2;
  const double rho = std::sqrt(std::max(nbar, 0.25));

  // Scaled moments s_n = f_n sqrt(n!) / rho^n = sum_k w_k e^{-|b_k|^2/2} (b_k/rho)^n.
  const long moments = std::min<long>(f, 24);
  VectorXcd s(moments);
  double scale = 1.0;
  s[0] = fvec[0];
  for (long n = 1; n < moments; ++n) {
    scale *= std::sqrt(double(n)) / rho;
    s[n] = fvec[n] * scale;
  }

  for (int K = 1; K <= max_components; ++K) {
    if (moments - K < K + 1) break;
    MatrixXcd h(moments - K, K + 1);
    for (long i = 0; i + K < moments; ++i)
      for (int j = 0; j <= K; ++j) h(i, j) = s[i + j];
    if (!h.allFinite()) break;

    Eigen::JacobiSVD<MatrixXcd> svd(h, Eigen::ComputeFullV);
    const VectorXcd p = svd.matrixV().col(K);

    int deg = K;
    const double pmax = p.cwiseAbs().maxCoeff();
    while (deg > 0 && std::abs(p[deg]) < 1e-12 * pmax) --deg;
    if (deg == 0) continue;

    MatrixXcd comp = MatrixXcd::Zero(deg, deg);
    for (int i = 0; i + 1 < deg; ++i) comp(i + 1, i) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[i] / p[deg];
    Eigen::ComplexEigenSolver<MatrixXcd> es(comp);
    if (es.info() != Eigen::Success) continue;

    std::vector<complexd> betas;
    for (int i = 0; i < deg; ++i) {
      const complexd beta = rho * es.eigenvalues()[i];
      try {
        coherent_state(beta, int(f));
      } catch (const Error&) {
        continue;  // root outside the representable range, not a candidate
      }
      bool dup = false;
      for (const complexd& b : betas)
        if (std::abs(beta - b) < 1e-7 * (1.0 + std::abs(b))) dup = true;
      if (!dup) betas.push_back(beta);
    }
    if (betas.empty()) continue;

    MatrixXcd c(f, long(betas.size()));
    for (size_t j = 0; j < betas.size(); ++j) c.col(long(j)) = coherent_state(betas[j], int(f)).amps;
    const VectorXcd wfit = c.colPivHouseholderQr().solve(fvec);
    const double resid = (c * wfit - fvec).norm();
    if (resid <= tol * fn) {
      for (size_t j = 0; j < betas.size(); ++j)
        if (std::abs(wfit[long(j)]) > tol * fn) out.push_back({bits, betas[j], wfit[long(j)]});
      return true;
    }
  }
  return false;
}

double parity_mass(const StateVector& field, int parity_bit) {
  double m = 0.0;
  for (long n = 0; n < field.amps.size(); ++n)
    if ((n & 1) == parity_bit) m += std::norm(field.amps[n]);
  return m;
}

StateVector fresh_register(int n_qubits, complexd alpha, int fock_dim) {
  return tensor_compose(
      {qubit_basis(std::vector<int>(n_qubits, 0)), coherent_state(alpha, fock_dim)});
}

}  // namespace

double CoherentSuperposition::norm() const {
  double total = 0.0;
  for (size_t k = 0; k < terms.size(); ++k)
    for (size_t l = 0; l < terms.size(); ++l) {
      if (terms[k].bits != terms[l].bits) continue;
      total += (std::conj(terms[k].weight) * terms[l].weight *
                coherent_overlap(terms[k].beta, terms[l].beta))
                   .real();
    }
  return std::sqrt(std::max(total, 0.0));
}

void CoherentSuperposition::merge(double tol) {
  std::vector<CoherentTerm> combined;
  for (const CoherentTerm& t : terms) {
    bool found = false;
    for (CoherentTerm& c : combined) {
      if (c.bits == t.bits && std::abs(c.beta - t.beta) <= tol * (1.0 + std::abs(c.beta))) {
        c.weight += t.weight;
        found = true;
        break;
      }
    }
    if (!found) combined.push_back(t);
  }
  double scale = 0.0;
  for (const CoherentTerm& c : combined) scale += std::abs(c.weight);
  std::vector<CoherentTerm> kept;
  for (const CoherentTerm& c : combined)
    if (std::abs(c.weight) > tol * scale) kept.push_back(c);
  terms = std::move(kept);
}

StateVector CoherentSuperposition::to_state(int fock_dim) const {
  if (n_qubits < 0 || n_qubits > 24)
    throw Error(ErrorCode::invalid_dimension, "bad qubit count");
  if (terms.empty()) throw Error(ErrorCode::invalid_argument, "empty superposition");
  SpaceLayout l(n_qubits, fock_dim);
  VectorXcd v = VectorXcd::Zero(l.dim());
  for (const CoherentTerm& t : terms) {
    if (t.bits >= (1u << n_qubits))
      throw Error(ErrorCode::invalid_argument, "term bit pattern exceeds the register");
    v.segment(long(t.bits) * fock_dim, fock_dim) += t.weight * coherent_state(t.beta, fock_dim).amps;
  }
  return StateVector(l, std::move(v));
}

CoherentSuperposition recognize_coherent(const StateVector& state, int max_components, double tol) {
  if (state.layout.fock_dim < 2)
    throw Error(ErrorCode::invalid_argument, "recognition needs a field register");
  if (max_components < 1)
    throw Error(ErrorCode::invalid_argument, "need max_components >= 1");
  const double total = state.amps.norm();
  if (total < 1e-300) throw Error(ErrorCode::invalid_argument, "zero state");

  CoherentSuperposition sup;
  sup.n_qubits = state.layout.n_qubits;
  const long f = state.layout.fock_dim;
  for (long bits = 0; bits < (1L << state.layout.n_qubits); ++bits) {
    const VectorXcd fvec = state.amps.segment(bits * f, f);
    if (fvec.norm() <= tol * total) continue;  // below the fit's own resolution
    if (!fit_slice(fvec, unsigned(bits), max_components, tol, sup.terms))
      throw Error(ErrorCode::representation,
                  "qubit pattern " + std::to_string(bits) + " is not a superposition of at most " +
                      std::to_string(max_components) + " coherent states at this tolerance");
  }
  return sup;
}

CoherentSuperposition conditional_pulse(const CoherentSuperposition& sup, int qubit_index,
                                        const EffectiveMap& map) {
  if (qubit_index < 0 || qubit_index >= sup.n_qubits)
    throw Error(ErrorCode::invalid_argument, "qubit index out of range");
  const unsigned mask = 1u << (sup.n_qubits - 1 - qubit_index);
  CoherentSuperposition out;
  out.n_qubits = sup.n_qubits;
  out.terms.reserve(4 * sup.terms.size());
  for (const CoherentTerm& t : sup.terms) {
    // |b>|beta> = [(-1)^b |+> + |->] |beta> / sqrt2; each branch shifts its
    // own coherent label, then the branches are resolved back onto the
    // charge basis.
    const double sign = (t.bits & mask) ? -1.0 : 1.0;
    const complexd bp = effective_apply(map, AtomBranch::plus, t.beta);
    const complexd bm = effective_apply(map, AtomBranch::minus, t.beta);
    const complexd h = 0.5 * t.weight;
    out.terms.push_back({t.bits & ~mask, bp, sign * h});
    out.terms.push_back({t.bits & ~mask, bm, h});
    out.terms.push_back({t.bits | mask, bp, -sign * h});
    out.terms.push_back({t.bits | mask, bm, h});
  }
  out.merge();
  return out;
}

StateVector conditional_pulse(const StateVector& state, int qubit_index, const EffectiveMap& map,
                              const GateEngine& engine) {
  check_qubit_index(state.layout, qubit_index);
  if (state.layout.fock_dim < 2)
    throw Error(ErrorCode::invalid_argument, "the pulse needs a field register");
  if (engine.kind == EngineKind::exact)
    return exact_pulse_comp(state, qubit_index, engine.pulse, engine);
  CoherentSuperposition sup = recognize_coherent(state);
  sup = conditional_pulse(sup, qubit_index, map);
  return sup.to_state(state.layout.fock_dim);
}

void PulseSchedule::validate(int n_qubits) const {
  if (entries.empty()) throw Error(ErrorCode::schedule_validation, "schedule has no entries");
  if (delta_t_m < 0.0)
    throw Error(ErrorCode::schedule_validation, "readout window delta_t_m must be nonnegative");
  for (const ScheduleEntry& e : entries) {
    if (e.qubit_index < 0 || e.qubit_index >= n_qubits)
      throw Error(ErrorCode::schedule_validation,
                  "entry drives qubit " + std::to_string(e.qubit_index) + " outside the register");
    e.pulse.validate();
  }
  for (size_t i = 0; i < entries.size(); ++i)
    for (size_t j = i + 1; j < entries.size(); ++j) {
      if (entries[i].qubit_index != entries[j].qubit_index) continue;
      const double d = entries[i].pulse.t_off - entries[i].pulse.t_on;
      if (entries[j].pulse.t_on < entries[i].pulse.t_off - 1e-12 * d)
        throw Error(ErrorCode::schedule_validation,
                    "entries on qubit " + std::to_string(entries[i].qubit_index) +
                        " overlap or run backwards");
    }
}

PulseSchedule cnot_schedule(const FluxPulse& pulse_template, double delta_t_m) {
  pulse_template.validate();
  if (delta_t_m < 0.0)
    throw Error(ErrorCode::schedule_validation, "readout window delta_t_m must be nonnegative");
  const double d = pulse_template.t_off - pulse_template.t_on;
  PulseSchedule s;
  s.delta_t_m = delta_t_m;

  ScheduleEntry gen{0, pulse_template, MeasureAction::sample};
  ScheduleEntry copy{1, pulse_template, MeasureAction::none};
  copy.pulse.t_on = gen.pulse.t_off + delta_t_m;
  copy.pulse.t_off = copy.pulse.t_on + d;
  ScheduleEntry target{0, pulse_template, MeasureAction::none};
  target.pulse.t_on = copy.pulse.t_off;
  target.pulse.t_off = target.pulse.t_on + d;
  s.entries = {gen, copy, target};
  return s;
}

ProtocolResult encode_field_qubit(complexd alpha, const EffectiveMap& map, OutcomePolicy policy,
                                  const GateEngine& engine, unsigned long long seed) {
  ProtocolResult res;
  res.engine = engine.kind;
  const int fd = engine.fock_dim;

  if (engine.kind == EngineKind::effective) {
    CoherentSuperposition sup;
    sup.n_qubits = 1;
    sup.terms = {{0u, alpha, 1.0}};
    sup = conditional_pulse(sup, 0, map);
    res.pre_measurement = sup.to_state(fd);
  } else {
    res.pre_measurement = exact_pulse_comp(fresh_register(1, alpha, fd), 0, engine.pulse, engine);
  }

  const Measurement m0 = measure_qubit(res.pre_measurement, 0, 0);
  const Measurement m1 = measure_qubit(res.pre_measurement, 0, 1);
  const double total = m0.probability + m1.probability;
  BranchRecord b0{0, m0.probability / total, m0.impossible,
                  m0.collapsed ? *m0.collapsed : StateVector()};
  BranchRecord b1{1, m1.probability / total, m1.impossible,
                  m1.collapsed ? *m1.collapsed : StateVector()};

  if (policy == OutcomePolicy::both_branches) {
    res.final_state = b0.impossible ? b1.state : b0.state;
    res.branch_log = {b0, b1};
    return res;
  }

  std::mt19937_64 rng(seed);
  const double r = double(rng() >> 11) * 0x1.0p-53;
  const int pick = (r < b0.probability) ? 0 : 1;
  BranchRecord& hit = pick == 0 ? b0 : b1;
  BranchRecord& miss = pick == 0 ? b1 : b0;
  miss.state = StateVector();  // not taken, keep only its probability
  res.final_state = hit.state;
  res.branch_log = {b0, b1};
  return res;
}

StateVector hadamard_field(int atom_in, complexd alpha, const EffectiveMap& map,
                           const GateEngine& engine) {
  if (atom_in != 0 && atom_in != 1)
    throw Error(ErrorCode::invalid_argument, "atom_in must be 0 or 1");
  const int fd = engine.fock_dim;
  if (engine.kind == EngineKind::exact) {
    const StateVector psi0 =
        tensor_compose({qubit_basis({atom_in}), coherent_state(alpha, fd)});
    return exact_pulse_comp(psi0, 0, engine.pulse, engine);
  }
  CoherentSuperposition sup;
  sup.n_qubits = 1;
  sup.terms = {{atom_in ? 1u : 0u, alpha, 1.0}};
  sup = conditional_pulse(sup, 0, map);
  return sup.to_state(fd);
}

CnotReadout cnot_field_control(int atom_in, const StateVector& field_in, const EffectiveMap& map,
                               const GateEngine& engine) {
  if (atom_in != 0 && atom_in != 1)
    throw Error(ErrorCode::invalid_argument, "atom_in must be 0 or 1");
  if (field_in.layout.n_qubits != 0 || field_in.layout.fock_dim < 2)
    throw Error(ErrorCode::invalid_argument, "field_in must be a bare field register");

  const double even_m = parity_mass(field_in, 0);
  const double odd_m = parity_mass(field_in, 1);
  if (std::min(even_m, odd_m) > 1e-10 * (even_m + odd_m))
    throw Error(ErrorCode::invalid_argument,
                "field input is not a photon-number parity eigenstate; drive general fields "
                "with conditional_pulse");
  const int field_bit = odd_m > even_m ? 1 : 0;

  StateVector joint = tensor_compose({qubit_basis({atom_in}), field_in});
  if (engine.kind == EngineKind::exact) {
    joint = exact_pulse_comp(joint, 0, engine.pulse, engine);
  } else {
    // The map acts as e^{theta n} on each branch's field; for the ideal map
    // that is the parity flip on the minus branch.
    const Eigen::Matrix2cd r = charge_to_branch();
    apply_qubit_2x2(joint, 0, r);
    const long f = joint.layout.fock_dim;
    for (long n = 0; n < f; ++n) {
      joint.amps[n] *= std::exp(map.theta_plus_T * double(n));
      joint.amps[f + n] *= std::exp(map.theta_minus_T * double(n));
    }
    const double nrm = joint.amps.norm();
    if (nrm > 0.0) joint.amps /= nrm;
    apply_qubit_2x2(joint, 0, r.transpose());
  }

  const Measurement m0 = measure_qubit(joint, 0, 0);
  const Measurement m1 = measure_qubit(joint, 0, 1);
  CnotReadout out;
  out.field_out = field_bit;
  out.atom_out = m1.probability > m0.probability ? 1 : 0;
  out.certainty =
      (out.atom_out ? m1.probability : m0.probability) / (m0.probability + m1.probability);
  out.state = joint;
  return out;
}

ProtocolResult cnot_two_qubits(int q1_in, int q2_in, complexd alpha, const PulseSchedule& schedule,
                               const GateEngine& engine) {
  if ((q1_in != 0 && q1_in != 1) || (q2_in != 0 && q2_in != 1))
    throw Error(ErrorCode::invalid_argument, "qubit inputs must be 0 or 1");
  schedule.validate(2);
  if (schedule.entries.size() != 3)
    throw Error(ErrorCode::schedule_validation, "the bus sequence needs exactly three pulses");
  const ScheduleEntry& gen = schedule.entries[0];
  const ScheduleEntry& copy = schedule.entries[1];
  const ScheduleEntry& target = schedule.entries[2];
  if (target.qubit_index != gen.qubit_index || copy.qubit_index == gen.qubit_index)
    throw Error(ErrorCode::schedule_validation,
                "the sequence must pulse the generator, the other qubit, then the generator");
  if (gen.measurement == MeasureAction::none)
    throw Error(ErrorCode::schedule_validation, "the generator pulse must be measured");
  if (copy.measurement != MeasureAction::none || target.measurement != MeasureAction::none)
    throw Error(ErrorCode::schedule_validation, "only the generator pulse is measured");
  if (gen.measurement == MeasureAction::project_0 && q2_in != 0)
    throw Error(ErrorCode::invalid_argument,
                "schedule projects the generator onto 0 but the requested control value is 1");
  if (gen.measurement == MeasureAction::project_1 && q2_in != 1)
    throw Error(ErrorCode::invalid_argument,
                "schedule projects the generator onto 1 but the requested control value is 0");
  const double d0 = gen.pulse.t_off - gen.pulse.t_on;
  for (const ScheduleEntry* e : {&copy, &target}) {
    const double d = e->pulse.t_off - e->pulse.t_on;
    if (std::abs(d - d0) > 1e-9 * d0)
      throw Error(ErrorCode::schedule_validation, "pulse durations differ across the sequence");
  }
  if (copy.pulse.t_on < gen.pulse.t_off + schedule.delta_t_m - 1e-12 * d0)
    throw Error(ErrorCode::schedule_validation, "copy pulse starts inside the readout window");
  if (target.pulse.t_on < copy.pulse.t_off - 1e-12 * d0)
    throw Error(ErrorCode::schedule_validation, "target pulse overlaps the copy pulse");

  const int qa = gen.qubit_index;
  const int qb = copy.qubit_index;
  const int fd = engine.fock_dim;
  ProtocolResult res;
  res.engine = engine.kind;

  if (engine.kind == EngineKind::effective) {
    // Idealized conditional maps; the schedule fixes the timing contract.
    CoherentSuperposition sup;
    sup.n_qubits = 2;
    sup.terms = {{0u, alpha, 1.0}};
    sup = conditional_pulse(sup, qa, EffectiveMap::ideal(d0));
    res.pre_measurement = sup.to_state(fd);

    const Measurement m0 = measure_qubit(res.pre_measurement, qa, 0);
    const Measurement m1 = measure_qubit(res.pre_measurement, qa, 1);
    const double total = m0.probability + m1.probability;
    res.branch_log = {{0, m0.probability / total, m0.impossible, StateVector()},
                      {1, m1.probability / total, m1.impossible, StateVector()}};
    const Measurement& sel = q2_in == 0 ? m0 : m1;
    if (sel.impossible || sel.probability / total < 1e-12)
      throw Error(ErrorCode::impossible_outcome,
                  "post-selecting the generator readout on " + std::to_string(q2_in) +
                      " has vanishing probability");
    res.branch_log[q2_in].state = *sel.collapsed;

    const unsigned mask = 1u << (1 - qa);
    std::vector<CoherentTerm> kept;
    for (const CoherentTerm& t : sup.terms)
      if (int((t.bits & mask) != 0) == q2_in) kept.push_back(t);
    sup.terms = std::move(kept);
    const double nrm = sup.norm();
    for (CoherentTerm& t : sup.terms) t.weight /= nrm;
    if (q1_in != q2_in)
      for (CoherentTerm& t : sup.terms) t.bits ^= mask;  // re-prepare the generator qubit

    sup = conditional_pulse(sup, qb, EffectiveMap::ideal(copy.pulse.t_off - copy.pulse.t_on));
    sup = conditional_pulse(sup, qa, EffectiveMap::ideal(target.pulse.t_off - target.pulse.t_on));
    res.final_state = sup.to_state(fd);
    return res;
  }

  StateVector psi = fresh_register(2, alpha, fd);
  psi = exact_pulse_comp(psi, qa, gen.pulse, engine);
  res.pre_measurement = psi;
  const Measurement m0 = measure_qubit(psi, qa, 0);
  const Measurement m1 = measure_qubit(psi, qa, 1);
  const double total = m0.probability + m1.probability;
  res.branch_log = {{0, m0.probability / total, m0.impossible, StateVector()},
                    {1, m1.probability / total, m1.impossible, StateVector()}};
  const Measurement& sel = q2_in == 0 ? m0 : m1;
  if (sel.impossible || sel.probability / total < 1e-12)
    throw Error(ErrorCode::impossible_outcome,
                "post-selecting the generator readout on " + std::to_string(q2_in) +
                    " has vanishing probability");
  res.branch_log[q2_in].state = *sel.collapsed;

  psi = *sel.collapsed;
  if (q1_in != q2_in) apply_qubit_2x2(psi, qa, pauli_x_gate());
  psi = exact_pulse_comp(psi, qb, copy.pulse, engine);
  psi = exact_pulse_comp(psi, qa, target.pulse, engine);
  res.final_state = psi;
  return res;
}

ProtocolResult ghz_generate(int n, complexd alpha, const std::vector<EffectiveMap>& maps,
                            bool simultaneous, const GateEngine& engine, const GhzOptions& qq) {
  if (n < 1 || n > 24) throw Error(ErrorCode::invalid_argument, "need 1 <= n <= 24 qubits");
  if (qq.include_qq) {
    if (!simultaneous)
      throw Error(ErrorCode::invalid_argument, "the qubit pair term needs the simultaneous drive");
    if (!(qq.e_l > 0.0))
      throw Error(ErrorCode::invalid_argument, "the qubit pair term needs e_l > 0");
    if (engine.kind == EngineKind::effective)
      throw Error(ErrorCode::invalid_argument, "the qubit pair term is integrated by the exact engine only");
  }
  const int fd = engine.fock_dim;
  ProtocolResult res;
  res.engine = engine.kind;

  if (engine.kind == EngineKind::effective) {
    if (int(maps.size()) != n)
      throw Error(ErrorCode::invalid_argument, "need one effective map per qubit");
    CoherentSuperposition sup;
    sup.n_qubits = n;
    sup.terms = {{0u, alpha, 1.0}};
    for (int q = 0; q < n; ++q) sup = conditional_pulse(sup, q, maps[q]);
    res.final_state = sup.to_state(fd);
  } else {
    check_exact_engine(engine);
    StateVector psi = fresh_register(n, alpha, fd);
    if (simultaneous) {
      const Eigen::Matrix2cd r = charge_to_branch();
      for (int q = 0; q < n; ++q) apply_qubit_2x2(psi, q, r);
      const HamiltonianApply apply = pulsed_all_qubits(engine.params, engine.pulse, engine.opts,
                                                       psi.layout, qq.include_qq, qq.e_l);
      psi = evolve_exact_full(apply, psi, engine.pulse.t_on, engine.pulse.t_off, engine.opts, true)
                .state;
      if (engine.dress_branch_phases) {
        const EffectiveMap map = make_effective_map(engine.pulse, engine.params, engine.opts,
                                                    engine.pulse.t_off - engine.pulse.t_on);
        for (int q = 0; q < n; ++q) dress_qubit(psi, q, map);
      }
      for (int q = 0; q < n; ++q) apply_qubit_2x2(psi, q, r.transpose());
    } else {
      for (int q = 0; q < n; ++q) psi = exact_pulse_comp(psi, q, engine.pulse, engine);
    }
    res.final_state = psi;
  }
  res.pre_measurement = res.final_state;

  // Branch masses against the two target patterns; leakage shows up as a
  // shortfall from 1.
  const long f = res.final_state.layout.fock_dim;
  const double total2 = res.final_state.amps.squaredNorm();
  const long ones = (1L << n) - 1;
  const double p0 = res.final_state.amps.segment(0, f).squaredNorm() / total2;
  const double p1 = res.final_state.amps.segment(ones * f, f).squaredNorm() / total2;
  res.branch_log = {{0, p0, p0 < 1e-18, StateVector()}, {1, p1, p1 < 1e-18, StateVector()}};

  if (std::abs(alpha) == 0.0) {
    // Degenerate: the odd branch vanishes and the target halves.
    res.ideal_fidelity = 0.5;
    return res;
  }
  VectorXcd tv = VectorXcd::Zero(res.final_state.layout.dim());
  const double s = (n % 2 == 0) ? -1.0 : 1.0;
  tv.segment(0, f) = cat_state(alpha, Parity::even, int(f)).amps / std::sqrt(2.0);
  tv.segment(ones * f, f) = s * cat_state(alpha, Parity::odd, int(f)).amps / std::sqrt(2.0);
  const StateVector targetv(res.final_state.layout, std::move(tv));
  res.ideal_fidelity = fidelity(targetv, res.final_state) / total2;
  return res;
}

RotateResult rotate_qubit_classical_pump(const StateVector& state, int qubit_index,
                                         const DeviceParams& params, const Couplings& couplings,
                                         double pump_amplitude, double omega_b, double duration,
                                         RotateGate gate, const PropagatorOptions& opts) {
  params.validate();
  opts.validate();
  check_qubit_index(state.layout, qubit_index);
  if (pump_amplitude < 0.0)
    throw Error(ErrorCode::invalid_argument, "pump amplitude must be nonnegative");

  PropagatorOptions sopts = opts;
  sopts.rel_tol = std::min(opts.rel_tol, 1e-10);
  sopts.abs_tol = std::min(opts.abs_tol, 1e-12);

  const double ej = params.e_j;
  const SpaceLayout l2(1, 1);
  auto propagator = [&](double lambda, double omega, double t_end) {
    HamiltonianFn h = [&](double t) {
      MatrixXcd m(2, 2);
      const double d = 2.0 * lambda * std::cos(omega * t);
      m << d, ej, ej, -d;
      return DenseOperator(l2, std::move(m));
    };
    Eigen::Matrix2cd u;
    for (int col = 0; col < 2; ++col) {
      VectorXcd v = VectorXcd::Zero(2);
      v[col] = 1.0;
      const StateVector res =
          evolve_exact_full(h, StateVector(l2, std::move(v)), 0.0, t_end, sopts, false).state;
      u(0, col) = res.amps[0];
      u(1, col) = res.amps[1];
    }
    return u;
  };

  PumpDrive drive;
  Eigen::Matrix2cd u;
  if (gate == RotateGate::generic) {
    if (!(duration > 0.0)) throw Error(ErrorCode::invalid_argument, "need duration > 0");
    if (omega_b < 0.0) throw Error(ErrorCode::invalid_argument, "need omega_b >= 0");
    drive = {couplings.g_b * pump_amplitude, omega_b, duration};
    u = propagator(drive.lambda, drive.omega_b, drive.duration);
  } else {
    // Solve the three drive knobs so the full propagator is the Hadamard up
    // to a global phase. The seed takes the rotating-wave solution nearest
    // the requested pump strength, with the pump period commensurate with
    // the gate time; Newton then corrects the counter-rotating residue.
    const double lam_req = couplings.g_b * pump_amplitude;
    if (!(lam_req > 0.0))
      throw Error(ErrorCode::invalid_argument, "the hadamard preset needs a positive pump drive");
    const double rt8 = 2.0 * std::sqrt(2.0);
    const double k = std::max(1.0, std::round((ej / lam_req - 1.0) / rt8));
    const double lam0 = ej / (1.0 + rt8 * k);
    const double om0 = 2.0 * (ej - lam0);
    const double t0 = pi / (rt8 * lam0);

    Eigen::Matrix2cd had;
    had << 1.0, 1.0, 1.0, -1.0;
    had /= std::sqrt(2.0);
    auto fvec = [&](const Eigen::Vector3d& x) {
      const Eigen::Matrix2cd m = propagator(x[0] * lam0, x[1] * om0, x[2] * t0) * had;
      return Eigen::Vector3d(m(0, 1).real(), m(0, 1).imag(),
                             std::arg(m(0, 0) * std::conj(m(1, 1))));
    };

    Eigen::Vector3d x(1.0, 1.0, 1.0);
    Eigen::Vector3d fx = fvec(x);
    for (int it = 0; it < 12 && fx.norm() >= 1e-9; ++it) {
      Eigen::Matrix3d jac;
      const double h = 1e-7;
      for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d xp = x;
        xp[j] += h;
        jac.col(j) = (fvec(xp) - fx) / h;
      }
      x -= jac.partialPivLu().solve(fx);
      fx = fvec(x);
    }
    if (fx.norm() >= 1e-9)
      throw Error(ErrorCode::calibration_failure, "the pump gate solve did not converge");
    drive = {x[0] * lam0, x[1] * om0, x[2] * t0};
    u = propagator(drive.lambda, drive.omega_b, drive.duration);
  }

  RotateResult out;
  out.drive = drive;
  out.regime_warning = couplings.g_a > 0.1 * drive.lambda;
  out.state = state;
  apply_qubit_2x2(out.state, qubit_index, u);
  return out;
}

}  // namespace catline
