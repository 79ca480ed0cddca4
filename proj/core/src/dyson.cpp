#include <algorithm>
#include <cmath>

#include "catline/propagator.hpp"
#include "phase_model.hpp"

// Second-order expansion of the pulsed interaction on a coherent state.
//
// Every phase that appears is Psi(tau) = 2 s N(tau) + k w tau with s = +-1,
// k in {-5,-3,+3,+5} and N the running integral of nu_a. The four operator
// terms per branch pair an outer factor e^{i Psi_p} with the antiderivative
// of an inner e^{i Psi_q}; s_p = -s_q always, so the product phase collapses
// to e^{i K w tau}, K in {-2,0,+2}, times a function of the drive phase u
// alone. That function is expanded in harmonics of e^{2iu} (a small DFT) and
// integrated in closed form; the leftover boundary pieces carry the full
// envelope and are assembled in log form so the literal drive's mid-period
// blow-up clips instead of overflowing.

namespace catline {

void PropagatorOptions::validate() const {
  if (!(rel_tol > 0.0) || rel_tol > 1e-3 || !(abs_tol > 0.0) || abs_tol > 1e-3)
    throw Error(ErrorCode::invalid_argument, "tolerances must lie in (0, 1e-3]");
  if (!(max_step > 0.0)) throw Error(ErrorCode::invalid_argument, "max_step must be positive");
  if (dyson_order < 1 || dyson_order > 2)
    throw Error(ErrorCode::invalid_argument, "dyson_order must be 1 or 2");
}

EffectiveMap EffectiveMap::ideal(double duration) {
  EffectiveMap m;
  m.theta_minus_T = complexd(0.0, pi);
  m.theta_plus_T = 0.0;
  m.duration_T = duration;
  return m;
}

complexd effective_apply(const EffectiveMap& map, AtomBranch branch, complexd alpha) {
  return alpha * std::exp(branch == AtomBranch::minus ? map.theta_minus_T : map.theta_plus_T);
}

namespace {

using detail::PhaseModel;

constexpr double clip_log = 600.0;
constexpr int dft_size = 128;

struct ClipState {
  bool clipped = false;
  double log_weight = 0.0;

  void merge(const ClipState& o) {
    clipped = clipped || o.clipped;
    log_weight = std::max(log_weight, o.log_weight);
  }
};

// value = exp(log_mag) * unit; |unit| stays O(|G|) so log_mag carries the
// whole envelope.
struct LogTerm {
  double log_mag = 0.0;
  complexd unit{};
};

complexd collapse(const LogTerm& t, ClipState* clip) {
  if (t.log_mag > clip_log) {
    clip->clipped = true;
    const double mag = std::abs(t.unit);
    clip->log_weight =
        std::max(clip->log_weight, t.log_mag + std::log(std::max(mag, 1e-300)));
    return complexd(0.0, 0.0);
  }
  return std::exp(t.log_mag) * t.unit;
}

struct OscModel {
  const PhaseModel* pm = nullptr;
  int s = 0;
  int k = 0;

  double psi_bar() const { return 2.0 * s * pm->c0() + k * pm->omega_c; }

  // i Psi(tau) = i psi_bar tau + osc(tau)
  complexd osc(double tau) const {
    const double u = pm->u_of(tau);
    complexd out = 0.0;
    for (size_t i = 0; i < pm->m.size(); ++i) {
      if (pm->m[i] == 0) continue;
      const double mn = pm->m[i] * pm->nu;
      out += (2.0 * s / mn) * pm->c[i] *
             (std::exp(complexd(0.0, pm->m[i] * u)) -
              std::exp(complexd(0.0, pm->m[i] * pm->phi)));
    }
    return out;
  }

  // Endpoint series G0 + G1 + G2 of the stationary-phase-free antiderivative,
  // G0 = 1/(i Psi'), G1 = i Psi'' G0^3, G2 = -i Psi''' G0^4 - 3 Psi''^2 G0^5.
  complexd g_series(double u, double* last_term_mag) const {
    const complexd i1(0.0, 1.0);
    const complexd dpsi1 = 2.0 * s * pm->nu_a_at_u(u, 0) + complexd(k * pm->omega_c, 0.0);
    const complexd dpsi2 = 2.0 * s * pm->nu_a_at_u(u, 1);
    const complexd dpsi3 = 2.0 * s * pm->nu_a_at_u(u, 2);
    const complexd g0 = 1.0 / (i1 * dpsi1);
    const complexd g02 = g0 * g0;
    const complexd g1 = i1 * dpsi2 * g02 * g0;
    const complexd g2 = -i1 * dpsi3 * g02 * g02 - 3.0 * dpsi2 * dpsi2 * g02 * g02 * g0;
    if (last_term_mag) *last_term_mag = std::abs(g2);
    return g0 + g1 + g2;
  }

  LogTerm antiderivative(double tau, double* last_term_mag) const {
    const complexd io = osc(tau);
    const double phase = psi_bar() * tau + io.imag();
    const complexd g = g_series(pm->u_of(tau), last_term_mag);
    return {io.real(), std::exp(complexd(0.0, phase)) * g};
  }
};

// Harmonics of G_q over one drive period: G_q(u) = sum_j gamma_j e^{2iju}.
struct HarmTable {
  std::vector<complexd> gamma;  // index j + dft_size/2
  complexd q_at_start{};        // G_q at tau = 0
  double g2_at_start = 0.0;
  double tail = 0.0;
};

HarmTable build_table(const OscModel& q) {
  const int m = dft_size;
  HarmTable t;
  std::vector<complexd> samples(m);
  for (int r = 0; r < m; ++r) samples[r] = q.g_series(pi * r / m, nullptr);
  t.gamma.assign(m, complexd(0.0, 0.0));
  for (int j = -m / 2; j < m / 2; ++j) {
    complexd acc = 0.0;
    for (int r = 0; r < m; ++r)
      acc += samples[r] * std::exp(complexd(0.0, -2.0 * pi * j * r / m));
    t.gamma[j + m / 2] = acc / double(m);
  }
  t.tail = std::max(std::abs(t.gamma.front()), std::abs(t.gamma[m - 1]));
  t.q_at_start = q.g_series(q.pm->phi, &t.g2_at_start);
  return t;
}

// int_0^tau e^{i K w t} G_q(u(t)) dt, exact given the table.
complexd harm_integral(const HarmTable& t, int big_k, const PhaseModel& pm, double tau) {
  const int m = dft_size;
  complexd out = 0.0;
  for (int j = -m / 2; j < m / 2; ++j) {
    const complexd& g = t.gamma[j + m / 2];
    if (std::abs(g) < 1e-280) continue;
    const double w = big_k * pm.omega_c + 2.0 * j * pm.nu;
    complexd piece;
    if (w == 0.0)
      piece = tau;
    else
      piece = (std::exp(complexd(0.0, w * tau)) - 1.0) / complexd(0.0, w);
    out += g * std::exp(complexd(0.0, 2.0 * j * pm.phi)) * piece;
  }
  return out;
}

struct WSet {
  complexd w1{}, w2{}, w3{}, w4{};  // a^dag a^dag, a^dag a, a a^dag, a a
  double err = 0.0;
  ClipState clip;
};

class SecondOrder {
 public:
  SecondOrder(const DeviceParams& params, const FluxPulse& pulse, CosExpansion expansion)
      : pm_(params, pulse, expansion),
        g_(params.g),
        p_m3_{&pm_, +1, -3},
        p_m5_{&pm_, +1, -5},
        p_p3_{&pm_, -1, +3},
        p_p5_{&pm_, -1, +5},
        t_m3_(build_table(p_m3_)),
        t_m5_(build_table(p_m5_)),
        t_p3_(build_table(p_p3_)),
        t_p5_(build_table(p_p5_)) {}

  const PhaseModel& model() const { return pm_; }
  double g() const { return g_; }

  WSet w_table(AtomBranch branch, double tau) const {
    WSet w;
    if (tau <= 0.0) return w;
    const bool minus = branch == AtomBranch::minus;
    // branch minus: q carries s=-1, p carries s=+1; branch plus mirrors.
    const HarmTable& qa = minus ? t_p5_ : t_m3_;  // inner antiderivative under a^dag a^dag, a a^dag
    const HarmTable& qb = minus ? t_p3_ : t_m5_;  // inner antiderivative under a^dag a, a a
    const OscModel& pa = minus ? p_m3_ : p_p5_;   // outer phase over a^dag a^dag, a^dag a
    const OscModel& pb = minus ? p_m5_ : p_p3_;   // outer phase over a a^dag, a a

    double g2a = 0.0, g2b = 0.0;
    const LogTerm end_a = pa.antiderivative(tau, &g2a);
    const LogTerm end_b = pb.antiderivative(tau, &g2b);
    const complexd da = collapse(end_a, &w.clip) - pa.g_series(pm_.phi, nullptr);
    const complexd db = collapse(end_b, &w.clip) - pb.g_series(pm_.phi, nullptr);

    w.w1 = harm_integral(qa, +2, pm_, tau) - qa.q_at_start * da;
    w.w2 = harm_integral(qb, 0, pm_, tau) - qb.q_at_start * da;
    w.w3 = harm_integral(qa, 0, pm_, tau) - qa.q_at_start * db;
    w.w4 = harm_integral(qb, -2, pm_, tau) - qb.q_at_start * db;

    w.err = (qa.tail + qb.tail) * tau +
            qa.g2_at_start * (std::abs(da) + std::abs(db)) +
            qb.g2_at_start * (std::abs(da) + std::abs(db)) +
            (std::abs(qa.q_at_start) + std::abs(qb.q_at_start)) * (g2a + g2b);
    return w;
  }

  complexd expectation(const WSet& w, complexd alpha, int order) const {
    if (order < 2) return complexd(1.0, 0.0);
    const complexd ac = std::conj(alpha);
    const double nbar = std::norm(alpha);
    return 1.0 - g_ * g_ *
                     (ac * ac * w.w1 + nbar * w.w2 + (1.0 + nbar) * w.w3 + alpha * alpha * w.w4);
  }

  // Norm of the first-order transition amplitude out of |branch>|alpha>.
  double first_order_norm(AtomBranch branch, complexd alpha, double tau, ClipState* clip,
                          double* err) const {
    if (tau <= 0.0) return 0.0;
    const bool minus = branch == AtomBranch::minus;
    const OscModel& j_up = minus ? p_p5_ : p_m3_;  // multiplies a^dag
    const OscModel& j_dn = minus ? p_p3_ : p_m5_;  // multiplies a
    double e_up = 0.0, e_dn = 0.0;
    const complexd ju = collapse(j_up.antiderivative(tau, &e_up), clip) -
                        j_up.g_series(pm_.phi, nullptr);
    const complexd jd = collapse(j_dn.antiderivative(tau, &e_dn), clip) -
                        j_dn.g_series(pm_.phi, nullptr);
    const double nbar = std::norm(alpha);
    const double norm_sq =
        std::norm(ju) * (1.0 + nbar) + std::norm(jd) * nbar +
        2.0 * (std::conj(ju) * jd * alpha * alpha).real();
    if (err) *err = g_ * (e_up + e_dn);
    return g_ * std::sqrt(std::max(norm_sq, 0.0));
  }

 private:
  PhaseModel pm_;
  double g_;
  OscModel p_m3_, p_m5_, p_p3_, p_p5_;
  HarmTable t_m3_, t_m5_, t_p3_, t_p5_;
};

double clamp_tau(const FluxPulse& pulse, double t) {
  return std::max(0.0, std::min(t, pulse.t_off) - pulse.t_on);
}

}  // namespace

DysonValue dyson_expectation_full(const FluxPulse& pulse, const DeviceParams& params,
                                  complexd alpha, AtomBranch branch, double t,
                                  const PropagatorOptions& opts) {
  params.validate();
  pulse.validate();
  opts.validate();
  const SecondOrder so(params, pulse, opts.expansion);
  const WSet w = so.w_table(branch, clamp_tau(pulse, t));
  DysonValue out;
  out.value = so.expectation(w, alpha, opts.dyson_order);
  out.error_estimate = params.g * params.g * w.err;
  out.envelope_clipped = w.clip.clipped;
  out.clipped_log_weight = w.clip.log_weight;
  return out;
}

complexd dyson_expectation(const FluxPulse& pulse, const DeviceParams& params, complexd alpha,
                           AtomBranch branch, double t, const PropagatorOptions& opts) {
  return dyson_expectation_full(pulse, params, alpha, branch, t, opts).value;
}

DysonValue first_order_magnitude(const FluxPulse& pulse, const DeviceParams& params,
                                 complexd alpha, AtomBranch branch, double t,
                                 const PropagatorOptions& opts) {
  params.validate();
  pulse.validate();
  opts.validate();
  const SecondOrder so(params, pulse, opts.expansion);
  DysonValue out;
  double err = 0.0;
  ClipState clip;
  out.value = so.first_order_norm(branch, alpha, clamp_tau(pulse, t), &clip, &err);
  out.error_estimate = err;
  out.envelope_clipped = clip.clipped;
  out.clipped_log_weight = clip.log_weight;
  return out;
}

ThetaTrace theta_trace(const FluxPulse& pulse, const DeviceParams& params,
                       const PropagatorOptions& opts, const std::vector<double>& sample_times) {
  params.validate();
  pulse.validate();
  opts.validate();
  for (size_t i = 1; i < sample_times.size(); ++i)
    if (!(sample_times[i] > sample_times[i - 1]))
      throw Error(ErrorCode::invalid_argument, "sample times must be strictly ascending");

  // Linear extraction from two coherent amplitudes, per the operational
  // definition of theta: E = 1 + c + theta nbar.
  const double n1 = 0.1, n2 = 0.3;
  if (std::abs(n2 - n1) < 1e-6)
    throw Error(ErrorCode::extraction_failure, "extraction amplitudes are degenerate");
  const complexd a1 = std::sqrt(n1), a2 = std::sqrt(n2);

  const SecondOrder so(params, pulse, opts.expansion);
  ThetaTrace trace;
  trace.times = sample_times;
  for (double t : sample_times) {
    const double tau = clamp_tau(pulse, t);
    ClipState clip;
    for (AtomBranch b : {AtomBranch::plus, AtomBranch::minus}) {
      const WSet w = so.w_table(b, tau);
      clip.merge(w.clip);
      const complexd e1 = so.expectation(w, a1, opts.dyson_order);
      const complexd e2 = so.expectation(w, a2, opts.dyson_order);
      const complexd theta = (e2 - e1) / (n2 - n1);
      const complexd c = e1 - 1.0 - theta * n1;
      if (b == AtomBranch::minus) {
        trace.theta_minus.push_back(theta);
        trace.c_minus.push_back(c);
      } else {
        trace.theta_plus.push_back(theta);
        trace.c_plus.push_back(c);
      }
    }
    trace.clipped.push_back(clip.clipped);
  }
  return trace;
}

}  // namespace catline
