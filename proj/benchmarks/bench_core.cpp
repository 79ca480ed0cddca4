#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "catline/dissipation.hpp"
#include "catline/fock.hpp"
#include "catline/gates.hpp"
#include "catline/propagator.hpp"

using namespace catline;

namespace {

const complexd kAlpha = std::sqrt(complexd(0.4, 0.0));
constexpr double kHalf = 62.5e-9;

void BM_coherent_state(benchmark::State& state) {
  const int fd = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coherent_state(kAlpha, fd));
}
BENCHMARK(BM_coherent_state)->Arg(32)->Arg(64);

void BM_theta_half_period(benchmark::State& state) {
  DeviceParams dev;
  dev.g = 7.7858227039e9;
  FluxPulse pulse;
  pulse.mode = PulseMode::hermitized;
  pulse.phi = 6.8108420090e-06;
  const PropagatorOptions opts;
  for (auto _ : state)
    benchmark::DoNotOptimize(theta_trace(pulse, dev, opts, {pulse.t_on + kHalf}));
}
BENCHMARK(BM_theta_half_period);

void BM_effective_conditional_pulse(benchmark::State& state) {
  const EffectiveMap ideal = EffectiveMap::ideal(kHalf);
  GateEngine eff;
  eff.fock_dim = 16;
  const StateVector s0 = tensor_compose({qubit_basis({0}), coherent_state(kAlpha, 16)});
  for (auto _ : state) benchmark::DoNotOptimize(conditional_pulse(s0, 0, ideal, eff));
}
BENCHMARK(BM_effective_conditional_pulse);

void BM_recognize_coherent(benchmark::State& state) {
  const StateVector cat = tensor_compose({qubit_basis({0}), cat_state(kAlpha, Parity::even, 32)});
  for (auto _ : state) benchmark::DoNotOptimize(recognize_coherent(cat));
}
BENCHMARK(BM_recognize_coherent);

// The adaptive integrator on a short slice of the hermitized drive window;
// per-step cost is the dense matvec at the given Fock dimension.
void BM_exact_window_slice(benchmark::State& state) {
  const int fd = int(state.range(0));
  DeviceParams dev;
  dev.g = 7.7858227039e9;
  FluxPulse pulse;
  pulse.mode = PulseMode::hermitized;
  pulse.phi = 6.8108420090e-06;
  PropagatorOptions opts;
  opts.rel_tol = 1e-7;
  opts.abs_tol = 1e-9;
  const HamiltonianApply h = pulsed_interaction(dev, pulse, opts, fd);
  const StateVector psi0 = tensor_compose({qubit_basis({0}), coherent_state(kAlpha, fd)});
  for (auto _ : state)
    benchmark::DoNotOptimize(
        evolve_exact_full(h, psi0, pulse.t_on, pulse.t_on + 2.0e-9, opts, true));
}
BENCHMARK(BM_exact_window_slice)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_ghz_effective(benchmark::State& state) {
  const EffectiveMap ideal = EffectiveMap::ideal(kHalf);
  const std::vector<EffectiveMap> maps(3, ideal);
  GateEngine eff;
  eff.fock_dim = 64;
  const complexd big = std::sqrt(complexd(10.0, 0.0));
  for (auto _ : state) benchmark::DoNotOptimize(ghz_generate(3, big, maps, false, eff));
}
BENCHMARK(BM_ghz_effective);

void BM_damped_cat_density(benchmark::State& state) {
  const BathParams bath;
  const DampedCat cat =
      damped_cat(std::sqrt(complexd(10.0, 0.0)), Parity::even, 0.3 * bath.tau_kappa, bath);
  for (auto _ : state) benchmark::DoNotOptimize(damped_cat_density(cat, 64));
}
BENCHMARK(BM_damped_cat_density)->Unit(benchmark::kMillisecond);

void BM_sequential_probe_oracle(benchmark::State& state) {
  const BathParams bath;
  const complexd alpha = std::sqrt(complexd(10.0, 0.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sequential_pulse_probs(alpha, 0.5 * bath.tau_kappa, bath,
                                                    ProbeSource::channel_oracle, 64));
}
BENCHMARK(BM_sequential_probe_oracle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
