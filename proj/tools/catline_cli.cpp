// Command-line front end: figure series, gate tables, calibration, and
// parameter sweeps, all written as deterministic CSV.
#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "catline/config.hpp"
#include "catline/csv.hpp"
#include "catline/dissipation.hpp"
#include "catline/gates.hpp"

using namespace catline;

namespace {

struct CliArgs {
  std::string command;   // figure | gate | calibrate | sweep
  std::string name;      // figure/gate name; for sweep, the sub-command
  std::string sub_name;  // sweep only: the sub-command's name
  std::string config_path;
  std::string out_path;
  bool have_seed = false;
  unsigned long long seed = 0;
  EngineKind engine = EngineKind::effective;
};

[[noreturn]] void usage_error(const std::string& msg) {
  throw Error(ErrorCode::config,
              msg +
                  "; usage: catline <figure NAME | gate NAME | calibrate | sweep CMD [NAME]> "
                  "[--config PATH] [--out PATH] [--seed N] [--engine effective|exact]");
}

CliArgs parse_args(int argc, char** argv) {
  CliArgs a;
  std::vector<std::string> pos;
  for (int i = 1; i < argc; ++i) {
    const std::string s = argv[i];
    const auto need = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) usage_error(std::string(flag) + " needs a value");
      return argv[++i];
    };
    if (s == "--config") a.config_path = need("--config");
    else if (s == "--out") a.out_path = need("--out");
    else if (s == "--seed") {
      const std::string v = need("--seed");
      // strtoull would silently wrap "-4"; keep the flag as strict as the config key
      if (v.empty() || v[0] == '-' || v[0] == '+')
        usage_error("--seed expects a nonnegative integer");
      char* end = nullptr;
      errno = 0;
      a.seed = std::strtoull(v.c_str(), &end, 10);
      if (end == v.c_str() || *end != '\0' || errno == ERANGE)
        usage_error("--seed expects a nonnegative integer");
      a.have_seed = true;
    } else if (s == "--engine") {
      const std::string v = need("--engine");
      if (v == "effective") a.engine = EngineKind::effective;
      else if (v == "exact") a.engine = EngineKind::exact;
      else usage_error("unknown engine '" + v + "'");
    } else if (s.rfind("--", 0) == 0) {
      usage_error("unknown flag '" + s + "'");
    } else {
      pos.push_back(s);
    }
  }
  if (pos.empty()) usage_error("missing command");
  a.command = pos[0];
  if (a.command == "figure" || a.command == "gate") {
    if (pos.size() != 2) usage_error(a.command + " expects exactly one name");
    a.name = pos[1];
  } else if (a.command == "calibrate") {
    if (pos.size() != 1) usage_error("calibrate takes no extra arguments");
  } else if (a.command == "sweep") {
    if (pos.size() < 2 || pos.size() > 3)
      usage_error("sweep expects 'sweep <figure|gate|calibrate> [NAME]'");
    a.name = pos[1];
    if (pos.size() == 3) a.sub_name = pos[2];
    if ((a.name == "figure" || a.name == "gate") && a.sub_name.empty())
      usage_error("sweep " + a.name + " needs a name");
    if (a.name == "calibrate" && !a.sub_name.empty()) usage_error("calibrate takes no name");
  } else {
    usage_error("unknown command '" + a.command + "'");
  }
  return a;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * double(i) / double(n - 1);
  return out;
}

double overlap2(const StateVector& a, const StateVector& b) {
  return fidelity(a, b) / (a.amps.squaredNorm() * b.amps.squaredNorm());
}

// ---- figures ---------------------------------------------------------------

// Conditional-exponent series over the pulse window, one curve pair per drive
// frequency. The literal drive is only clean where its envelope closes, so
// its grid snaps to half-period multiples; the hermitized drive samples a
// dense grid.
CsvSeries theta_figure(const RunConfig& cfg, bool phase) {
  std::vector<double> nus =
      cfg.protocol.nu.empty() ? std::vector<double>{cfg.pulse.nu} : cfg.protocol.nu;
  for (double nu : nus)
    if (nu <= 0.0) throw Error(ErrorCode::config, "drive frequency must be positive");
  const bool literal = cfg.pulse.mode == PulseMode::literal_complex;
  if (literal && nus.size() > 1)
    throw Error(ErrorCode::config,
                "the literal drive needs one nu per run; sweep pulse.nu instead");
  const double window =
      cfg.protocol.t_max > 0.0 ? cfg.protocol.t_max : cfg.pulse.t_off - cfg.pulse.t_on;
  if (window <= 0.0) throw Error(ErrorCode::config, "figure window is empty");
  if (cfg.protocol.samples < 2) throw Error(ErrorCode::config, "need at least 2 samples");

  std::vector<double> rel;
  if (literal) {
    const double half = pi / nus[0];
    const int k = std::max(1, int(std::llround(window / half)));
    for (int i = 0; i <= k; ++i) rel.push_back(half * double(i));
  } else {
    rel = linspace(0.0, window, cfg.protocol.samples);
  }

  CsvSeries csv;
  csv.columns.push_back("t_ns");
  std::string note = phase ? "t_ns: time from pulse onset, ns; im_theta_*: conditional phase, rad"
                           : "t_ns: time from pulse onset, ns; exp_re_theta_*: amplitude factor "
                             "e^{Re theta}, dimensionless";
  const PropagatorOptions opts;
  std::vector<ThetaTrace> traces;
  for (size_t j = 0; j < nus.size(); ++j) {
    FluxPulse p = cfg.pulse;
    p.nu = nus[j];
    p.t_off = p.t_on + rel.back();
    std::vector<double> at;
    at.reserve(rel.size());
    for (double r : rel) at.push_back(p.t_on + r);
    ThetaTrace tr = theta_trace(p, cfg.device, opts, at);
    for (size_t i = 0; i < tr.clipped.size(); ++i)
      if (tr.clipped[i])
        throw Error(ErrorCode::integration_failure,
                    "drive envelope clipped at t = " + format_g17(rel[i]) +
                        " s; sample half-period multiples or use pulse.mode = hermitized");
    traces.push_back(std::move(tr));
    const std::string sfx = nus.size() > 1 ? "_" + std::to_string(j + 1) : "";
    if (phase) {
      csv.columns.push_back("im_theta_minus" + sfx);
      csv.columns.push_back("im_theta_plus" + sfx);
    } else {
      csv.columns.push_back("exp_re_theta_minus" + sfx);
      csv.columns.push_back("exp_re_theta_plus" + sfx);
    }
    note += "; nu" + sfx + " = " + format_g17(nus[j]) + " rad/s";
  }
  csv.unit_comment = note;

  for (size_t i = 0; i < rel.size(); ++i) {
    std::vector<double> row{rel[i] * 1e9};
    for (const ThetaTrace& tr : traces) {
      if (phase) {
        row.push_back(tr.theta_minus[i].imag());
        row.push_back(tr.theta_plus[i].imag());
      } else {
        row.push_back(std::exp(tr.theta_minus[i].real()));
        row.push_back(std::exp(tr.theta_plus[i].real()));
      }
    }
    csv.append(std::move(row));
  }
  return csv;
}

CsvSeries atom_decay_figure(const RunConfig& cfg) {
  std::vector<double> temps = cfg.protocol.temperatures.empty()
                                  ? std::vector<double>{cfg.bath.temperature}
                                  : cfg.protocol.temperatures;
  const double t_max = cfg.protocol.t_max > 0.0 ? cfg.protocol.t_max : 8e-9;
  if (cfg.protocol.samples < 2) throw Error(ErrorCode::config, "need at least 2 samples");
  const std::vector<double> ts = linspace(0.0, t_max, cfg.protocol.samples);

  CsvSeries csv;
  csv.columns.push_back("t_ns");
  std::string note = "t_ns: ns; P0, P1: level occupation probabilities; im_PT: Im of the "
                     "coherence";
  for (size_t j = 0; j < temps.size(); ++j) {
    const std::string sfx = temps.size() > 1 ? "_" + std::to_string(j + 1) : "";
    csv.columns.push_back("P0" + sfx);
    csv.columns.push_back("P1" + sfx);
    csv.columns.push_back("im_PT" + sfx);
    note += "; T" + sfx + " = " + format_g17(temps[j]) + " K";
  }
  csv.unit_comment = note;

  for (double t : ts) {
    std::vector<double> row{t * 1e9};
    for (double T : temps) {
      BathParams b = cfg.bath;
      b.temperature = T;
      const AtomPopulations p = atom_population_probs(t, cfg.device, b);
      row.push_back(p.p0);
      row.push_back(p.p1);
      row.push_back(p.pt.imag());
    }
    csv.append(std::move(row));
  }
  return csv;
}

CsvSeries sequential_probe_figure(const RunConfig& cfg) {
  if (cfg.protocol.x_max <= 0.0) throw Error(ErrorCode::config, "protocol.x_max must be positive");
  if (cfg.protocol.samples < 2) throw Error(ErrorCode::config, "need at least 2 samples");
  const std::vector<double> xs = linspace(0.0, cfg.protocol.x_max, cfg.protocol.samples);

  CsvSeries csv;
  csv.unit_comment =
      "t_over_tau: time in units of tau_kappa; P00/P10: sequential readout probabilities, "
      "closed form and channel oracle; nonphysical: 1 where the closed form's late branch "
      "underfills probability; alpha = " +
      format_g17(cfg.protocol.alpha);
  csv.columns = {"t_over_tau", "P00_formula", "P10_formula",
                 "P00_oracle", "P10_oracle",  "nonphysical"};
  for (double x : xs) {
    const double t = x * cfg.bath.tau_kappa;
    const SequentialProbs f = sequential_pulse_probs(cfg.protocol.alpha, t, cfg.bath,
                                                     ProbeSource::closed_form,
                                                     cfg.layout.fock_dim);
    const SequentialProbs o = sequential_pulse_probs(cfg.protocol.alpha, t, cfg.bath,
                                                     ProbeSource::channel_oracle,
                                                     cfg.layout.fock_dim);
    csv.append({x, f.p00, f.p10, o.p00, o.p10, f.nonphysical_branch ? 1.0 : 0.0});
  }
  return csv;
}

// ---- gate tables -----------------------------------------------------------

// Gates run against the config's own conditional map when the device is
// calibrated (g > 0), else the idealized pi map. The fidelity column compares
// the engine's state against the effective prediction, so it reads 1 for
// effective runs.
struct GateSetup {
  GateEngine engine;
  GateEngine effective;
  EffectiveMap map;
};

GateSetup gate_setup(const RunConfig& cfg, EngineKind kind) {
  GateSetup s;
  s.engine.kind = kind;
  s.engine.params = cfg.device;
  s.engine.pulse = cfg.pulse;
  s.engine.fock_dim = cfg.layout.fock_dim;
  s.effective = s.engine;
  s.effective.kind = EngineKind::effective;
  const double window = cfg.pulse.t_off - cfg.pulse.t_on;
  s.map = cfg.device.g > 0.0
              ? make_effective_map(cfg.pulse, cfg.device, PropagatorOptions{}, window)
              : EffectiveMap::ideal(window);
  return s;
}

CsvSeries gate_hadamard(const RunConfig& cfg, EngineKind kind) {
  const GateSetup s = gate_setup(cfg, kind);
  const complexd alpha = cfg.protocol.alpha;
  CsvSeries csv;
  csv.unit_comment = "atom_in: initial charge qubit; p_out_0/p_out_1: atom readout "
                     "probabilities after the entangling pulse; fidelity: overlap with the "
                     "effective prediction";
  csv.columns = {"atom_in", "p_out_0", "p_out_1", "fidelity"};
  for (int atom_in = 0; atom_in < 2; ++atom_in) {
    const StateVector h = hadamard_field(atom_in, alpha, s.map, s.engine);
    const double p0 = measure_qubit(h, 0, 0).probability;
    const double p1 = measure_qubit(h, 0, 1).probability;
    double fid = 1.0;
    if (kind == EngineKind::exact)
      fid = overlap2(h, hadamard_field(atom_in, alpha, s.map, s.effective));
    csv.append({double(atom_in), p0, p1, fid});
  }
  return csv;
}

CsvSeries gate_cnot_field(const RunConfig& cfg, EngineKind kind) {
  const GateSetup s = gate_setup(cfg, kind);
  const complexd alpha = cfg.protocol.alpha;
  CsvSeries csv;
  csv.unit_comment = "field control (0 = even cat, 1 = odd cat) against the charge qubit; "
                     "probability: readout mass behind atom_out; fidelity: overlap with the "
                     "effective prediction";
  csv.columns = {"atom_in", "field_in", "atom_out", "field_out", "probability", "fidelity"};
  for (int atom_in = 0; atom_in < 2; ++atom_in)
    for (int field_in = 0; field_in < 2; ++field_in) {
      const StateVector cat =
          cat_state(alpha, field_in ? Parity::odd : Parity::even, cfg.layout.fock_dim);
      const CnotReadout r = cnot_field_control(atom_in, cat, s.map, s.engine);
      double fid = 1.0;
      if (kind == EngineKind::exact)
        fid = overlap2(r.state, cnot_field_control(atom_in, cat, s.map, s.effective).state);
      csv.append({double(atom_in), double(field_in), double(r.atom_out), double(r.field_out),
                  r.certainty, fid});
    }
  return csv;
}

CsvSeries gate_cnot_qq(const RunConfig& cfg, EngineKind kind) {
  const GateSetup s = gate_setup(cfg, kind);
  const complexd alpha = cfg.protocol.alpha;
  const PulseSchedule sched = cnot_schedule(cfg.pulse, cfg.protocol.delta_t_m);
  CsvSeries csv;
  csv.unit_comment = "two charge qubits through the bus; probability: generator readout mass "
                     "behind the selected branch; fidelity: overlap with the effective "
                     "prediction";
  csv.columns = {"q1_in", "q2_in", "q1_out", "q2_out", "probability", "fidelity"};
  for (int q1 = 0; q1 < 2; ++q1)
    for (int q2 = 0; q2 < 2; ++q2) {
      const ProtocolResult r = cnot_two_qubits(q1, q2, alpha, sched, s.engine);
      const int q1_out = measure_qubit(r.final_state, 0, 1).probability > 0.5 ? 1 : 0;
      const int q2_out = measure_qubit(r.final_state, 1, 1).probability > 0.5 ? 1 : 0;
      double fid = 1.0;
      if (kind == EngineKind::exact)
        fid = overlap2(r.final_state,
                       cnot_two_qubits(q1, q2, alpha, sched, s.effective).final_state);
      csv.append({double(q1), double(q2), double(q1_out), double(q2_out),
                  r.branch_log[q2].probability, fid});
    }
  return csv;
}

CsvSeries gate_ghz(const RunConfig& cfg, EngineKind kind) {
  const GateSetup s = gate_setup(cfg, kind);
  const int n = cfg.protocol.n;
  const std::vector<EffectiveMap> maps(size_t(std::max(n, 0)), s.map);
  const ProtocolResult r = ghz_generate(n, cfg.protocol.alpha, maps, false, s.engine);
  CsvSeries csv;
  csv.unit_comment = "branch weights of the n-qubit chain state; pattern: shared qubit value "
                     "packed over n = " +
                     std::to_string(n) + " qubits; ideal_fidelity: overlap with the "
                     "equal-weight target";
  csv.columns = {"pattern", "probability", "ideal_fidelity"};
  csv.append({0.0, r.branch_log[0].probability, r.ideal_fidelity});
  csv.append({double((1L << n) - 1), r.branch_log[1].probability, r.ideal_fidelity});
  return csv;
}

CsvSeries calibrate_table(const RunConfig& cfg) {
  if (cfg.target_im_theta <= 0.0)
    throw Error(ErrorCode::config, "target.im_theta must be positive");
  const CalibrationTarget target{cfg.target_im_theta};
  const CalibrationResult r = calibrate_pulse(cfg.device, cfg.pulse, target);
  CsvSeries csv;
  csv.unit_comment = "g: coupling, rad/s; phi: drive phase, rad; achieved_im_theta: conditional "
                     "phase at the window end, rad; phase_residual: relative miss of the "
                     "target; first_order_ratio: |first order| / |second order|";
  csv.columns = {"g", "phi", "achieved_im_theta", "phase_residual", "first_order_ratio"};
  csv.append({r.g, r.phi, r.achieved_im_theta,
              std::abs(r.achieved_im_theta - cfg.target_im_theta) / cfg.target_im_theta,
              r.first_order_ratio});
  return csv;
}

CsvSeries run_named(const std::string& command, const std::string& name, const RunConfig& cfg,
                    EngineKind engine) {
  if (command == "figure") {
    if (name == "theta_amp") return theta_figure(cfg, false);
    if (name == "theta_phase") return theta_figure(cfg, true);
    if (name == "atom_decay") return atom_decay_figure(cfg);
    if (name == "sequential_probe") return sequential_probe_figure(cfg);
    usage_error("unknown figure '" + name + "'");
  }
  if (command == "gate") {
    if (name == "hadamard") return gate_hadamard(cfg, engine);
    if (name == "cnot_field") return gate_cnot_field(cfg, engine);
    if (name == "cnot_qq") return gate_cnot_qq(cfg, engine);
    if (name == "ghz") return gate_ghz(cfg, engine);
    usage_error("unknown gate '" + name + "'");
  }
  if (command == "calibrate") return calibrate_table(cfg);
  usage_error("unknown command '" + command + "'");
}

// ---- sweep -----------------------------------------------------------------

CsvSeries sweep_series(const CliArgs& args, const RunConfig& base) {
  if (base.sweep.key.empty() || base.sweep.values.empty())
    throw Error(ErrorCode::config, "sweep needs sweep.key and sweep.values in the config");
  if (!config_key_is_scalar(base.sweep.key))
    throw Error(ErrorCode::config,
                "sweep.key must name a numeric scalar, got '" + base.sweep.key + "'");

  const size_t n = base.sweep.values.size();
  std::vector<CsvSeries> results(n);
  std::vector<double> swept(n, 0.0);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> cursor{0};

  const auto work = [&]() {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= n) return;
      try {
        RunConfig c = base;
        c.sweep = SweepConfig{};  // workers are leaves
        assign_config_key(c, base.sweep.key, base.sweep.values[i]);
        swept[i] = config_scalar_value(c, base.sweep.key);
        results[i] = run_named(args.name, args.sub_name, c, args.engine);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const size_t n_workers = std::min<size_t>(4, n);
  std::vector<std::thread> pool;
  for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  CsvSeries out;
  out.unit_comment = "sweep over " + base.sweep.key + "; sweep_value in SI units; " +
                     results[0].unit_comment;
  out.columns = {"sweep_index", "sweep_value"};
  out.columns.insert(out.columns.end(), results[0].columns.begin(), results[0].columns.end());
  for (size_t i = 0; i < n; ++i) {
    if (results[i].columns != results[0].columns)
      throw Error(ErrorCode::invalid_argument, "sweep points produced mismatched columns");
    for (const std::vector<double>& row : results[i].rows) {
      std::vector<double> merged{double(i), swept[i]};
      merged.insert(merged.end(), row.begin(), row.end());
      out.append(std::move(merged));
    }
  }
  return out;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::config:
    case ErrorCode::io:
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_dimension:
    case ErrorCode::layout_mismatch:
    case ErrorCode::schedule_validation:
    case ErrorCode::degenerate_state:
      return 2;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const CliArgs args = parse_args(argc, argv);
    RunConfig cfg =
        args.config_path.empty() ? RunConfig{} : parse_config_file(args.config_path);
    if (args.have_seed) cfg.protocol.seed = args.seed;
    if (!args.out_path.empty()) cfg.out_path = args.out_path;
    if (cfg.out_path.empty())
      throw Error(ErrorCode::config, "no output path; pass --out or set output.path");

    const CsvSeries out = args.command == "sweep"
                              ? sweep_series(args, cfg)
                              : run_named(args.command, args.name, cfg, args.engine);
    write_text_atomic(cfg.out_path, out.to_text());
    return 0;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    std::fprintf(stderr, "catline: exit=%d %s\n", code, e.what());
    return code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "catline: exit=3 internal: %s\n", e.what());
    return 3;
  }
}
