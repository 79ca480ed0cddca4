#include "catline/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "catline/errors.hpp"

namespace catline {
namespace {

enum class Dim { plain, time, temperature, frequency };

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Unknown suffix or wrong dimension returns 0 (never a valid factor).
double unit_factor(const std::string& suffix, Dim dim) {
  struct Row {
    const char* name;
    Dim dim;
    double factor;
  };
  // Frequencies are angular: the suffix scales by the SI prefix only.
  static const Row rows[] = {
      {"s", Dim::time, 1.0},           {"ms", Dim::time, 1e-3},
      {"us", Dim::time, 1e-6},         {"ns", Dim::time, 1e-9},
      {"ps", Dim::time, 1e-12},        {"K", Dim::temperature, 1.0},
      {"mK", Dim::temperature, 1e-3},  {"Hz", Dim::frequency, 1.0},
      {"kHz", Dim::frequency, 1e3},    {"MHz", Dim::frequency, 1e6},
      {"GHz", Dim::frequency, 1e9},    {"THz", Dim::frequency, 1e12},
  };
  for (const Row& r : rows)
    if (suffix == r.name && dim == r.dim) return r.factor;
  return 0.0;
}

double parse_scalar(const std::string& value, Dim dim, const std::string& key,
                    const std::string& ctx) {
  const char* s = value.c_str();
  char* end = nullptr;
  const double x = std::strtod(s, &end);
  if (end == s)
    throw Error(ErrorCode::config, ctx + key + ": expected a number, got '" + value + "'");
  if (!std::isfinite(x)) throw Error(ErrorCode::config, ctx + key + ": value is not finite");
  const std::string suffix = trim(std::string(end));
  if (suffix.empty()) return x;
  const double f = unit_factor(suffix, dim);
  if (f == 0.0)
    throw Error(ErrorCode::config, ctx + key + ": unit '" + suffix + "' does not fit this key");
  return x * f;
}

long parse_int(const std::string& value, const std::string& key, const std::string& ctx) {
  const char* s = value.c_str();
  char* end = nullptr;
  const long x = std::strtol(s, &end, 10);
  if (end == s || !trim(std::string(end)).empty())
    throw Error(ErrorCode::config, ctx + key + ": expected an integer, got '" + value + "'");
  return x;
}

unsigned long long parse_u64(const std::string& value, const std::string& key,
                             const std::string& ctx) {
  const char* s = value.c_str();
  char* end = nullptr;
  const unsigned long long x = std::strtoull(s, &end, 10);
  if (end == s || !trim(std::string(end)).empty() || value.find('-') != std::string::npos)
    throw Error(ErrorCode::config,
                ctx + key + ": expected a nonnegative integer, got '" + value + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_scalar_list(const std::string& value, Dim dim, const std::string& key,
                                      const std::string& ctx) {
  std::vector<double> out;
  for (const std::string& item : split_list(value)) {
    if (item.empty()) throw Error(ErrorCode::config, ctx + key + ": empty list entry");
    out.push_back(parse_scalar(item, dim, key, ctx));
  }
  if (out.empty()) throw Error(ErrorCode::config, ctx + key + ": empty list");
  return out;
}

void assign_impl(RunConfig& cfg, const std::string& key, const std::string& value,
                 const std::string& ctx) {
  const auto num = [&](Dim dim) { return parse_scalar(value, dim, key, ctx); };

  if (key == "device.e_j") cfg.device.e_j = num(Dim::frequency);
  else if (key == "device.omega_c") cfg.device.omega_c = num(Dim::frequency);
  else if (key == "device.g") cfg.device.g = num(Dim::frequency);
  else if (key == "device.e_c_uev") cfg.device.e_c_uev = num(Dim::plain);
  else if (key == "device.gap_uev") cfg.device.gap_uev = num(Dim::plain);
  else if (key == "device.temperature") cfg.device.temperature = num(Dim::temperature);
  else if (key == "pulse.amplitude") cfg.pulse.amplitude = num(Dim::plain);
  else if (key == "pulse.nu") cfg.pulse.nu = num(Dim::frequency);
  else if (key == "pulse.phi") cfg.pulse.phi = num(Dim::plain);
  else if (key == "pulse.t_on") cfg.pulse.t_on = num(Dim::time);
  else if (key == "pulse.t_off") cfg.pulse.t_off = num(Dim::time);
  else if (key == "pulse.mode") {
    if (value == "literal_complex") cfg.pulse.mode = PulseMode::literal_complex;
    else if (value == "hermitized") cfg.pulse.mode = PulseMode::hermitized;
    else
      throw Error(ErrorCode::config,
                  ctx + key + ": expected literal_complex or hermitized, got '" + value + "'");
  } else if (key == "bath.beta") cfg.bath.beta = num(Dim::plain);
  else if (key == "bath.temperature") cfg.bath.temperature = num(Dim::temperature);
  else if (key == "bath.tau_kappa") cfg.bath.tau_kappa = num(Dim::time);
  else if (key == "layout.n_qubits") cfg.layout.n_qubits = int(parse_int(value, key, ctx));
  else if (key == "layout.fock_dim") cfg.layout.fock_dim = int(parse_int(value, key, ctx));
  else if (key == "protocol.alpha") cfg.protocol.alpha = num(Dim::plain);
  else if (key == "protocol.n") cfg.protocol.n = int(parse_int(value, key, ctx));
  else if (key == "protocol.duration") cfg.protocol.duration = num(Dim::time);
  else if (key == "protocol.delta_t_m") cfg.protocol.delta_t_m = num(Dim::time);
  else if (key == "protocol.seed") cfg.protocol.seed = parse_u64(value, key, ctx);
  else if (key == "protocol.samples") cfg.protocol.samples = int(parse_int(value, key, ctx));
  else if (key == "protocol.t_max") cfg.protocol.t_max = num(Dim::time);
  else if (key == "protocol.x_max") cfg.protocol.x_max = num(Dim::plain);
  else if (key == "protocol.nu")
    cfg.protocol.nu = parse_scalar_list(value, Dim::frequency, key, ctx);
  else if (key == "protocol.temperatures")
    cfg.protocol.temperatures = parse_scalar_list(value, Dim::temperature, key, ctx);
  else if (key == "target.im_theta") cfg.target_im_theta = num(Dim::plain);
  else if (key == "sweep.key") cfg.sweep.key = value;
  else if (key == "sweep.values") {
    cfg.sweep.values = split_list(value);
    for (const std::string& v : cfg.sweep.values)
      if (v.empty()) throw Error(ErrorCode::config, ctx + key + ": empty list entry");
    if (cfg.sweep.values.empty()) throw Error(ErrorCode::config, ctx + key + ": empty list");
  } else if (key == "output.path") cfg.out_path = value;
  else
    throw Error(ErrorCode::config, ctx + "unknown key '" + key + "'");
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string g17_list(const std::vector<double>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += g17(xs[i]);
  }
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  long lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string ctx = "line " + std::to_string(lineno) + ": ";
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::config, ctx + "expected 'section.key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos)
      throw Error(ErrorCode::config, ctx + "key '" + key + "' is missing its section");
    if (value.empty()) throw Error(ErrorCode::config, ctx + key + ": empty value");
    if (!seen.insert(key).second)
      throw Error(ErrorCode::config, ctx + "key '" + key + "' appears twice");
    assign_impl(cfg, key, value, ctx);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void assign_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  assign_impl(cfg, key, trim(value), "");
}

bool config_key_is_scalar(const std::string& key) {
  static const std::set<std::string> scalars = {
      "device.e_j",        "device.omega_c",     "device.g",
      "device.e_c_uev",    "device.gap_uev",     "device.temperature",
      "pulse.amplitude",   "pulse.nu",           "pulse.phi",
      "pulse.t_on",        "pulse.t_off",        "bath.beta",
      "bath.temperature",  "bath.tau_kappa",     "layout.n_qubits",
      "layout.fock_dim",   "protocol.alpha",     "protocol.n",
      "protocol.duration", "protocol.delta_t_m", "protocol.seed",
      "protocol.samples",  "protocol.t_max",     "protocol.x_max",
      "target.im_theta",
  };
  return scalars.count(key) > 0;
}

double config_scalar_value(const RunConfig& cfg, const std::string& key) {
  if (key == "device.e_j") return cfg.device.e_j;
  if (key == "device.omega_c") return cfg.device.omega_c;
  if (key == "device.g") return cfg.device.g;
  if (key == "device.e_c_uev") return cfg.device.e_c_uev;
  if (key == "device.gap_uev") return cfg.device.gap_uev;
  if (key == "device.temperature") return cfg.device.temperature;
  if (key == "pulse.amplitude") return cfg.pulse.amplitude;
  if (key == "pulse.nu") return cfg.pulse.nu;
  if (key == "pulse.phi") return cfg.pulse.phi;
  if (key == "pulse.t_on") return cfg.pulse.t_on;
  if (key == "pulse.t_off") return cfg.pulse.t_off;
  if (key == "bath.beta") return cfg.bath.beta;
  if (key == "bath.temperature") return cfg.bath.temperature;
  if (key == "bath.tau_kappa") return cfg.bath.tau_kappa;
  if (key == "layout.n_qubits") return cfg.layout.n_qubits;
  if (key == "layout.fock_dim") return cfg.layout.fock_dim;
  if (key == "protocol.alpha") return cfg.protocol.alpha;
  if (key == "protocol.n") return cfg.protocol.n;
  if (key == "protocol.duration") return cfg.protocol.duration;
  if (key == "protocol.delta_t_m") return cfg.protocol.delta_t_m;
  if (key == "protocol.seed") return double(cfg.protocol.seed);
  if (key == "protocol.samples") return cfg.protocol.samples;
  if (key == "protocol.t_max") return cfg.protocol.t_max;
  if (key == "protocol.x_max") return cfg.protocol.x_max;
  if (key == "target.im_theta") return cfg.target_im_theta;
  throw Error(ErrorCode::config, "'" + key + "' is not a scalar key");
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  const auto put = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  put("device.e_j", g17(cfg.device.e_j));
  put("device.omega_c", g17(cfg.device.omega_c));
  put("device.g", g17(cfg.device.g));
  put("device.e_c_uev", g17(cfg.device.e_c_uev));
  put("device.gap_uev", g17(cfg.device.gap_uev));
  put("device.temperature", g17(cfg.device.temperature));
  put("pulse.amplitude", g17(cfg.pulse.amplitude));
  put("pulse.nu", g17(cfg.pulse.nu));
  put("pulse.phi", g17(cfg.pulse.phi));
  put("pulse.t_on", g17(cfg.pulse.t_on));
  put("pulse.t_off", g17(cfg.pulse.t_off));
  put("pulse.mode",
      cfg.pulse.mode == PulseMode::literal_complex ? "literal_complex" : "hermitized");
  put("bath.beta", g17(cfg.bath.beta));
  put("bath.temperature", g17(cfg.bath.temperature));
  put("bath.tau_kappa", g17(cfg.bath.tau_kappa));
  put("layout.n_qubits", std::to_string(cfg.layout.n_qubits));
  put("layout.fock_dim", std::to_string(cfg.layout.fock_dim));
  put("protocol.alpha", g17(cfg.protocol.alpha));
  put("protocol.n", std::to_string(cfg.protocol.n));
  put("protocol.duration", g17(cfg.protocol.duration));
  put("protocol.delta_t_m", g17(cfg.protocol.delta_t_m));
  put("protocol.seed", std::to_string(cfg.protocol.seed));
  put("protocol.samples", std::to_string(cfg.protocol.samples));
  put("protocol.t_max", g17(cfg.protocol.t_max));
  put("protocol.x_max", g17(cfg.protocol.x_max));
  if (!cfg.protocol.nu.empty()) put("protocol.nu", g17_list(cfg.protocol.nu));
  if (!cfg.protocol.temperatures.empty())
    put("protocol.temperatures", g17_list(cfg.protocol.temperatures));
  put("target.im_theta", g17(cfg.target_im_theta));
  if (!cfg.sweep.key.empty()) put("sweep.key", cfg.sweep.key);
  if (!cfg.sweep.values.empty()) {
    std::string joined;
    for (size_t i = 0; i < cfg.sweep.values.size(); ++i) {
      if (i) joined += ", ";
      joined += cfg.sweep.values[i];
    }
    put("sweep.values", joined);
  }
  if (!cfg.out_path.empty()) put("output.path", cfg.out_path);
  return out;
}

}  // namespace catline
