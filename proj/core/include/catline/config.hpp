#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "catline/device.hpp"
#include "catline/dissipation.hpp"
#include "catline/fock.hpp"

namespace catline {

// Run-level knobs that do not belong to a physical record: the field
// amplitude, qubit count, protocol window, readout gap, RNG seed, and the
// sampling grids used by the figure series.
struct ProtocolConfig {
  double alpha = std::sqrt(0.4);
  int n = 1;
  double duration = 62.5e-9;  // s
  double delta_t_m = 10e-9;   // s, gap between the generator pulse and the copy
  unsigned long long seed = 1;
  int samples = 256;
  double t_max = 0.0;  // s; 0 picks the figure's own default span
  double x_max = 1.2;  // sequential probe grid end, in units of tau_kappa
  std::vector<double> nu;            // extra drive frequencies for the theta figures
  std::vector<double> temperatures;  // extra bath temperatures for the decay figure
};

// One swept key and its raw value strings; each value is re-parsed with the
// key's own unit rules.
struct SweepConfig {
  std::string key;
  std::vector<std::string> values;
};

struct RunConfig {
  DeviceParams device;
  FluxPulse pulse;
  BathParams bath;
  SpaceLayout layout{1, 32};
  ProtocolConfig protocol;
  double target_im_theta = pi;  // calibration target, rad
  SweepConfig sweep;
  std::string out_path;
};

// Flat `section.key = value` text. `#` starts a comment, blank lines are
// skipped, unknown or repeated keys are rejected. Scalar values accept a unit
// suffix checked against the key's dimension: s/ms/us/ns/ps for times, K/mK
// for temperatures, Hz/kHz/MHz/GHz/THz for frequencies (read as angular
// rad/s, only the SI prefix scales). Lists are comma-separated.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Single-key assignment with the same rules; used by sweep workers.
void assign_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

// True when the key holds one number (the only kind sweep can vary).
bool config_key_is_scalar(const std::string& key);

// Current value of a scalar key, in SI units.
double config_scalar_value(const RunConfig& cfg, const std::string& key);

// Canonical form: every known key, fixed order, SI values at 17 significant
// digits. Parsing the result reproduces the record exactly.
std::string serialize_config(const RunConfig& cfg);

}  // namespace catline
