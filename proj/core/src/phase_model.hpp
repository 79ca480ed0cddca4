#pragma once

// Internal: harmonic representation of the driven qubit frequency and its
// running integral. Not installed.

#include <cmath>
#include <vector>

#include "catline/device.hpp"
#include "catline/errors.hpp"

namespace catline::detail {

// nu_a(tau) = sum_m C_m e^{i m u}, u = nu (tau) + phi, m even. The literal
// drive keeps only m >= 0; the hermitized one is symmetric with real C_m.
struct PhaseModel {
  double nu = 0.0;
  double phi = 0.0;
  double omega_c = 0.0;
  std::vector<int> m;          // harmonic indices
  std::vector<complexd> c;     // same order as m

  PhaseModel(const DeviceParams& params, const FluxPulse& pulse, CosExpansion expansion) {
    nu = pulse.nu;
    phi = pulse.phi;
    omega_c = params.omega_c;
    const double chi = pi * pulse.amplitude / 2.0;
    const double ej = params.e_j;
    if (pulse.mode == PulseMode::literal_complex) {
      if (expansion == CosExpansion::quadratic) {
        m = {0, 2};
        c = {complexd(ej, 0.0), complexd(-ej * chi * chi / 2.0, 0.0)};
      } else {
        double term = ej;
        for (int k = 0; std::abs(term) > 1e-18 * ej || k < 2; ++k) {
          m.push_back(2 * k);
          c.push_back(complexd(term, 0.0));
          term *= -chi * chi / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
          if (k > 24) break;
        }
      }
    } else {
      if (expansion == CosExpansion::quadratic) {
        m = {-2, 0, 2};
        const double side = -ej * chi * chi / 8.0;
        c = {complexd(side, 0.0), complexd(ej * (1.0 - chi * chi / 4.0), 0.0),
             complexd(side, 0.0)};
      } else {
        m.push_back(0);
        c.push_back(complexd(ej * std::cyl_bessel_j(0, chi), 0.0));
        for (int k = 1; k <= 16; ++k) {
          const double coeff = ej * ((k % 2) ? -1.0 : 1.0) * std::cyl_bessel_j(2 * k, chi);
          if (std::abs(coeff) < 1e-18 * ej && k > 2) break;
          m.push_back(2 * k);
          c.push_back(complexd(coeff, 0.0));
          m.insert(m.begin(), -2 * k);
          c.insert(c.begin(), complexd(coeff, 0.0));
        }
      }
    }
  }

  double c0() const {
    for (size_t i = 0; i < m.size(); ++i)
      if (m[i] == 0) return c[i].real();
    return 0.0;
  }

  double u_of(double tau) const { return nu * tau + phi; }

  // d^r nu_a / d tau^r expressed through the drive phase u alone.
  complexd nu_a_at_u(double u, int order) const {
    complexd out = 0.0;
    for (size_t i = 0; i < m.size(); ++i) {
      complexd factor = 1.0;
      for (int r = 0; r < order; ++r) factor *= complexd(0.0, m[i] * nu);
      out += c[i] * factor * std::exp(complexd(0.0, m[i] * u));
    }
    return out;
  }

  complexd nu_a(double tau) const { return nu_a_at_u(u_of(tau), 0); }

  // N(tau) = int_0^tau nu_a
  complexd n_integral(double tau) const {
    const double u = u_of(tau);
    complexd out = 0.0;
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) {
        out += c[i] * tau;
      } else {
        const complexd imnu(0.0, m[i] * nu);
        out += c[i] * (std::exp(complexd(0.0, m[i] * u)) - std::exp(complexd(0.0, m[i] * phi))) /
               imnu;
      }
    }
    return out;
  }

  complexd lambda(double tau) const { return n_integral(tau) - omega_c * tau; }
};

}  // namespace catline::detail
