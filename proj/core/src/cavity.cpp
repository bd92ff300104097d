#include "qnetsim/cavity.hpp"

#include <cmath>
#include <vector>

namespace qnetsim::cavity {

std::complex<double> reflection_amplitude(const CavityParams& params, double omega_hz,
                                          ElectronSpin spin) {
  params.validate();
  const std::complex<double> i(0.0, 1.0);
  const double omega_siv =
      spin == ElectronSpin::up ? params.omega_siv_up_hz : params.omega_siv_down_hz;
  const std::complex<double> emitter =
      params.g_hz * params.g_hz / (i * (omega_hz - omega_siv) + params.gamma_hz / 2.0);
  return 1.0 - params.kappa_in_hz /
                   (i * (omega_hz - params.omega_cavity_hz) + params.kappa_tot_hz / 2.0 + emitter);
}

double cooperativity(const CavityParams& params) {
  params.validate();
  return 4.0 * params.g_hz * params.g_hz / (params.kappa_tot_hz * params.gamma_hz);
}

namespace {

// |r_up|^2 / |r_dn|^2 or its inverse, whichever is >= 1.
double contrast_at(const CavityParams& params, double omega_hz, ElectronSpin* high) {
  const double up = std::norm(reflection_amplitude(params, omega_hz, ElectronSpin::up));
  const double dn = std::norm(reflection_amplitude(params, omega_hz, ElectronSpin::down));
  if (up >= dn) {
    if (high) *high = ElectronSpin::up;
    return dn > 0 ? up / dn : std::numeric_limits<double>::infinity();
  }
  if (high) *high = ElectronSpin::down;
  return up > 0 ? dn / up : std::numeric_limits<double>::infinity();
}

double golden_maximize(const CavityParams& params, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = contrast_at(params, c, nullptr);
  double fd = contrast_at(params, d, nullptr);
  for (int it = 0; it < 200 && (b - a) > 1e-9 * std::max(1.0, std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = contrast_at(params, c, nullptr);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = contrast_at(params, d, nullptr);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace

ContrastPoint max_contrast_frequency(const CavityParams& params, const FrequencyScan& scan) {
  if (!(scan.hi_hz > scan.lo_hz) || scan.points < 2) {
    throw InvariantError("empty frequency scan range");
  }
  const double step = (scan.hi_hz - scan.lo_hz) / (scan.points - 1);
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < scan.points; ++k) {
    const double omega = scan.lo_hz + k * step;
    const double value = contrast_at(params, omega, nullptr);
    if (value > best_value + 1e-15 * best_value) {  // strict improvement: ties keep lowest omega
      best_value = value;
      best = k;
    }
  }
  const double lo = scan.lo_hz + std::max(0, best - 1) * step;
  const double hi = scan.lo_hz + std::min(scan.points - 1, best + 1) * step;
  const double omega_star = golden_maximize(params, lo, hi);

  ContrastPoint point;
  point.omega_hz = omega_star;
  point.contrast = contrast_at(params, omega_star, &point.high_spin);
  return point;
}

SpinReflectivities reflectivities_at(const CavityParams& params, double omega_hz) {
  const auto r_up = reflection_amplitude(params, omega_hz, ElectronSpin::up);
  const auto r_dn = reflection_amplitude(params, omega_hz, ElectronSpin::down);
  SpinReflectivities refl;
  refl.operating_frequency_hz = omega_hz;
  if (std::abs(r_up) >= std::abs(r_dn)) {
    refl.r_high = r_up;
    refl.r_low = r_dn;
    refl.high_spin = ElectronSpin::up;
  } else {
    refl.r_high = r_dn;
    refl.r_low = r_up;
    refl.high_spin = ElectronSpin::down;
  }
  refl.validate();
  return refl;
}

}  // namespace qnetsim::cavity
