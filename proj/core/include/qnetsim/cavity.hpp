#pragma once

#include <complex>

#include "qnetsim/errors.hpp"

// Spin-dependent cavity reflection spectra. All rates are FWHM scalars in Hz;
// no 2*pi bookkeeping anywhere in this module.
namespace qnetsim::cavity {

enum class ElectronSpin { down, up };

struct CavityParams {
  double g_hz = 0;           // single-photon coupling
  double kappa_in_hz = 0;    // in-coupling port rate
  double kappa_tot_hz = 0;   // total cavity decay rate
  double gamma_hz = 0;       // bare emitter linewidth
  double omega_cavity_hz = 0;
  double omega_siv_up_hz = 0;    // spin-conserving transition, |up> manifold
  double omega_siv_down_hz = 0;  // spin-conserving transition, |down> manifold

  void validate() const {
    if (!(kappa_in_hz > 0) || kappa_in_hz > kappa_tot_hz)
      throw InvariantError("require 0 < kappa_in <= kappa_tot");
    if (!(gamma_hz > 0)) throw InvariantError("require gamma > 0");
    if (g_hz < 0) throw InvariantError("require g >= 0");
  }
};

// Complex reflectivities of the two electron states at the operating point.
// r_high belongs to the reflective state, r_low to the nominally dark one.
struct SpinReflectivities {
  std::complex<double> r_high{1.0, 0.0};
  std::complex<double> r_low{0.0, 0.0};
  double operating_frequency_hz = 0;
  ElectronSpin high_spin = ElectronSpin::up;

  void validate() const {
    if (std::abs(r_high) > 1.0 + 1e-9 || std::abs(r_low) > 1.0 + 1e-9)
      throw InvariantError("reflectivity magnitude exceeds 1");
  }
};

std::complex<double> reflection_amplitude(const CavityParams& params, double omega_hz,
                                          ElectronSpin spin);

// C = 4 g^2 / (kappa_tot * gamma)
double cooperativity(const CavityParams& params);

struct FrequencyScan {
  double lo_hz = 0;
  double hi_hz = 0;
  int points = 2001;
};

struct ContrastPoint {
  double omega_hz = 0;
  double contrast = 1.0;          // |r_high|^2 / |r_low|^2 at omega, >= 1
  ElectronSpin high_spin = ElectronSpin::up;
};

// Coarse grid argmax of the reflectance contrast followed by golden-section
// refinement; ties break to the lowest frequency.
ContrastPoint max_contrast_frequency(const CavityParams& params, const FrequencyScan& scan);

SpinReflectivities reflectivities_at(const CavityParams& params, double omega_hz);

}  // namespace qnetsim::cavity
