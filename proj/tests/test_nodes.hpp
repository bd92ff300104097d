#pragma once

// Shared device parameters for tests: the shipped node calibrations
// (fitted to the measured cooperativities, reflectances and contrasts).
#include "qnetsim/cavity.hpp"

namespace testnodes {

inline qnetsim::cavity::CavityParams node_a() {
  qnetsim::cavity::CavityParams p;
  p.g_hz = 2.584924e9;
  p.kappa_in_hz = 10.436115e9;
  p.kappa_tot_hz = 15.688872e9;
  p.gamma_hz = 0.137949e9;
  p.omega_cavity_hz = 406642.390407e9;
  p.omega_siv_up_hz = 406640.0e9;
  p.omega_siv_down_hz = 406631.229037e9;
  return p;
}

inline qnetsim::cavity::FrequencyScan node_a_scan() {
  return {406625.0e9, 406645.0e9, 2001};
}

inline qnetsim::cavity::CavityParams node_b() {
  qnetsim::cavity::CavityParams p;
  p.g_hz = 4.185997e9;
  p.kappa_in_hz = 42.972528e9;
  p.kappa_tot_hz = 52.0e9;
  p.gamma_hz = 0.898594e9;
  p.omega_cavity_hz = 406628.248410e9;
  p.omega_siv_up_hz = 406650.915017e9;
  p.omega_siv_down_hz = 406642.759673e9;
  return p;
}

inline double node_b_operating_hz() { return 406643.675e9; }

}  // namespace testnodes
