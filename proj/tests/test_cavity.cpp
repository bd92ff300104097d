#include <doctest.h>

#include <cmath>
#include <complex>

#include "qnetsim/cavity.hpp"
#include "test_nodes.hpp"

using namespace qnetsim;
using cavity::CavityParams;
using cavity::ElectronSpin;
using cavity::FrequencyScan;

namespace {

CavityParams bare_cavity(double kappa_in, double kappa_tot) {
  CavityParams p;
  p.g_hz = 0;
  p.kappa_in_hz = kappa_in;
  p.kappa_tot_hz = kappa_tot;
  p.gamma_hz = 0.1e9;
  p.omega_cavity_hz = 0;
  p.omega_siv_up_hz = 50e9;
  p.omega_siv_down_hz = -50e9;
  return p;
}

}  // namespace

TEST_CASE("fully overcoupled bare cavity reflects with a pi phase on resonance") {
  const auto r = cavity::reflection_amplitude(bare_cavity(1e9, 1e9), 0.0, ElectronSpin::up);
  CHECK(std::abs(r - std::complex<double>(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("critically coupled bare cavity reflects nothing on resonance") {
  const auto r = cavity::reflection_amplitude(bare_cavity(0.5e9, 1e9), 0.0, ElectronSpin::up);
  CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("node A reproduces the shipped reflectance at max contrast") {
  const auto params = testnodes::node_a();
  const auto point = cavity::max_contrast_frequency(params, testnodes::node_a_scan());
  const auto refl = cavity::reflectivities_at(params, point.omega_hz);
  CHECK(std::norm(refl.r_high) == doctest::Approx(0.70).epsilon(0.02));
  // Frequency-scan oracle: no scanned point beats the refined contrast.
  const auto scan = testnodes::node_a_scan();
  const double step = (scan.hi_hz - scan.lo_hz) / (scan.points - 1);
  for (int k = 0; k < scan.points; ++k) {
    const double w = scan.lo_hz + k * step;
    const double up = std::norm(cavity::reflection_amplitude(params, w, ElectronSpin::up));
    const double dn = std::norm(cavity::reflection_amplitude(params, w, ElectronSpin::down));
    CHECK(std::max(up / dn, dn / up) <= point.contrast * (1 + 1e-6));
  }
}

TEST_CASE("cooperativity matches the shipped node values") {
  CavityParams zero = testnodes::node_a();
  zero.g_hz = 0;
  CHECK(cavity::cooperativity(zero) == 0.0);
  CHECK(cavity::cooperativity(testnodes::node_a()) == doctest::Approx(12.4).epsilon(0.01));
  CHECK(cavity::cooperativity(testnodes::node_b()) == doctest::Approx(1.5).epsilon(0.01));
}

TEST_CASE("node A passes the 1:16 contrast pre-selection threshold") {
  const auto point =
      cavity::max_contrast_frequency(testnodes::node_a(), testnodes::node_a_scan());
  CHECK(point.contrast >= 16.0);
}

TEST_CASE("grid argmax agrees with golden-section refinement within one step") {
  const auto params = testnodes::node_a();
  const FrequencyScan coarse = testnodes::node_a_scan();
  const double step = (coarse.hi_hz - coarse.lo_hz) / (coarse.points - 1);

  // Dense-grid oracle.
  FrequencyScan dense = coarse;
  dense.points = 40001;
  const auto refined = cavity::max_contrast_frequency(params, coarse);
  const auto oracle = cavity::max_contrast_frequency(params, dense);
  CHECK(std::abs(refined.omega_hz - oracle.omega_hz) <= step);
}

TEST_CASE("empty scan range is rejected") {
  CHECK_THROWS_AS(cavity::max_contrast_frequency(testnodes::node_a(), {1e9, 1e9, 100}),
                  InvariantError);
}

TEST_CASE("passivity: |r| <= 1 over the whole scan for kappa_in <= kappa_tot") {
  for (const auto& params : {testnodes::node_a(), testnodes::node_b()}) {
    for (int k = 0; k <= 400; ++k) {
      const double w = 406560e9 + k * 0.4e9;
      CHECK(std::abs(cavity::reflection_amplitude(params, w, ElectronSpin::up)) <= 1 + 1e-9);
      CHECK(std::abs(cavity::reflection_amplitude(params, w, ElectronSpin::down)) <= 1 + 1e-9);
    }
  }
}

TEST_CASE("g=0 collapses to the bare-cavity Lorentzian") {
  CavityParams params = testnodes::node_a();
  params.g_hz = 0;
  for (int k = -100; k <= 100; ++k) {
    const double w = params.omega_cavity_hz + k * 0.2e9;
    const std::complex<double> i(0, 1);
    const std::complex<double> bare =
        1.0 - params.kappa_in_hz /
                  (i * (w - params.omega_cavity_hz) + params.kappa_tot_hz / 2.0);
    CHECK(std::abs(cavity::reflection_amplitude(params, w, ElectronSpin::up) - bare) < 1e-12);
  }
}

TEST_CASE("large detuning recovers the g=0 spectrum") {
  CavityParams params = testnodes::node_a();
  // Probe far from both spin transitions.
  const double w = params.omega_siv_up_hz + 5e15;
  CavityParams bare = params;
  bare.g_hz = 0;
  const auto with_g = cavity::reflection_amplitude(params, w, ElectronSpin::up);
  const auto without = cavity::reflection_amplitude(bare, w, ElectronSpin::up);
  CHECK(std::abs(with_g - without) / std::abs(without) < 1e-6);
}

TEST_CASE("higher cooperativity gives a darker dark state at the operating point") {
  const auto point_a =
      cavity::max_contrast_frequency(testnodes::node_a(), testnodes::node_a_scan());
  const auto refl_a = cavity::reflectivities_at(testnodes::node_a(), point_a.omega_hz);
  const auto refl_b =
      cavity::reflectivities_at(testnodes::node_b(), testnodes::node_b_operating_hz());
  CHECK(std::abs(refl_a.r_low) < std::abs(refl_b.r_low));
}

TEST_CASE("mirror-symmetric toy spectrum has argmax points symmetric about the midpoint") {
  // Two transitions split symmetrically about the cavity: the max-ratio
  // contrast is mirror symmetric, so the argmax pair straddles the midpoint.
  CavityParams toy;
  toy.g_hz = 2e9;
  toy.kappa_in_hz = 8e9;
  toy.kappa_tot_hz = 10e9;
  toy.gamma_hz = 0.2e9;
  toy.omega_cavity_hz = 0;
  toy.omega_siv_up_hz = 3e9;
  toy.omega_siv_down_hz = -3e9;
  const auto left = cavity::max_contrast_frequency(toy, {-20e9, 0.0, 4001});
  const auto right = cavity::max_contrast_frequency(toy, {0.0, 20e9, 4001});
  const double step = 20e9 / 4000;
  CHECK(std::abs(left.omega_hz + right.omega_hz) < 2 * step);
  // Tie-break on the full range: the lower-frequency twin wins.
  const auto full = cavity::max_contrast_frequency(toy, {-20e9, 20e9, 8001});
  CHECK(std::abs(full.omega_hz - left.omega_hz) < 2 * step);
}

TEST_CASE("shipped node B operating point matches its calibration") {
  const auto refl =
      cavity::reflectivities_at(testnodes::node_b(), testnodes::node_b_operating_hz());
  CHECK(std::norm(refl.r_high) == doctest::Approx(0.60).epsilon(0.01));
  CHECK(std::abs(refl.r_low) == doctest::Approx(0.28).epsilon(0.01));
  CHECK(std::abs(std::arg(refl.r_low)) == doctest::Approx(M_PI).epsilon(0.01));
}

TEST_CASE("parameter validation") {
  CavityParams bad = testnodes::node_a();
  bad.kappa_in_hz = bad.kappa_tot_hz * 1.5;
  CHECK_THROWS_AS(cavity::reflection_amplitude(bad, 0, ElectronSpin::up), InvariantError);
  bad = testnodes::node_a();
  bad.gamma_hz = 0;
  CHECK_THROWS_AS(cavity::cooperativity(bad), InvariantError);
}
