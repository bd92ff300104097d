#include <doctest.h>

#include <cmath>
#include <complex>

#include "qnetsim/bessel.hpp"
#include "qnetsim/photonlink.hpp"
#include "qnetsim/rng.hpp"

using namespace qnetsim;
using photonlink::ControllerParams;
using photonlink::DriftParams;
using photonlink::FiberSegment;
using photonlink::FrequencyShifter;
using photonlink::LinkBudget;
using photonlink::PolarizationState;

TEST_CASE("bessel_j matches the standard library implementation to 1e-10") {
  for (int k = 0; k <= 40; ++k) {
    for (double x = 0.0; x <= 10.0; x += 0.37) {
      CHECK(std::abs(bessel_j(k, x) - std::cyl_bessel_j(k, x)) < 1e-10);
    }
  }
  // Negative order and argument symmetries.
  CHECK(bessel_j(-3, 1.7) == doctest::Approx(-bessel_j(3, 1.7)).epsilon(1e-12));
  CHECK(bessel_j(2, -1.7) == doctest::Approx(bessel_j(2, 1.7)).epsilon(1e-12));
  CHECK(bessel_j(3, -1.7) == doctest::Approx(-bessel_j(3, 1.7)).epsilon(1e-12));
}

TEST_CASE("bessel normalization sum_k J_k^2 = 1 for modulation indices in [0,5]") {
  for (double x = 0.0; x <= 5.0; x += 0.5) {
    double sum = bessel_j(0, x) * bessel_j(0, x);
    for (int k = 1; k <= 40; ++k) sum += 2.0 * bessel_j(k, x) * bessel_j(k, x);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("sideband occupancy at zero drive") {
  FrequencyShifter off;
  off.modulation_index = 0.0;
  off.harmonic = 1;
  CHECK(photonlink::sideband_occupancy(off) == doctest::Approx(0.0));
  // k=0 of an undriven modulator keeps all the power.
  CHECK(bessel_j(0, 0.0) == doctest::Approx(1.0));
  off.harmonic = 0;
  CHECK_THROWS_AS(photonlink::sideband_occupancy(off), InvariantError);
}

TEST_CASE("k=1 occupancy is maximized near modulation index 1.8412 at 0.3386") {
  FrequencyShifter shifter;
  shifter.harmonic = 1;
  // Numeric Bessel-max oracle on a fine grid.
  double best_x = 0, best = -1;
  for (double x = 1.5; x <= 2.2; x += 1e-4) {
    const double j = bessel_j(1, x);
    if (j * j > best) {
      best = j * j;
      best_x = x;
    }
  }
  CHECK(best_x == doctest::Approx(1.8412).epsilon(1e-3));
  CHECK(best == doctest::Approx(0.3386).epsilon(1e-3));
  shifter.modulation_index = best_x;
  CHECK(photonlink::sideband_occupancy(shifter) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("shifter efficiency composes occupancy and insertion losses") {
  FrequencyShifter shifter;  // defaults: index 1.8412, 50% EOM, 40% filter
  const double eff = photonlink::shifter_efficiency(shifter);
  CHECK(eff > 0.065);
  CHECK(eff < 0.075);

  shifter.filter_transmission = 0.0;
  CHECK(photonlink::shifter_efficiency(shifter) == 0.0);

  shifter.filter_transmission = 0.4;
  shifter.modulation_index = 1.0;
  CHECK(photonlink::shifter_efficiency(shifter) ==
        doctest::Approx(bessel_j(1, 1.0) * bessel_j(1, 1.0) * 0.5 * 0.4).epsilon(1e-12));
}

TEST_CASE("fiber transmission examples") {
  CHECK(photonlink::fiber_transmission({0.0, 0.3, 0.0}) == doctest::Approx(1.0));
  CHECK(photonlink::fiber_transmission({40.0, 0.3, 0.0}) ==
        doctest::Approx(std::pow(10.0, -1.2)).epsilon(1e-12));
  // Deployed loop: 35 km at 17 dB total.
  CHECK(photonlink::fiber_transmission({35.0, 0.3, 6.5}) ==
        doctest::Approx(0.02).epsilon(0.01));
}

TEST_CASE("fiber transmission is multiplicative over concatenation") {
  const FiberSegment a{12.5, 0.31, 0.7};
  const FiberSegment b{27.5, 0.29, 1.1};
  const FiberSegment joined{0.0, 0.0, 12.5 * 0.31 + 0.7 + 27.5 * 0.29 + 1.1};
  CHECK(photonlink::fiber_transmission(a) * photonlink::fiber_transmission(b) ==
        doctest::Approx(photonlink::fiber_transmission(joined)).epsilon(1e-12));
}

namespace {

LinkBudget table_budget(double conversion) {
  LinkBudget b;
  b.entries = {{"fiber_coupling_a", 0.6, false}, {"fiber_coupling_b", 0.6, true},
               {"cavity_reflectance_a", 0.7, false}, {"cavity_reflectance_b", 0.6, false},
               {"node_a_free_space", 0.7, false}, {"conversion", conversion, false},
               {"circulator", 0.7, true}, {"snspd", 0.875, false}};
  return b;
}

}  // namespace

TEST_CASE("shipped budgets reproduce the published link efficiencies and etas") {
  const LinkBudget visible = table_budget(0.074);
  const LinkBudget telecom = table_budget(0.054);
  CHECK(visible.product() == doctest::Approx(0.0020).epsilon(0.10));
  CHECK(telecom.product() == doctest::Approx(0.0015).epsilon(0.10));
  CHECK(photonlink::link_success_probability(visible, 1, 0.1) ==
        doctest::Approx(5.0e-5).epsilon(0.10));
  CHECK(photonlink::link_success_probability(telecom, 1, 0.1) ==
        doctest::Approx(3.7e-5).epsilon(0.10));
}

TEST_CASE("all-unit budget with no gates and mu=1 gives probability 1") {
  LinkBudget b;
  b.entries = {{"only", 1.0, false}};
  CHECK(photonlink::link_success_probability(b, 0, 2.0) == doctest::Approx(1.0));
  CHECK(b.product() == 1.0);
}

TEST_CASE("budget products stay within [0,1] for random fraction entries") {
  Rng rng(3);
  for (int round = 0; round < 50; ++round) {
    LinkBudget b;
    for (int i = 0; i < 6; ++i)
      b.entries.push_back({"e" + std::to_string(i), 0.05 + 0.95 * rng.uniform(), i % 2 == 0});
    const double p = b.product();
    CHECK(p > 0);
    CHECK(p <= 1.0);
    const double eta = photonlink::link_success_probability(b, 2, rng.uniform());
    CHECK(eta >= 0);
    CHECK(eta <= 1.0);
  }
}

TEST_CASE("dop cost examples") {
  CHECK(photonlink::dop_cost({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(photonlink::dop_cost({M_PI / 4, 0.0}) ==
        doctest::Approx(std::abs(std::cos(M_PI / 4) - 1.0)).epsilon(1e-12));
  // Even in both angles.
  CHECK(photonlink::dop_cost({0.2, -0.7}) == doctest::Approx(photonlink::dop_cost({-0.2, 0.7})));
}

TEST_CASE("polarization penalty matches the Jones-vector overlap oracle") {
  CHECK(photonlink::conversion_polarization_penalty({0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(photonlink::conversion_polarization_penalty({0.0, M_PI / 2}) ==
        doctest::Approx(0.0).epsilon(1e-9));
  Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    const double chi = (rng.uniform() - 0.5) * M_PI / 2;
    const double psi = (rng.uniform() - 0.5) * M_PI;
    // Jones vector (cos chi, i sin chi) rotated by psi, overlapped with (1,0).
    const std::complex<double> jx =
        std::cos(psi) * std::cos(chi) -
        std::complex<double>(0, 1) * std::sin(psi) * std::sin(chi);
    const double oracle = std::norm(jx);
    CHECK(photonlink::conversion_polarization_penalty({chi, psi}) ==
          doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("stabilizer at the lock point does zero iterations") {
  const auto trace = photonlink::stabilize_polarization({0.0, 0.0}, {}, {}, 1);
  CHECK(trace.converged);
  CHECK(trace.steps.size() == 1);
}

TEST_CASE("stabilizer converges from (0.3, 0.8) within 200 iterations without drift") {
  const auto trace = photonlink::stabilize_polarization({0.3, 0.8}, {}, {}, 12345);
  CHECK(trace.converged);
  CHECK(trace.steps.size() <= 201);
  CHECK(trace.steps.back().cost < 1e-3);
  // Descent property: accepted steps never increase the cost.
  for (std::size_t i = 1; i < trace.steps.size(); ++i) {
    CHECK(trace.steps[i].cost <= trace.steps[i - 1].cost + 1e-15);
  }
}

TEST_CASE("stabilizer holds steady-state cost below 0.05 under default drift") {
  DriftParams drift;
  drift.enabled = true;
  ControllerParams controller;
  controller.max_iterations = 10000;
  const auto trace = photonlink::stabilize_polarization({0.2, 0.5}, drift, controller, 777);
  double worst = 0;
  for (std::size_t i = 200; i < trace.steps.size(); ++i)
    worst = std::max(worst, trace.steps[i].cost);
  CHECK(worst < 0.05);
}

TEST_CASE("polarization state wraps into its principal ranges") {
  const PolarizationState p(M_PI / 4 + 0.1, -M_PI / 2 - 0.2);
  CHECK(p.chi_rad > -M_PI / 4);
  CHECK(p.chi_rad <= M_PI / 4);
  CHECK(p.psi_rad > -M_PI / 2);
  CHECK(p.psi_rad <= M_PI / 2);
}
