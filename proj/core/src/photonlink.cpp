#include "qnetsim/photonlink.hpp"

#include <algorithm>
#include <cmath>

#include "qnetsim/bessel.hpp"
#include "qnetsim/rng.hpp"

namespace qnetsim::photonlink {

double sideband_occupancy(const FrequencyShifter& shifter) {
  shifter.validate();
  const double j = bessel_j(shifter.harmonic, shifter.modulation_index);
  return j * j;
}

double shifter_efficiency(const FrequencyShifter& shifter) {
  return sideband_occupancy(shifter) * shifter.eom_insertion_loss * shifter.filter_transmission;
}

double fiber_transmission(const FiberSegment& segment) {
  if (segment.length_km < 0 || segment.attenuation_db_per_km < 0 || segment.excess_loss_db < 0)
    throw InvariantError("fiber segment parameters must be non-negative");
  const double db = segment.length_km * segment.attenuation_db_per_km + segment.excess_loss_db;
  return std::pow(10.0, -db / 10.0);
}

namespace {

double wrap_periodic(double value, double half_range) {
  // into (-half_range, half_range]
  const double period = 2.0 * half_range;
  double v = std::fmod(value + half_range, period);
  if (v <= 0) v += period;
  return v - half_range;
}

double reflect_into(double value, double lo, double hi) {
  const double period = 2.0 * (hi - lo);
  double v = std::fmod(value - lo, period);
  if (v < 0) v += period;
  return (v <= hi - lo) ? lo + v : hi - (v - (hi - lo));
}

}  // namespace

PolarizationState::PolarizationState(double chi, double psi)
    : chi_rad(wrap_periodic(chi, M_PI / 4.0)), psi_rad(wrap_periodic(psi, M_PI / 2.0)) {}

double dop_cost(const PolarizationState& p) {
  const double a = std::cos(p.chi_rad) - 1.0;
  const double b = std::cos(p.psi_rad) - 1.0;
  return std::sqrt(a * a + b * b);
}

double conversion_polarization_penalty(const PolarizationState& p) {
  return 0.5 * (1.0 + std::cos(2.0 * p.chi_rad) * std::cos(2.0 * p.psi_rad));
}

double LinkBudget::product() const {
  double out = 1.0;
  for (const auto& e : entries) {
    if (!(e.efficiency > 0.0) || e.efficiency > 1.0)
      throw InvariantError("budget entry '" + e.name + "' outside (0,1]");
    out *= e.squared ? e.efficiency * e.efficiency : e.efficiency;
  }
  return out;
}

double link_success_probability(const LinkBudget& budget, int gates, double mu) {
  if (gates < 0 || mu < 0) throw InvariantError("gates and mu must be non-negative");
  return budget.product() * std::pow(0.5, gates) * 0.5 * mu;
}

StabilizationTrace stabilize_polarization(PolarizationState initial, const DriftParams& drift,
                                          const ControllerParams& controller,
                                          std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  StabilizationTrace trace;

  // Controller offsets are what the fiber squeezers actually move; the
  // underlying (drifting) state stays separate so drift and control add.
  double base_chi = initial.chi_rad;
  double base_psi = initial.psi_rad;
  double ctrl_chi = 0.0;
  double ctrl_psi = 0.0;
  double step = controller.initial_step;

  auto current = [&]() { return PolarizationState(base_chi + ctrl_chi, base_psi + ctrl_psi); };

  PolarizationState state = current();
  double cost = dop_cost(state);
  trace.steps.push_back({state, cost});
  if (cost < controller.tolerance && !drift.enabled) {
    trace.converged = true;
    return trace;  // already at the lock point: zero iterations
  }

  for (int it = 0; it < controller.max_iterations; ++it) {
    if (drift.enabled) {
      base_chi = reflect_into(base_chi + drift.sigma_chi * rng.normal(), -M_PI / 4, M_PI / 4);
      base_psi = reflect_into(base_psi + drift.sigma_psi * rng.normal(), -M_PI / 2, M_PI / 2);
      state = current();
      cost = dop_cost(state);
    }

    const double eps = controller.fd_epsilon;
    const double dchi = (dop_cost(PolarizationState(state.chi_rad + eps, state.psi_rad)) -
                         dop_cost(PolarizationState(state.chi_rad - eps, state.psi_rad))) /
                        (2 * eps);
    const double dpsi = (dop_cost(PolarizationState(state.chi_rad, state.psi_rad + eps)) -
                         dop_cost(PolarizationState(state.chi_rad, state.psi_rad - eps))) /
                        (2 * eps);
    const double gnorm = std::hypot(dchi, dpsi);
    if (gnorm > 1e-14) {
      // Normalized step with backtracking; only cost-decreasing moves are kept.
      double trial_step = step;
      bool accepted = false;
      for (int bt = 0; bt < 30; ++bt) {
        const double nchi = ctrl_chi - trial_step * dchi / gnorm;
        const double npsi = ctrl_psi - trial_step * dpsi / gnorm;
        const double ncost = dop_cost(PolarizationState(base_chi + nchi, base_psi + npsi));
        if (ncost < cost) {
          ctrl_chi = nchi;
          ctrl_psi = npsi;
          cost = ncost;
          accepted = true;
          break;
        }
        trial_step /= 2.0;
      }
      step = accepted ? std::min(trial_step * 1.5, controller.initial_step) : trial_step;
    }
    state = current();
    trace.steps.push_back({state, cost});
    if (!drift.enabled && cost < controller.tolerance) {
      trace.converged = true;
      return trace;
    }
  }
  trace.converged = drift.enabled ? true : cost < controller.tolerance;
  return trace;
}

}  // namespace qnetsim::photonlink
