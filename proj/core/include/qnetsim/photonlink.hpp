#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnetsim/errors.hpp"

// Photonic channel: electro-optic frequency shifting, bidirectional QFC,
// fiber attenuation, link efficiency budgets, polarization drift and its
// gradient-descent stabilizer.
namespace qnetsim::photonlink {

struct FrequencyShifter {
  double modulation_index = 1.8412;  // V0/Vpi, default at the k=1 occupancy maximum
  int harmonic = 1;
  double eom_insertion_loss = 0.5;    // transmission fraction, not dB
  double filter_transmission = 0.4;

  void validate() const {
    if (harmonic == 0) throw InvariantError("shifting requires a nonzero harmonic");
    if (eom_insertion_loss < 0 || eom_insertion_loss > 1 || filter_transmission < 0 ||
        filter_transmission > 1)
      throw InvariantError("shifter fractions must lie in [0,1]");
  }
};

// J_k(modulation_index)^2
double sideband_occupancy(const FrequencyShifter& shifter);

// occupancy x EOM insertion x filter transmission
double shifter_efficiency(const FrequencyShifter& shifter);

struct QfcChain {
  double dfg_efficiency = 0.33;
  double sfg_efficiency = 0.30;
  double filter_transmission = 0.545;  // chosen so the chain product matches total_override
  std::optional<double> total_override = 0.054;
  double pump_detuning_hz = 13e9;

  double efficiency() const {
    if (total_override) return *total_override;
    return dfg_efficiency * sfg_efficiency * filter_transmission;
  }
};

struct FiberSegment {
  double length_km = 0;
  double attenuation_db_per_km = 0.3;
  double excess_loss_db = 0;
};

// 10^(-(length*attenuation + excess)/10)
double fiber_transmission(const FiberSegment& segment);

// Degree-of-polarization coordinates; wrapped into chi in (-pi/4, pi/4],
// psi in (-pi/2, pi/2] at construction.
struct PolarizationState {
  PolarizationState() = default;
  PolarizationState(double chi, double psi);
  double chi_rad = 0;
  double psi_rad = 0;
};

// sqrt((cos chi - 1)^2 + (cos psi - 1)^2)
double dop_cost(const PolarizationState& p);

// Overlap with the lock polarization (chi = psi = 0) as a Stokes-vector
// projection: (1 + cos 2chi cos 2psi) / 2.
double conversion_polarization_penalty(const PolarizationState& p);

struct BudgetEntry {
  std::string name;
  double efficiency = 1.0;
  bool squared = false;  // entry appears twice in the serial path
};

struct LinkBudget {
  std::vector<BudgetEntry> entries;
  double product() const;
};

// product(entries) * 0.5^gates * 0.5 (plus/minus detection) * mu
double link_success_probability(const LinkBudget& budget, int gates, double mu);

struct DriftParams {
  bool enabled = false;
  double sigma_chi = 0.005;  // rad per step, reflecting boundaries
  double sigma_psi = 0.005;
};

struct ControllerParams {
  double initial_step = 0.2;
  double fd_epsilon = 1e-4;  // finite-difference probe
  int max_iterations = 200;
  double tolerance = 1e-3;
};

struct StabilizationStep {
  PolarizationState state;
  double cost = 0;
};

struct StabilizationTrace {
  std::vector<StabilizationStep> steps;
  bool converged = false;
};

// Finite-difference gradient descent on dop_cost with backtracking steps.
// Drift (when enabled) perturbs the state between controller iterations.
// Non-convergence within the iteration cap is reported via `converged`.
StabilizationTrace stabilize_polarization(PolarizationState initial, const DriftParams& drift,
                                          const ControllerParams& controller,
                                          std::uint64_t rng_seed);

}  // namespace qnetsim::photonlink
