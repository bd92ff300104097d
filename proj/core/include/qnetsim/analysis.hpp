#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qnetsim/protocol.hpp"

// Bell-state tomography statistics, closed-form contrast-error expressions,
// per-source error budgets, and the signal-to-noise fidelity model for long
// fiber links.
namespace qnetsim::analysis {

using protocol::BellTarget;

struct CorrelatorCounts {
  // counts[basis][2*a+b], basis order zz, xx, yy; outcome bit 0 = |down>.
  std::array<std::array<long, 4>, 3> counts{};

  long total(protocol::Basis basis) const;
  static CorrelatorCounts from_trial_counts(const protocol::TrialCounts& counts,
                                            protocol::Herald herald, bool error_detected_only);
};

struct FidelityEstimate {
  BellTarget target = BellTarget::phi_minus;
  double fidelity = 0.0;
  double stddev = 0.0;
  bool clamped = false;  // raw formula value fell outside [0,1]
};

// F = 1/2 P_zz + 1/4 P_xx + 1/4 P_yy with target-dependent signs of the
// xx/yy parity sums; stddev from the binomial sampling variances of the
// three correlators.
FidelityEstimate bell_fidelity(const CorrelatorCounts& counts, BellTarget target);

// Multinomial bootstrap of bell_fidelity's standard deviation (validation
// oracle for the closed-form stddev).
double fidelity_stddev_bootstrap(const CorrelatorCounts& counts, BellTarget target,
                                 int resamples, std::uint64_t rng_seed);

// Heralded infidelity caused by residual reflectivity of the dark spin
// state; modulus form of the closed-form expressions, exact for any complex
// r_a, r_b.
double contrast_error(std::complex<double> r_a, std::complex<double> r_b,
                      protocol::Herald branch);

struct BudgetRow {
  std::string source;
  std::string input_a;  // per-node inputs, human-readable
  std::string input_b;
  std::vector<double> contributions;  // infidelity per report column
};

struct ErrorBudget {
  std::vector<std::string> columns;  // ee: phi_minus, phi_plus; nn: phi_minus ED, raw
  std::vector<BudgetRow> rows;
  std::vector<double> totals;        // joint simulation, not a row sum
  long mc_trials = 0;                // 0 = exact branch enumeration only
  std::vector<double> total_stddev;  // Monte Carlo cross-check width (if run)
};

// Rows: each error source enabled alone; totals: all sources together.
// Contributions are computed from the exact compiled branch ensemble; when
// mc_trials > 0 a sampled cross-check of the totals is attached.
ErrorBudget error_budget(const protocol::ProtocolConfig& config, long mc_trials = 0);

struct SnrModel {
  double baseline_fidelity = 0.0;
  double signal_rate_at_zero_km_hz = 0.0;  // referred to the detection window
  double noise_rate_hz = 0.0;              // dark + conversion noise
  double attenuation_db_per_km = 0.3;
  double false_herald_fidelity = 0.25;
};

// F(L) = (S(L) F0 + N Ffalse) / (S(L) + N) with S(L) = S0 10^(-a L / 10).
double snr_fidelity(const SnrModel& model, double length_km);

// Calibrate S0 and the baseline from the compiled pipeline at zero fiber
// length: S0 = heralding probability per attempt / detection window, so that
// raw noise rates in Hz compare directly.
SnrModel calibrate_snr_model(const protocol::ProtocolConfig& config,
                             double attenuation_db_per_km);

struct MuExtraction {
  double mu_eta = 0.0;  // mean photon number at the node (mu x arrival efficiency)
  bool invertible = true;
};

// Inverts P(up) = (1 - exp(-mu eta)) / 2 after subtracting the MW-error
// offset observed in the X-basis e-gamma calibration.
MuExtraction mu_extraction(double electron_population_after_x_gate, double mw_offset);

}  // namespace qnetsim::analysis
