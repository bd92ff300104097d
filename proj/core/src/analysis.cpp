#include "qnetsim/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "qnetsim/rng.hpp"

namespace qnetsim::analysis {

using protocol::Basis;
using protocol::Herald;
using protocol::ProtocolConfig;

long CorrelatorCounts::total(Basis basis) const {
  const auto& c = counts[static_cast<int>(basis)];
  return c[0] + c[1] + c[2] + c[3];
}

CorrelatorCounts CorrelatorCounts::from_trial_counts(const protocol::TrialCounts& trial_counts,
                                                     Herald herald, bool error_detected_only) {
  CorrelatorCounts out;
  const int h = herald == Herald::plus ? 0 : 1;
  for (int b = 0; b < 3; ++b) {
    for (int o = 0; o < 4; ++o) {
      long value = trial_counts.counts[h][1][b][o];
      if (!error_detected_only) value += trial_counts.counts[h][0][b][o];
      out.counts[b][o] = value;
    }
  }
  return out;
}

namespace {

struct Parities {
  double p_zz, p_xx, p_yy;
};

Parities parities(const CorrelatorCounts& counts, BellTarget target) {
  auto frac = [&](Basis basis, int outcome) {
    const long n = counts.total(basis);
    return n > 0 ? static_cast<double>(counts.counts[static_cast<int>(basis)][outcome]) / n : 0.0;
  };
  const double zz = frac(Basis::zz, 0b00) + frac(Basis::zz, 0b11);
  const double xx_same = frac(Basis::xx, 0b00) + frac(Basis::xx, 0b11);
  const double xx_diff = frac(Basis::xx, 0b01) + frac(Basis::xx, 0b10);
  const double yy_same = frac(Basis::yy, 0b00) + frac(Basis::yy, 0b11);
  const double yy_diff = frac(Basis::yy, 0b01) + frac(Basis::yy, 0b10);
  if (target == BellTarget::phi_minus) {
    return {zz, xx_diff - xx_same, yy_same - yy_diff};
  }
  return {zz, xx_same - xx_diff, yy_diff - yy_same};
}

}  // namespace

FidelityEstimate bell_fidelity(const CorrelatorCounts& counts, BellTarget target) {
  for (Basis b : {Basis::zz, Basis::xx, Basis::yy}) {
    if (counts.total(b) == 0) throw InvariantError("empty basis in correlator counts");
  }
  const Parities p = parities(counts, target);
  FidelityEstimate estimate;
  estimate.target = target;
  double f = 0.5 * p.p_zz + 0.25 * p.p_xx + 0.25 * p.p_yy;
  if (f < 0.0 || f > 1.0) {
    estimate.clamped = true;
    f = std::clamp(f, 0.0, 1.0);
  }
  estimate.fidelity = f;

  const double n_zz = static_cast<double>(counts.total(Basis::zz));
  const double n_xx = static_cast<double>(counts.total(Basis::xx));
  const double n_yy = static_cast<double>(counts.total(Basis::yy));
  const double var = 0.25 * p.p_zz * (1.0 - p.p_zz) / n_zz +
                     (1.0 / 16.0) * (1.0 + p.p_xx) * (1.0 - p.p_xx) / n_xx +
                     (1.0 / 16.0) * (1.0 + p.p_yy) * (1.0 - p.p_yy) / n_yy;
  estimate.stddev = std::sqrt(std::max(var, 0.0));
  return estimate;
}

double fidelity_stddev_bootstrap(const CorrelatorCounts& counts, BellTarget target,
                                 int resamples, std::uint64_t rng_seed) {
  if (resamples < 1) throw InvariantError("need at least one resample");
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < resamples; ++r) {
    Rng rng = Rng::for_trial(rng_seed, r);
    CorrelatorCounts resampled;
    for (int b = 0; b < 3; ++b) {
      const long n = counts.total(static_cast<Basis>(b));
      std::array<double, 4> cum{};
      double acc = 0.0;
      for (int o = 0; o < 4; ++o) {
        acc += static_cast<double>(counts.counts[b][o]) / n;
        cum[o] = acc;
      }
      for (long i = 0; i < n; ++i) {
        const double u = rng.uniform();
        int o = 0;
        while (o < 3 && u >= cum[o]) ++o;
        ++resampled.counts[b][o];
      }
    }
    const double f = bell_fidelity(resampled, target).fidelity;
    sum += f;
    sum_sq += f * f;
  }
  const double mean = sum / resamples;
  return std::sqrt(std::max(0.0, sum_sq / resamples - mean * mean));
}

double contrast_error(std::complex<double> r_a, std::complex<double> r_b, Herald branch) {
  if (std::abs(r_a) > 1.0 || std::abs(r_b) > 1.0)
    throw InvariantError("reflectivities must satisfy |r| <= 1");
  if (branch == Herald::plus) {
    const double bad = std::norm(r_a + r_b);
    const double good = std::norm(1.0 + r_a * r_b);
    return bad / (bad + good);
  }
  const double bad = std::norm(r_a - r_b);
  const double good = std::norm(1.0 - r_a * r_b);
  return bad / (bad + good);
}

namespace {

// Error-source toggles for budget rows.
struct SourceMask {
  bool mw = false;
  bool contrast = false;
  bool multiphoton = false;
  bool tdi = false;
  bool readout = false;
};

ProtocolConfig masked_config(const ProtocolConfig& base, const SourceMask& mask) {
  ProtocolConfig cfg = base;
  if (!mask.mw) {
    cfg.node_a.mw_error = 0;
    cfg.node_b.mw_error = 0;
  }
  if (!mask.contrast) {
    // Keep the lossy |r_high| (it only rescales success probability) and
    // zero the dark-state reflectivity that actually causes the error.
    cfg.node_a.reflectivities.r_low = 0;
    cfg.node_b.reflectivities.r_low = 0;
  }
  if (!mask.multiphoton) {
    cfg.single_photon_source = true;
  }
  if (!mask.tdi) {
    cfg.link.tdi.visibility_error = 0;
  }
  if (!mask.readout) {
    cfg.node_a.readout_error = 0;
    cfg.node_b.readout_error = 0;
    cfg.node_a.nuclear_assignment_error = 0;
    cfg.node_b.nuclear_assignment_error = 0;
  }
  return cfg;
}

std::vector<double> budget_infidelities(const ProtocolConfig& cfg) {
  protocol::TrialEngine engine(cfg);
  if (cfg.scheme == protocol::Scheme::ee) {
    return {1.0 - engine.ensemble_fidelity(Herald::minus, false),
            1.0 - engine.ensemble_fidelity(Herald::plus, false)};
  }
  return {1.0 - engine.ensemble_fidelity(Herald::minus, true),
          1.0 - engine.ensemble_fidelity(Herald::minus, false)};
}

std::string percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f %%", 100.0 * value);
  return buf;
}

}  // namespace

ErrorBudget error_budget(const ProtocolConfig& config, long mc_trials) {
  ErrorBudget budget;
  const bool ee = config.scheme == protocol::Scheme::ee;
  budget.columns = ee ? std::vector<std::string>{"phi_minus", "phi_plus"}
                      : std::vector<std::string>{"phi_minus_ed", "phi_minus_raw"};

  const auto add_row = [&](const std::string& source, const std::string& in_a,
                           const std::string& in_b, const SourceMask& mask) {
    BudgetRow row{source, in_a, in_b, budget_infidelities(masked_config(config, mask))};
    budget.rows.push_back(std::move(row));
  };

  add_row("Microwave pulse error", percent(config.node_a.mw_error),
          percent(config.node_b.mw_error), {.mw = true});
  add_row("Optical contrast error", percent(std::norm(config.node_a.reflectivities.r_low)),
          percent(std::norm(config.node_b.reflectivities.r_low)), {.contrast = true});
  add_row("Multi-photon error (mu=" + std::to_string(config.mu).substr(0, 5) + ")", "-", "-",
          {.multiphoton = true});
  add_row("TDI locking error", "-", "-", {.tdi = true});
  if (ee) {
    add_row("Readout assignment error", percent(config.node_a.readout_error),
            percent(config.node_b.readout_error), {.readout = true});
  } else {
    add_row("Nuclear readout assignment error", percent(config.node_a.nuclear_assignment_error),
            percent(config.node_b.nuclear_assignment_error), {.readout = true});
  }

  budget.totals = budget_infidelities(
      masked_config(config, {.mw = true, .contrast = true, .multiphoton = true, .tdi = true,
                             .readout = true}));

  if (mc_trials > 0) {
    budget.mc_trials = mc_trials;
    protocol::TrialEngine engine(config);
    const auto counts = protocol::run_many(engine, mc_trials, 1, /*heralded_only=*/true);
    if (ee) {
      for (Herald h : {Herald::minus, Herald::plus}) {
        const auto estimate = bell_fidelity(
            CorrelatorCounts::from_trial_counts(counts, h, false),
            h == Herald::minus ? BellTarget::phi_minus : BellTarget::phi_plus);
        budget.total_stddev.push_back(estimate.stddev);
      }
    } else {
      for (bool ed : {true, false}) {
        const auto estimate =
            bell_fidelity(CorrelatorCounts::from_trial_counts(counts, Herald::minus, ed),
                          BellTarget::phi_minus);
        budget.total_stddev.push_back(estimate.stddev);
      }
    }
  }
  return budget;
}

double snr_fidelity(const SnrModel& model, double length_km) {
  if (model.noise_rate_hz < 0 || model.signal_rate_at_zero_km_hz < 0)
    throw InvariantError("rates must be non-negative");
  const double signal = model.signal_rate_at_zero_km_hz *
                        std::pow(10.0, -model.attenuation_db_per_km * length_km / 10.0);
  const double noise = model.noise_rate_hz;
  if (signal + noise <= 0) return model.false_herald_fidelity;
  return (signal * model.baseline_fidelity + noise * model.false_herald_fidelity) /
         (signal + noise);
}

SnrModel calibrate_snr_model(const ProtocolConfig& config, double attenuation_db_per_km) {
  // Reference pipeline: zero-length fiber, no dark/noise counts.
  ProtocolConfig ref = config;
  for (auto& f : ref.link.fibers) f.length_km = 0;
  ref.link.tdi.dark_count_rate_hz = 0;
  ref.link.tdi.noise_photon_rate_hz = 0;
  protocol::TrialEngine engine(ref);

  SnrModel model;
  model.attenuation_db_per_km = attenuation_db_per_km;
  model.noise_rate_hz =
      config.link.tdi.dark_count_rate_hz + config.link.tdi.noise_photon_rate_hz;
  const bool ed = config.scheme == protocol::Scheme::nn && config.error_detection;
  model.baseline_fidelity = engine.ensemble_fidelity(Herald::minus, ed);
  model.signal_rate_at_zero_km_hz =
      engine.herald_probability() / config.link.tdi.detection_window_s;
  return model;
}

MuExtraction mu_extraction(double electron_population_after_x_gate, double mw_offset) {
  MuExtraction out;
  const double corrected = electron_population_after_x_gate - mw_offset;
  if (corrected < 0) {
    out.mu_eta = 0.0;
    return out;
  }
  if (corrected >= 0.5) {
    out.invertible = false;
    out.mu_eta = 0.0;
    return out;
  }
  out.mu_eta = -std::log(1.0 - 2.0 * corrected);
  return out;
}

}  // namespace qnetsim::analysis
