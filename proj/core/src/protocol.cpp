#include "qnetsim/protocol.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

#include "qnetsim/rng.hpp"

namespace qnetsim::protocol {

using qcore::Complex;
using qcore::Matrix;
using qcore::MixedState;
using qcore::RegisterLayout;
using qcore::Vector;

namespace {

constexpr double kSpeedOfLightKmPerS = 299792.458;

const char* kPhoton = "photon";
const char* kElectronA = "ea";
const char* kElectronB = "eb";
const char* kNucleusA = "na";
const char* kNucleusB = "nb";

Matrix hadamard() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

Matrix y_basis_rotation() {
  // H * S^dag: sends |+y> to |0>.
  Matrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << Complex(s, 0), Complex(0, -s), Complex(s, 0), Complex(0, s);
  return m;
}

MixedState plus_state(const std::string& label) {
  Vector amp(2);
  amp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return qcore::PureState(RegisterLayout({{label, 2}}), amp).to_mixed();
}

MixedState ground_state(const std::string& label) {
  return qcore::PureState::basis(RegisterLayout({{label, 2}}), {0}).to_mixed();
}

qcore::PureState bell_target(const RegisterLayout& layout, BellTarget target) {
  Vector amp = Vector::Zero(4);
  amp(0) = 1.0 / std::sqrt(2.0);
  amp(3) = (target == BellTarget::phi_plus ? 1.0 : -1.0) / std::sqrt(2.0);
  return qcore::PureState(layout, amp);
}

BellTarget target_for(Herald herald) {
  return herald == Herald::plus ? BellTarget::phi_plus : BellTarget::phi_minus;
}

}  // namespace

double classical_latency_s(const ClassicalChannel& channel) {
  if (channel.fiber_length_km < 0) throw InvariantError("fiber length must be non-negative");
  return channel.fiber_length_km * channel.group_index / kSpeedOfLightKmPerS;
}

double success_rate_hz(const RateModel& model) {
  if (model.repetition_rate_hz < 0 || model.success_probability < 0 || model.duty_cycle < 0 ||
      model.duty_cycle > 1.0)
    throw InvariantError("invalid rate model");
  return model.repetition_rate_hz * model.success_probability * model.duty_cycle;
}

double LinkConfig::photon_path_efficiency() const {
  double eff = fiber_coupling_a * fiber_coupling_b * fiber_coupling_b * free_space_a *
               circulator * circulator * extra_efficiency;
  switch (conversion) {
    case Conversion::none:
      break;
    case Conversion::shifting:
      eff *= photonlink::shifter_efficiency(shifter);
      break;
    case Conversion::qfc:
      eff *= qfc.efficiency();
      break;
  }
  for (const auto& segment : fibers) eff *= photonlink::fiber_transmission(segment);
  return eff;
}

MixedState apply_decoupling_decay(
    const MixedState& state, double duration_s,
    const std::vector<std::pair<std::string, DephasingParams>>& decoherence) {
  if (duration_s < 0) throw InvariantError("duration must be non-negative");
  if (duration_s == 0) return state;
  MixedState out = state;
  for (const auto& [label, params] : decoherence) {
    if (!(params.t2_s > 0)) throw InvariantError("T2 must be positive");
    if (params.exponent < 1) throw InvariantError("stretch exponent must be >= 1");
    const double f = std::exp(-std::pow(duration_s / params.t2_s, params.exponent));
    // Dephasing with coherence factor f: K0 = sqrt((1+f)/2) I, K1 = sqrt((1-f)/2) Z.
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    std::vector<Matrix> kraus = {std::sqrt((1 + f) / 2) * Matrix::Identity(2, 2),
                                 std::sqrt((1 - f) / 2) * z};
    out = qcore::apply_channel(out, qcore::QuantumChannel::trace_preserving(std::move(kraus)),
                               {label});
  }
  return out;
}

RejectionResult contrast_rejection_filter(const std::vector<TrialOutcome>& trials,
                                          double rejection_probability,
                                          std::uint64_t rng_seed) {
  if (rejection_probability < 0 || rejection_probability > 1)
    throw InvariantError("rejection probability must lie in [0,1]");
  RejectionResult result;
  long kept = 0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    Rng rng = Rng::for_trial(rng_seed, i);
    if (!rng.bernoulli(rejection_probability)) {
      result.kept.push_back(trials[i]);
      ++kept;
    }
  }
  result.retained_fraction =
      trials.empty() ? 1.0 - rejection_probability : static_cast<double>(kept) / trials.size();
  return result;
}

TrialEngine::TrialEngine(const ProtocolConfig& config) : config_(config) { compile(); }

void TrialEngine::compile() {
  const ProtocolConfig& cfg = config_;
  if (cfg.trials <= 0) throw InvariantError("trials must be positive");
  if (cfg.mu < 0) throw InvariantError("mu must be non-negative");

  spinphoton::PhotonSpace space;
  space.n_max = cfg.photon_n_max;

  auto photon = cfg.single_photon_source
                    ? spinphoton::prepare_single_photon(space, kPhoton)
                    : spinphoton::prepare_photonic_qubit({cfg.mu}, space, kPhoton);

  MixedState state = photon.state;

  // Node A gate.
  if (cfg.scheme == Scheme::ee) {
    state = qcore::tensor(state, plus_state(kElectronA));
    state = spinphoton::e_gamma_gate(state, kPhoton, kElectronA, cfg.node_a.reflectivities,
                                     cfg.node_a.mw_error, space);
  } else {
    state = qcore::tensor(state, ground_state(kElectronA));
    state = qcore::tensor(state, plus_state(kNucleusA));
    state = spinphoton::phone_gate(state, kPhoton, kElectronA, kNucleusA,
                                   cfg.node_a.reflectivities, cfg.node_a.mw_error, space);
  }

  // Link losses between the nodes and to the detector.
  state = spinphoton::attenuate_photon(state, kPhoton, cfg.link.photon_path_efficiency(), space);

  // Node B gate.
  if (cfg.scheme == Scheme::ee) {
    state = qcore::tensor(state, plus_state(kElectronB));
    state = spinphoton::e_gamma_gate(state, kPhoton, kElectronB, cfg.node_b.reflectivities,
                                     cfg.node_b.mw_error, space);
  } else {
    state = qcore::tensor(state, ground_state(kElectronB));
    state = qcore::tensor(state, plus_state(kNucleusB));
    state = spinphoton::phone_gate(state, kPhoton, kElectronB, kNucleusB,
                                   cfg.node_b.reflectivities, cfg.node_b.mw_error, space);
  }

  const auto tdi = tdi_branches(state, kPhoton, cfg.link.tdi, space);
  const double p_noise = cfg.link.tdi.false_herald_probability();

  const std::vector<std::string> pair_labels =
      cfg.scheme == Scheme::ee ? std::vector<std::string>{kElectronA, kElectronB}
                               : std::vector<std::string>{kNucleusA, kNucleusB};

  std::vector<std::pair<std::string, DephasingParams>> decoherence;
  if (cfg.scheme == Scheme::nn && cfg.decoupling.duration_s > 0) {
    auto t2_of = [&](const spinphoton::NodeConfig& node) {
      const auto it = node.t2_nuclear_s.find(cfg.decoupling.xy8_n);
      if (it == node.t2_nuclear_s.end())
        throw InvariantError("no nuclear T2 entry for XY8-" +
                             std::to_string(cfg.decoupling.xy8_n));
      return it->second;
    };
    decoherence = {{kNucleusA, {t2_of(cfg.node_a), cfg.decoherence_exponent}},
                   {kNucleusB, {t2_of(cfg.node_b), cfg.decoherence_exponent}}};
  }

  branches_.clear();
  herald_probability_ = 0.0;

  auto finalize_branch = [&](Herald herald, bool noise, double prob, MixedState pair,
                             bool flag_a, bool flag_b) {
    if (prob < 1e-15) return;
    CompiledBranch branch;
    branch.herald = herald;
    branch.was_noise = noise;
    branch.flag_a_up = flag_a;
    branch.flag_b_up = flag_b;
    branch.probability = prob;
    if (!decoherence.empty()) {
      pair = apply_decoupling_decay(pair, cfg.decoupling.duration_s, decoherence);
    }
    branch.fidelity =
        qcore::fidelity_to(pair, bell_target(pair.layout(), target_for(herald)));

    // Outcome probabilities per tomography basis, with assignment errors.
    const Matrix rot_x = hadamard();
    const Matrix rot_y = y_basis_rotation();
    for (int b = 0; b < 3; ++b) {
      MixedState rotated = pair;
      if (b == 1) {
        rotated = qcore::apply_operator(rotated, rot_x, {pair_labels[0]});
        rotated = qcore::apply_operator(rotated, rot_x, {pair_labels[1]});
      } else if (b == 2) {
        rotated = qcore::apply_operator(rotated, rot_y, {pair_labels[0]});
        rotated = qcore::apply_operator(rotated, rot_y, {pair_labels[1]});
      }
      std::array<double, 4> raw{};
      for (int i = 0; i < 4; ++i) raw[i] = rotated.matrix()(i, i).real();

      // Confusion matrices. ee: symmetric electron readout misassignment.
      // nn: one-sided nuclear assignment error (|up_n> recorded |down_n>).
      auto confusion = [&](const spinphoton::NodeConfig& node) -> std::array<std::array<double, 2>, 2> {
        if (cfg.scheme == Scheme::ee) {
          const double p = node.readout_error;
          return {{{1 - p, p}, {p, 1 - p}}};
        }
        const double p = node.nuclear_assignment_error;
        return {{{1.0, p}, {0.0, 1 - p}}};
      };
      const auto ca = confusion(cfg.node_a);
      const auto cb = confusion(cfg.node_b);
      std::array<double, 4> recorded{};
      for (int ra = 0; ra < 2; ++ra)
        for (int rb = 0; rb < 2; ++rb)
          for (int ta = 0; ta < 2; ++ta)
            for (int tb = 0; tb < 2; ++tb)
              recorded[2 * ra + rb] += ca[ra][ta] * cb[rb][tb] * raw[2 * ta + tb];
      branch.outcome_probabilities[b] = recorded;
    }
    branch.pair_state = std::move(pair);
    herald_probability_ += prob;
    branches_.push_back(std::move(branch));
  };

  const double flag_err_a = cfg.node_a.readout_error;
  const double flag_err_b = cfg.node_b.readout_error;

  for (const auto& tb : tdi) {
    if (tb.herald == Herald::none || tb.was_noise) continue;
    if (cfg.scheme == Scheme::ee) {
      finalize_branch(tb.herald, false, tb.probability,
                      qcore::partial_trace(tb.post_state, pair_labels), false, false);
      continue;
    }
    // nn: project the electron flags, then fan out over recorded values.
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    const std::vector<Matrix> projectors = {p0, p1};
    const auto branches_a = qcore::measure_projective(tb.post_state, kElectronA, projectors);
    for (int fa = 0; fa < 2; ++fa) {
      if (branches_a[fa].negligible) continue;
      const auto branches_b =
          qcore::measure_projective(branches_a[fa].post_state, kElectronB, projectors);
      for (int fb = 0; fb < 2; ++fb) {
        if (branches_b[fb].negligible) continue;
        const double p_true =
            tb.probability * branches_a[fa].probability * branches_b[fb].probability;
        MixedState pair = qcore::partial_trace(branches_b[fb].post_state, pair_labels);
        // Recorded flags with symmetric electron readout errors.
        for (int ra = 0; ra < 2; ++ra) {
          const double wa = (ra == fa) ? 1 - flag_err_a : flag_err_a;
          for (int rb = 0; rb < 2; ++rb) {
            const double wb = (rb == fb) ? 1 - flag_err_b : flag_err_b;
            finalize_branch(tb.herald, false, p_true * wa * wb, pair, ra == 1, rb == 1);
          }
        }
      }
    }
  }

  // False heralds: dark/noise clicks uncorrelated with the spins. The pair is
  // maximally mixed; the electrons end the no-photon PHONE sequence back in
  // |down>, so the flags pass (up to readout misassignment).
  if (p_noise > 0) {
    RegisterLayout pair_layout({{pair_labels[0], 2}, {pair_labels[1], 2}});
    const MixedState mixed = MixedState::maximally_mixed(pair_layout);
    for (Herald h : {Herald::plus, Herald::minus}) {
      if (cfg.scheme == Scheme::ee) {
        finalize_branch(h, true, p_noise / 2, mixed, false, false);
      } else {
        for (int ra = 0; ra < 2; ++ra) {
          const double wa = (ra == 0) ? 1 - flag_err_a : flag_err_a;
          for (int rb = 0; rb < 2; ++rb) {
            const double wb = (rb == 0) ? 1 - flag_err_b : flag_err_b;
            finalize_branch(h, true, (p_noise / 2) * wa * wb, mixed, ra == 1, rb == 1);
          }
        }
      }
    }
  }
}

double TrialEngine::probability(Herald herald) const {
  double p = 0;
  for (const auto& b : branches_)
    if (b.herald == herald) p += b.probability;
  return p;
}

double TrialEngine::ensemble_fidelity(Herald herald, bool error_detected) const {
  double num = 0, den = 0;
  for (const auto& b : branches_) {
    if (b.herald != herald) continue;
    if (error_detected && (b.flag_a_up || b.flag_b_up)) continue;
    num += b.probability * b.fidelity;
    den += b.probability;
  }
  return den > 0 ? num / den : 0.0;
}

RateModel TrialEngine::rate_model() const {
  RateModel model;
  const double cycle = config_.node_a.readout_duration_s + config_.node_b.readout_duration_s +
                       config_.repetition_overhead_s;
  model.repetition_rate_hz = cycle > 0 ? 1.0 / cycle : 0.0;
  model.success_probability = herald_probability_;
  model.duty_cycle = config_.duty_cycle;
  return model;
}

double TrialEngine::success_rate_hz() const { return protocol::success_rate_hz(rate_model()); }

bool TrialEngine::latency_satisfied() const {
  return config_.decoupling.duration_s >=
         2.0 * classical_latency_s(config_.link.classical);
}

namespace {

TrialOutcome sample_from(const std::vector<CompiledBranch>& branches, double herald_scale,
                         const ProtocolConfig& cfg, Basis basis, Rng& rng) {
  TrialOutcome outcome;
  outcome.basis = basis;
  outcome.rejected_by_contrast = rng.bernoulli(cfg.contrast_rejection_probability);
  double roll = rng.uniform() * herald_scale;
  for (const auto& b : branches) {
    if (roll >= b.probability) {
      roll -= b.probability;
      continue;
    }
    outcome.herald = b.herald;
    outcome.was_noise = b.was_noise;
    outcome.flag_a_up = b.flag_a_up;
    outcome.flag_b_up = b.flag_b_up;
    const auto& probs = b.outcome_probabilities[static_cast<int>(basis)];
    double r2 = rng.uniform() * (probs[0] + probs[1] + probs[2] + probs[3]);
    for (int i = 0; i < 4; ++i) {
      if (r2 < probs[i] || i == 3) {
        outcome.outcome_a = i / 2;
        outcome.outcome_b = i % 2;
        break;
      }
      r2 -= probs[i];
    }
    return outcome;
  }
  outcome.herald = Herald::none;
  return outcome;
}

}  // namespace

TrialOutcome TrialEngine::run_trial(Basis basis, std::uint64_t trial_index) const {
  Rng rng = Rng::for_trial(config_.rng_seed, trial_index);
  return sample_from(branches_, 1.0, config_, basis, rng);
}

TrialOutcome TrialEngine::run_heralded_trial(Basis basis, std::uint64_t trial_index) const {
  Rng rng = Rng::for_trial(config_.rng_seed, trial_index);
  return sample_from(branches_, herald_probability_, config_, basis, rng);
}

TrialOutcome run_trial(const ProtocolConfig& config, Basis basis, std::uint64_t rng_seed) {
  ProtocolConfig cfg = config;
  cfg.rng_seed = rng_seed;
  return TrialEngine(cfg).run_trial(basis, 0);
}

void TrialCounts::add(const TrialOutcome& outcome) {
  ++attempts;
  if (outcome.rejected_by_contrast) {
    ++rejected;
    return;
  }
  if (outcome.herald == Herald::none) {
    ++herald_none;
    return;
  }
  if (outcome.was_noise) ++noise_heralds;
  const int h = outcome.herald == Herald::plus ? 0 : 1;
  const int pass = (!outcome.flag_a_up && !outcome.flag_b_up) ? 1 : 0;
  ++counts[h][pass][static_cast<int>(outcome.basis)][2 * outcome.outcome_a + outcome.outcome_b];
}

void TrialCounts::merge(const TrialCounts& other) {
  attempts += other.attempts;
  rejected += other.rejected;
  herald_none += other.herald_none;
  noise_heralds += other.noise_heralds;
  for (int h = 0; h < 2; ++h)
    for (int p = 0; p < 2; ++p)
      for (int b = 0; b < 3; ++b)
        for (int o = 0; o < 4; ++o) counts[h][p][b][o] += other.counts[h][p][b][o];
}

TrialCounts run_many(const TrialEngine& engine, long trials, int shards, bool heralded_only) {
  if (shards < 1) shards = 1;
  auto run_shard = [&](long begin, long end) {
    TrialCounts counts;
    for (long i = begin; i < end; ++i) {
      const Basis basis = static_cast<Basis>(i % 3);
      counts.add(heralded_only ? engine.run_heralded_trial(basis, i)
                               : engine.run_trial(basis, i));
    }
    return counts;
  };

  if (shards == 1) return run_shard(0, trials);

  std::vector<std::future<TrialCounts>> futures;
  const long chunk = (trials + shards - 1) / shards;
  for (int s = 0; s < shards; ++s) {
    const long begin = s * chunk;
    const long end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    futures.push_back(std::async(std::launch::async, run_shard, begin, end));
  }
  TrialCounts total;
  for (auto& f : futures) total.merge(f.get());
  return total;
}

std::string to_string(Herald herald) {
  switch (herald) {
    case Herald::plus: return "plus";
    case Herald::minus: return "minus";
    default: return "none";
  }
}

std::string to_string(Basis basis) {
  switch (basis) {
    case Basis::zz: return "zz";
    case Basis::xx: return "xx";
    default: return "yy";
  }
}

}  // namespace qnetsim::protocol
