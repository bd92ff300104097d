#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnetsim/photonlink.hpp"
#include "qnetsim/spinphoton.hpp"

// Full entanglement-generation trials: WCS source, gate at node A, lossy
// link, gate at node B, TDI herald, decoupling decay, flag readout, and
// tomography with assignment errors. The expensive density-matrix algebra is
// compiled once per configuration; Monte Carlo trials sample the resulting
// exact branch distribution.
namespace qnetsim::protocol {

using spinphoton::Herald;

enum class Scheme { ee, nn };
enum class Basis { zz = 0, xx = 1, yy = 2 };
enum class BellTarget { phi_plus, phi_minus };

struct DecouplingConfig {
  int xy8_n = 1;
  double duration_s = 0.0;
};

struct ClassicalChannel {
  double fiber_length_km = 0.0;
  double group_index = 1.468;
};

// length * group_index / c
double classical_latency_s(const ClassicalChannel& channel);

struct RateModel {
  double repetition_rate_hz = 0.0;
  double success_probability = 0.0;
  double duty_cycle = 1.0;
};

// r_suc = eta * R * D
double success_rate_hz(const RateModel& model);

enum class Conversion { none, shifting, qfc };

struct LinkConfig {
  Conversion conversion = Conversion::none;
  photonlink::FrequencyShifter shifter;
  photonlink::QfcChain qfc;
  std::vector<photonlink::FiberSegment> fibers;
  // Insertion-loss factors outside the cavities and detector.
  double fiber_coupling_a = 1.0;
  double fiber_coupling_b = 1.0;  // enters twice (in and out of node B)
  double free_space_a = 1.0;
  double circulator = 1.0;        // enters twice
  double extra_efficiency = 1.0;
  spinphoton::TdiModel tdi;
  ClassicalChannel classical;

  // Photon-path transmission between the two cavity reflections and the
  // detector input (cavity reflectances live in the gates, the detector in
  // the TDI model).
  double photon_path_efficiency() const;
};

struct ProtocolConfig {
  Scheme scheme = Scheme::ee;
  double mu = 0.017;
  bool single_photon_source = false;
  int photon_n_max = 2;
  spinphoton::NodeConfig node_a;
  spinphoton::NodeConfig node_b;
  LinkConfig link;
  DecouplingConfig decoupling;
  bool error_detection = false;
  double decoherence_exponent = 2.0;
  double contrast_rejection_probability = 0.0;
  double duty_cycle = 1.0;
  double repetition_overhead_s = 0.0;
  long trials = 1;
  std::uint64_t rng_seed = 0;
};

struct TrialOutcome {
  Herald herald = Herald::none;
  bool flag_a_up = false;  // recorded electron flags (nn scheme)
  bool flag_b_up = false;
  Basis basis = Basis::zz;
  int outcome_a = 0;  // valid iff herald != none
  int outcome_b = 0;
  bool rejected_by_contrast = false;
  bool was_noise = false;
};

struct DephasingParams {
  double t2_s = 1.0;
  double exponent = 2.0;
};

// Per-subsystem dephasing with coherence factor exp(-(t/T2)^p); populations
// untouched.
qcore::MixedState apply_decoupling_decay(
    const qcore::MixedState& state, double duration_s,
    const std::vector<std::pair<std::string, DephasingParams>>& decoherence);

struct RejectionResult {
  std::vector<TrialOutcome> kept;
  double retained_fraction = 1.0;  // duty impact multiplier
};

RejectionResult contrast_rejection_filter(const std::vector<TrialOutcome>& trials,
                                          double rejection_probability, std::uint64_t rng_seed);

struct CompiledBranch {
  Herald herald = Herald::plus;
  bool flag_a_up = false;
  bool flag_b_up = false;
  bool was_noise = false;
  double probability = 0.0;                          // absolute per attempt
  qcore::MixedState pair_state;                      // two-qubit entangled pair
  double fidelity = 0.0;                             // to this herald's Bell target
  std::array<std::array<double, 4>, 3> outcome_probabilities{};  // [basis][2*a+b]
};

class TrialEngine {
 public:
  explicit TrialEngine(const ProtocolConfig& config);

  const ProtocolConfig& config() const { return config_; }
  const std::vector<CompiledBranch>& branches() const { return branches_; }

  double herald_probability() const { return herald_probability_; }
  double herald_none_probability() const { return 1.0 - herald_probability_; }
  double probability(Herald herald) const;
  // Exact branch-weighted fidelity; error_detected restricts to trials with
  // both recorded flags |down>.
  double ensemble_fidelity(Herald herald, bool error_detected) const;

  RateModel rate_model() const;
  double success_rate_hz() const;
  bool latency_satisfied() const;  // decoupling covers the classical round trip

  // One protocol attempt (herald may be none).
  TrialOutcome run_trial(Basis basis, std::uint64_t trial_index) const;
  // One heralded datapoint (conditioned on herald in {plus, minus}).
  TrialOutcome run_heralded_trial(Basis basis, std::uint64_t trial_index) const;

 private:
  void compile();
  ProtocolConfig config_;
  std::vector<CompiledBranch> branches_;
  double herald_probability_ = 0.0;
};

// Convenience wrapper matching the one-shot contract; compiles on every call.
TrialOutcome run_trial(const ProtocolConfig& config, Basis basis, std::uint64_t rng_seed);

// Aggregate counts; merging is integer addition, so shard order is
// irrelevant and sharded == sequential for identical trial indexing.
struct TrialCounts {
  long attempts = 0;
  long rejected = 0;
  long herald_none = 0;
  long noise_heralds = 0;
  // [herald: 0=plus 1=minus][flags pass: 0=no 1=yes][basis][outcome 2*a+b]
  std::array<std::array<std::array<std::array<long, 4>, 3>, 2>, 2> counts{};

  void add(const TrialOutcome& outcome);
  void merge(const TrialCounts& other);
  bool operator==(const TrialCounts&) const = default;
};

// Run `trials` heralded (or attempt-level) samples with round-robin bases,
// sharded over `shards` workers. Bit-identical for any shard count.
TrialCounts run_many(const TrialEngine& engine, long trials, int shards, bool heralded_only);

std::string to_string(Herald herald);
std::string to_string(Basis basis);

}  // namespace qnetsim::protocol
