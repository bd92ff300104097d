#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qnetsim/cavity.hpp"
#include "qnetsim/qcore.hpp"

// Time-bin photonic qubits, the reflection-based spin-photon gates (e-gamma
// and the photon-nucleus PHONE gate), microwave error channels, and the
// time-delay-interferometer herald.
//
// Spin basis convention: index 0 = |down>, index 1 = |up>; |up> is the
// high-reflectivity electron state in the shipped node parameters.
namespace qnetsim::spinphoton {

// Fock register over (early, late) bins truncated at n_max total photons.
// Basis order: by total photon number ascending, then early occupation
// descending, e.g. n_max=2: (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
struct PhotonSpace {
  int n_max = 2;
  double bin_separation_s = 142e-9;
  double carrier_frequency_hz = 406.640e12;

  int dimension() const { return (n_max + 1) * (n_max + 2) / 2; }
  int index_of(int n_early, int n_late) const;
  std::pair<int, int> occupation(int index) const;
};

struct WcsSource {
  double mu = 0.0;  // mean photon number per qubit

  // Poisson mass beyond the truncation.
  double truncation_probability(int n_max) const;
  // P(n >= 2) / P(n >= 1) of the untruncated Poisson distribution.
  double multiphoton_conditional_fraction() const;
};

struct PhotonPreparation {
  qcore::MixedState state;
  double truncated_mass = 0.0;
};

// Poisson mixture over photon number, each n-photon component symmetric over
// the two bins (coherent-state statistics), renormalized on the truncated
// support.
PhotonPreparation prepare_photonic_qubit(const WcsSource& source, const PhotonSpace& space,
                                         const std::string& photon_label);

// Deterministic one-photon |+> time-bin qubit (ideal source).
PhotonPreparation prepare_single_photon(const PhotonSpace& space, const std::string& photon_label);

struct NodeConfig {
  cavity::SpinReflectivities reflectivities;
  double mw_error = 0.0;                   // per conditional/unconditional MW gate
  double readout_error = 0.0;              // electron readout misassignment (symmetric)
  double nuclear_assignment_error = 0.0;   // one-sided: true |up_n> recorded as |down_n>
  double readout_duration_s = 0.0;
  std::map<int, double> t2_nuclear_s;      // XY8-N -> T2
  double t2_electron_s = 0.0;              // XY8-1
};

struct TdiModel {
  double visibility_error = 0.02;    // classical +/- assignment swap probability
  double detector_efficiency = 1.0;
  double path_efficiency = 1.0;      // TDI middle-time-slot overlap (0.5 in hardware)
  double dark_count_rate_hz = 0.0;
  double noise_photon_rate_hz = 0.0;
  double detection_window_s = 400e-9;

  double false_herald_probability() const;
};

enum class Herald { none, plus, minus };

// Fock-basis unitary taking (early, late) occupations to (+, -) mode
// occupations, a_pm = (a_e +/- a_l)/sqrt(2).
qcore::Matrix plus_minus_transform(const PhotonSpace& space);

// Spin-conditioned reflection of one time bin: each photon in the bin
// survives with amplitude r(spin); lost photons are traced out, which keeps
// the channel trace-preserving while moving weight to lower Fock sectors.
qcore::QuantumChannel bin_reflection_channel(const PhotonSpace& space, bool early_bin,
                                             qcore::Complex r_spin_down,
                                             qcore::Complex r_spin_up);

// Spin-independent attenuation of both bins (fiber, conversion, filters).
qcore::MixedState attenuate_photon(const qcore::MixedState& state,
                                   const std::string& photon_label, double transmission,
                                   const PhotonSpace& space);

// Noisy X on an electron: exact NOT followed by a bit-flip channel.
qcore::MixedState apply_not_e(const qcore::MixedState& state, const std::string& electron,
                              double mw_error);

// Electron flip conditioned on the nucleus being in |control_value>;
// bit-flip error on the electron with probability mw_error.
qcore::MixedState apply_cn_not_e(const qcore::MixedState& state, const std::string& electron,
                                 const std::string& nucleus, int control_value, double mw_error);

// Early reflection -> noisy NOT_e -> late reflection. Caller prepares the
// electron (the protocol uses |->_e = (|down>+|up>)/sqrt(2)).
qcore::MixedState e_gamma_gate(const qcore::MixedState& state, const std::string& photon,
                               const std::string& electron,
                               const cavity::SpinReflectivities& refl, double mw_error,
                               const PhotonSpace& space);

// C_nNOT_e -> early reflection -> NOT_e -> late reflection -> conjugate
// C_nNOT_e, all MW pulses noisy. Caller prepares |down_e, ->_n>. In the
// error-free single-photon branch the electron factors out in |down_e>.
qcore::MixedState phone_gate(const qcore::MixedState& state, const std::string& photon,
                             const std::string& electron, const std::string& nucleus,
                             const cavity::SpinReflectivities& refl, double mw_error,
                             const PhotonSpace& space);

struct TdiBranch {
  Herald herald = Herald::none;
  bool was_noise = false;
  double probability = 0.0;
  qcore::MixedState post_state;  // photon traced out
};

// Exact branch decomposition of the TDI measurement: basis change to +/-,
// occupation measurement, detector-click sampling, visibility swap, and the
// dark/noise false-herald branch (maximally mixed spins).
std::vector<TdiBranch> tdi_branches(const qcore::MixedState& state, const std::string& photon,
                                    const TdiModel& tdi, const PhotonSpace& space);

struct TdiSample {
  Herald herald = Herald::none;
  qcore::MixedState post_state;
  bool was_noise = false;
};

TdiSample tdi_measure(const qcore::MixedState& state, const std::string& photon,
                      const TdiModel& tdi, const PhotonSpace& space, std::uint64_t rng_seed);

}  // namespace qnetsim::spinphoton
