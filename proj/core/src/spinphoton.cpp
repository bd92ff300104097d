#include "qnetsim/spinphoton.hpp"

#include <cmath>

#include "qnetsim/rng.hpp"

namespace qnetsim::spinphoton {

using qcore::Complex;
using qcore::Matrix;
using qcore::MixedState;
using qcore::QuantumChannel;
using qcore::RegisterLayout;
using qcore::Vector;

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

Complex cpow(Complex base, int n) {
  Complex out = 1.0;
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

// Single-bin attenuator Kraus for k photons lost, amplitude transmission r.
Matrix bin_attenuator_kraus(const PhotonSpace& space, bool early_bin, Complex r, int k) {
  const int d = space.dimension();
  const double loss = std::sqrt(std::max(0.0, 1.0 - std::norm(r)));
  Matrix a = Matrix::Zero(d, d);
  for (int col = 0; col < d; ++col) {
    const auto [ne, nl] = space.occupation(col);
    const int n = early_bin ? ne : nl;
    if (k > n) continue;
    const int row = early_bin ? space.index_of(ne - k, nl) : space.index_of(ne, nl - k);
    a(row, col) = std::sqrt(binom(n, k)) * cpow(r, n - k) * std::pow(loss, k);
  }
  return a;
}

const Matrix& pauli_x() {
  static const Matrix x = [] {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }();
  return x;
}

MixedState bit_flip_channel(const MixedState& state, const std::string& target, double p) {
  if (p <= 0.0) return state;
  std::vector<Matrix> kraus = {std::sqrt(1.0 - p) * Matrix::Identity(2, 2),
                               std::sqrt(p) * pauli_x()};
  return qcore::apply_channel(state, QuantumChannel::trace_preserving(std::move(kraus)),
                              {target});
}

}  // namespace

int PhotonSpace::index_of(int n_early, int n_late) const {
  const int n = n_early + n_late;
  if (n_early < 0 || n_late < 0 || n > n_max)
    throw ShapeError("photon occupation outside truncated space");
  return n * (n + 1) / 2 + (n - n_early);
}

std::pair<int, int> PhotonSpace::occupation(int index) const {
  for (int n = 0; n <= n_max; ++n) {
    const int base = n * (n + 1) / 2;
    if (index < base + n + 1) {
      const int ne = n - (index - base);
      return {ne, n - ne};
    }
  }
  throw ShapeError("photon index outside truncated space");
}

double WcsSource::truncation_probability(int n_max) const {
  if (mu < 0) throw InvariantError("mu must be non-negative");
  double kept = 0.0, term = std::exp(-mu);
  for (int n = 0; n <= n_max; ++n) {
    kept += term;
    term *= mu / (n + 1);
  }
  return std::max(0.0, 1.0 - kept);
}

double WcsSource::multiphoton_conditional_fraction() const {
  if (mu <= 0) return 0.0;
  const double p_ge1 = 1.0 - std::exp(-mu);
  const double p_ge2 = 1.0 - std::exp(-mu) * (1.0 + mu);
  return p_ge2 / p_ge1;
}

PhotonPreparation prepare_photonic_qubit(const WcsSource& source, const PhotonSpace& space,
                                         const std::string& photon_label) {
  if (source.mu < 0) throw InvariantError("mu must be non-negative");
  const int d = space.dimension();
  RegisterLayout layout({{photon_label, d}});

  std::vector<double> weights(space.n_max + 1);
  double term = std::exp(-source.mu), kept = 0.0;
  for (int n = 0; n <= space.n_max; ++n) {
    weights[n] = term;
    kept += term;
    term *= source.mu / (n + 1);
  }
  for (auto& w : weights) w /= kept;

  Matrix rho = Matrix::Zero(d, d);
  for (int n = 0; n <= space.n_max; ++n) {
    Vector component = Vector::Zero(d);
    for (int k = 0; k <= n; ++k) {
      component(space.index_of(k, n - k)) =
          std::sqrt(binom(n, k)) * std::pow(2.0, -0.5 * n);
    }
    rho += weights[n] * component * component.adjoint();
  }
  return {MixedState::unchecked(std::move(layout), std::move(rho)),
          source.truncation_probability(space.n_max)};
}

PhotonPreparation prepare_single_photon(const PhotonSpace& space,
                                        const std::string& photon_label) {
  const int d = space.dimension();
  RegisterLayout layout({{photon_label, d}});
  Vector amp = Vector::Zero(d);
  amp(space.index_of(1, 0)) = 1.0 / std::sqrt(2.0);
  amp(space.index_of(0, 1)) = 1.0 / std::sqrt(2.0);
  Matrix rho = amp * amp.adjoint();
  return {MixedState::unchecked(std::move(layout), std::move(rho)), 0.0};
}

double TdiModel::false_herald_probability() const {
  const double rate = dark_count_rate_hz + noise_photon_rate_hz;
  return 1.0 - std::exp(-rate * detection_window_s);
}

Matrix plus_minus_transform(const PhotonSpace& space) {
  const int d = space.dimension();
  Matrix u = Matrix::Zero(d, d);
  for (int col = 0; col < d; ++col) {
    const auto [ne, nl] = space.occupation(col);
    const int n = ne + nl;
    const double scale = std::pow(2.0, -0.5 * n) / std::sqrt(factorial(ne) * factorial(nl));
    for (int p = 0; p <= n; ++p) {
      // photons in the + mode; j from the early bin, k = p - j from the late
      double sum = 0.0;
      for (int j = std::max(0, p - nl); j <= std::min(ne, p); ++j) {
        const int k = p - j;
        sum += binom(ne, j) * binom(nl, k) * ((nl - k) % 2 == 0 ? 1.0 : -1.0);
      }
      const int q = n - p;
      u(space.index_of(p, q), col) =
          scale * sum * std::sqrt(factorial(p) * factorial(q));
    }
  }
  return u;
}

QuantumChannel bin_reflection_channel(const PhotonSpace& space, bool early_bin,
                                      Complex r_spin_down, Complex r_spin_up) {
  const int d = space.dimension();
  std::vector<Matrix> kraus;
  for (int k = 0; k <= space.n_max; ++k) {
    // Joint operator on (photon, electron); digit packing photon*2 + electron.
    Matrix joint = Matrix::Zero(2 * d, 2 * d);
    const Matrix a_dn = bin_attenuator_kraus(space, early_bin, r_spin_down, k);
    const Matrix a_up = bin_attenuator_kraus(space, early_bin, r_spin_up, k);
    for (int row = 0; row < d; ++row) {
      for (int col = 0; col < d; ++col) {
        if (a_dn(row, col) != 0.0) joint(2 * row + 0, 2 * col + 0) = a_dn(row, col);
        if (a_up(row, col) != 0.0) joint(2 * row + 1, 2 * col + 1) = a_up(row, col);
      }
    }
    kraus.push_back(std::move(joint));
  }
  return QuantumChannel::trace_preserving(std::move(kraus));
}

MixedState attenuate_photon(const MixedState& state, const std::string& photon_label,
                            double transmission, const PhotonSpace& space) {
  if (transmission < 0 || transmission > 1)
    throw InvariantError("transmission must lie in [0,1]");
  if (transmission == 1.0) return state;
  const Complex t = std::sqrt(transmission);
  MixedState out = state;
  for (bool early : {true, false}) {
    std::vector<Matrix> kraus;
    for (int k = 0; k <= space.n_max; ++k) {
      kraus.push_back(bin_attenuator_kraus(space, early, t, k));
    }
    out = qcore::apply_channel(out, QuantumChannel::trace_preserving(std::move(kraus)),
                               {photon_label});
  }
  return out;
}

MixedState apply_not_e(const MixedState& state, const std::string& electron, double mw_error) {
  MixedState out = qcore::apply_operator(state, pauli_x(), {electron});
  return bit_flip_channel(out, electron, mw_error);
}

MixedState apply_cn_not_e(const MixedState& state, const std::string& electron,
                          const std::string& nucleus, int control_value, double mw_error) {
  // Digit packing electron*2 + nucleus.
  Matrix u = Matrix::Zero(4, 4);
  for (int e = 0; e < 2; ++e) {
    for (int n = 0; n < 2; ++n) {
      const int e_out = (n == control_value) ? 1 - e : e;
      u(2 * e_out + n, 2 * e + n) = 1.0;
    }
  }
  MixedState out = qcore::apply_operator(state, u, {electron, nucleus});
  return bit_flip_channel(out, electron, mw_error);
}

MixedState e_gamma_gate(const MixedState& state, const std::string& photon,
                        const std::string& electron, const cavity::SpinReflectivities& refl,
                        double mw_error, const PhotonSpace& space) {
  refl.validate();
  const Complex r_up = refl.high_spin == cavity::ElectronSpin::up ? refl.r_high : refl.r_low;
  const Complex r_dn = refl.high_spin == cavity::ElectronSpin::up ? refl.r_low : refl.r_high;

  MixedState out = qcore::apply_channel(
      state, bin_reflection_channel(space, /*early=*/true, r_dn, r_up), {photon, electron});
  out = apply_not_e(out, electron, mw_error);
  out = qcore::apply_channel(out, bin_reflection_channel(space, /*early=*/false, r_dn, r_up),
                             {photon, electron});
  return out;
}

MixedState phone_gate(const MixedState& state, const std::string& photon,
                      const std::string& electron, const std::string& nucleus,
                      const cavity::SpinReflectivities& refl, double mw_error,
                      const PhotonSpace& space) {
  refl.validate();
  const Complex r_up = refl.high_spin == cavity::ElectronSpin::up ? refl.r_high : refl.r_low;
  const Complex r_dn = refl.high_spin == cavity::ElectronSpin::up ? refl.r_low : refl.r_high;

  // Control senses chosen so the ideal single-photon branch ends in
  // (|e down_n> + |l up_n>) |down_e> / sqrt(2).
  MixedState out = apply_cn_not_e(state, electron, nucleus, /*control=*/0, mw_error);
  out = qcore::apply_channel(out, bin_reflection_channel(space, /*early=*/true, r_dn, r_up),
                             {photon, electron});
  out = apply_not_e(out, electron, mw_error);
  out = qcore::apply_channel(out, bin_reflection_channel(space, /*early=*/false, r_dn, r_up),
                             {photon, electron});
  out = apply_cn_not_e(out, electron, nucleus, /*control=*/1, mw_error);
  return out;
}

std::vector<TdiBranch> tdi_branches(const MixedState& state, const std::string& photon,
                                    const TdiModel& tdi, const PhotonSpace& space) {
  const RegisterLayout& layout = state.layout();
  if (layout.dimension_of(photon) != space.dimension())
    throw ShapeError("photon register does not match the photon space");

  std::vector<std::string> spin_labels;
  for (const auto& s : layout.subsystems()) {
    if (s.label != photon) spin_labels.push_back(s.label);
  }

  const Matrix u = plus_minus_transform(space);
  const MixedState rotated = qcore::apply_operator(state, u, {photon});

  const int d = space.dimension();
  const double detect = tdi.path_efficiency * tdi.detector_efficiency;

  // Accumulated spin-state numerators per herald.
  const int spin_dim = spin_labels.empty() ? 1 : [&] {
    int dim = 1;
    for (const auto& l : spin_labels) dim *= layout.dimension_of(l);
    return dim;
  }();
  Matrix acc_plus = Matrix::Zero(spin_dim, spin_dim);
  Matrix acc_minus = Matrix::Zero(spin_dim, spin_dim);
  Matrix acc_none = Matrix::Zero(spin_dim, spin_dim);
  double p_plus = 0, p_minus = 0, p_none = 0;

  for (int i = 0; i < d; ++i) {
    Matrix proj = Matrix::Zero(d, d);
    proj(i, i) = 1.0;
    MixedState projected = qcore::apply_operator(rotated, proj, {photon});
    const double prob = projected.trace_real();
    if (prob < 1e-15) continue;
    MixedState spins = qcore::partial_trace(projected, spin_labels);  // unnormalized

    const auto [np, nm] = space.occupation(i);
    // Detector clicks: mode occupations are measured by absorption whether or
    // not the detector registers, so undetected photons are traced out here.
    for (int kp = 0; kp <= np; ++kp) {
      const double wp = binom(np, kp) * std::pow(detect, kp) * std::pow(1 - detect, np - kp);
      for (int km = 0; km <= nm; ++km) {
        const double wm = binom(nm, km) * std::pow(detect, km) * std::pow(1 - detect, nm - km);
        const double w = wp * wm;
        if (w <= 0) continue;
        if (kp > 0 && km == 0) {
          p_plus += prob * w;
          acc_plus += w * spins.matrix();
        } else if (km > 0 && kp == 0) {
          p_minus += prob * w;
          acc_minus += w * spins.matrix();
        } else {
          // no click, or both detectors clicked (discarded)
          p_none += prob * w;
          acc_none += w * spins.matrix();
        }
      }
    }
  }

  // Visibility error: classical swap of the +/- assignment.
  const double v = tdi.visibility_error;
  if (v > 0) {
    const Matrix swapped_plus = (1 - v) * acc_plus + v * acc_minus;
    const Matrix swapped_minus = (1 - v) * acc_minus + v * acc_plus;
    acc_plus = swapped_plus;
    acc_minus = swapped_minus;
    const double pp = (1 - v) * p_plus + v * p_minus;
    const double pm = (1 - v) * p_minus + v * p_plus;
    p_plus = pp;
    p_minus = pm;
  }

  RegisterLayout spin_layout;
  if (!spin_labels.empty()) {
    std::vector<qcore::Subsystem> subs;
    for (const auto& l : spin_labels) subs.push_back({l, layout.dimension_of(l)});
    spin_layout = RegisterLayout(subs);
  }

  const double p_noise = tdi.false_herald_probability();
  std::vector<TdiBranch> branches;
  auto push = [&](Herald h, bool noise, double p, Matrix m) {
    if (p < 1e-15) return;
    TdiBranch b;
    b.herald = h;
    b.was_noise = noise;
    b.probability = p * (noise ? 1.0 : 1.0 - p_noise);
    m /= m.trace().real();
    b.post_state = MixedState::unchecked(spin_layout, std::move(m));
    branches.push_back(std::move(b));
  };
  push(Herald::plus, false, p_plus, std::move(acc_plus));
  push(Herald::minus, false, p_minus, std::move(acc_minus));
  push(Herald::none, false, p_none, std::move(acc_none));
  if (p_noise > 0) {
    const int sd = spin_layout.total_dimension();
    const Matrix mixed = Matrix::Identity(sd, sd) / sd;
    push(Herald::plus, true, p_noise / 2, mixed);
    push(Herald::minus, true, p_noise / 2, mixed);
  }
  return branches;
}

TdiSample tdi_measure(const MixedState& state, const std::string& photon, const TdiModel& tdi,
                      const PhotonSpace& space, std::uint64_t rng_seed) {
  const auto branches = tdi_branches(state, photon, tdi, space);
  Rng rng(rng_seed);
  double roll = rng.uniform();
  for (const auto& b : branches) {
    if (roll < b.probability) return {b.herald, b.post_state, b.was_noise};
    roll -= b.probability;
  }
  // Residual numerical mass: report a loss.
  return {Herald::none, branches.empty() ? MixedState::maximally_mixed(RegisterLayout{})
                                         : branches.back().post_state,
          false};
}

}  // namespace qnetsim::spinphoton
