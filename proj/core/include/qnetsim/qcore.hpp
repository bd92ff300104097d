#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qnetsim/errors.hpp"

// Dense density-matrix engine for small registers of labeled subsystems.
// Subsystem order is explicit; every embedding is computed by index
// arithmetic against the layout, never by implicit position.
namespace qnetsim::qcore {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Numerical tolerances shared with the test suite.
inline constexpr double kNormTol = 1e-10;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenvalueFloor = -1e-9;
inline constexpr double kKrausTol = 1e-9;
inline constexpr double kProjectorTol = 1e-9;
inline constexpr int kDefaultDimensionCap = 256;

struct Subsystem {
  std::string label;
  int dimension = 2;
  bool operator==(const Subsystem&) const = default;
};

class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Subsystem> subsystems,
                          int dimension_cap = kDefaultDimensionCap);

  int size() const { return static_cast<int>(subsystems_.size()); }
  int total_dimension() const { return total_dimension_; }
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }

  bool contains(std::string_view label) const;
  int position(std::string_view label) const;  // throws LabelError
  int dimension_of(std::string_view label) const;
  int stride(int position) const { return strides_[position]; }

  // Basis index <-> per-subsystem digits (first subsystem most significant).
  int pack(const std::vector<int>& digits) const;
  void unpack(int index, std::vector<int>& digits) const;

  RegisterLayout concatenated(const RegisterLayout& other,
                              int dimension_cap = kDefaultDimensionCap) const;
  std::vector<std::string> labels() const;

  bool operator==(const RegisterLayout&) const = default;

 private:
  std::vector<Subsystem> subsystems_;
  std::vector<int> strides_;
  int total_dimension_ = 1;
};

class MixedState;

class PureState {
 public:
  PureState(RegisterLayout layout, Vector amplitudes);  // checks unit norm

  const RegisterLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amplitudes_; }
  MixedState to_mixed() const;

  // Basis ket |digits...>, e.g. basis(layout, {0,1}) = |01>.
  static PureState basis(RegisterLayout layout, const std::vector<int>& digits);

 private:
  RegisterLayout layout_;
  Vector amplitudes_;
};

class MixedState {
 public:
  MixedState() = default;  // empty placeholder; fill via the named constructors
  MixedState(RegisterLayout layout, Matrix matrix);  // validates invariants

  // Fast path for internally produced matrices; skips validation.
  static MixedState unchecked(RegisterLayout layout, Matrix matrix);
  static MixedState maximally_mixed(RegisterLayout layout);

  const RegisterLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }
  Matrix& mutable_matrix() { return matrix_; }

  double trace_real() const { return matrix_.trace().real(); }
  void validate(double trace_tol = kTraceTol) const;

 private:
  RegisterLayout layout_;
  Matrix matrix_;
};

// Kraus-operator channel; operators act on the subsystems named at
// application time (all operators share one square dimension).
class QuantumChannel {
 public:
  // Sum K^dag K = I within kKrausTol.
  static QuantumChannel trace_preserving(std::vector<Matrix> kraus);
  // Sum K^dag K <= I; the deficit is the probability routed to a discarded
  // branch (heralded loss).
  static QuantumChannel heralded(std::vector<Matrix> kraus);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  int dimension() const { return kraus_.empty() ? 0 : static_cast<int>(kraus_.front().rows()); }
  bool is_trace_preserving() const { return trace_preserving_; }

 private:
  QuantumChannel(std::vector<Matrix> kraus, bool tp)
      : kraus_(std::move(kraus)), trace_preserving_(tp) {}
  std::vector<Matrix> kraus_;
  bool trace_preserving_ = true;
};

struct MeasurementBranch {
  double probability = 0.0;
  MixedState post_state;   // renormalized; meaningless when negligible
  bool negligible = false; // probability below threshold, state not divided out
};

// Kronecker product of disjointly labeled states.
MixedState tensor(const MixedState& a, const MixedState& b);

// Lift `op` (dimension = product of target dimensions, target digits packed in
// the order given) to the full register.
Matrix embed_operator(const RegisterLayout& layout, const Matrix& op,
                      const std::vector<std::string>& targets);

// rho -> sum_k K rho K^dag on the named targets.
MixedState apply_channel(const MixedState& state, const QuantumChannel& channel,
                         const std::vector<std::string>& targets);

// rho -> K rho K^dag for a single operator (unitary or heralding filter);
// no completeness check, trace may shrink.
MixedState apply_operator(const MixedState& state, const Matrix& op,
                          const std::vector<std::string>& targets);

// Reduced state over `keep` (result subsystem order follows `keep`).
MixedState partial_trace(const MixedState& state, const std::vector<std::string>& keep);

// Projective measurement on one subsystem. Projectors must sum to the
// identity within kProjectorTol. Zero-probability branches come back flagged
// `negligible` instead of dividing by ~0.
std::vector<MeasurementBranch> measure_projective(const MixedState& state,
                                                  std::string_view target,
                                                  const std::vector<Matrix>& projectors);

double fidelity_to(const MixedState& state, const PureState& target);  // <psi|rho|psi>
double min_eigenvalue(const MixedState& state);

}  // namespace qnetsim::qcore
