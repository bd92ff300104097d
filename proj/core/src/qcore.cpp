#include "qnetsim/qcore.hpp"

#include <algorithm>
#include <unordered_set>

namespace qnetsim::qcore {

RegisterLayout::RegisterLayout(std::vector<Subsystem> subsystems, int dimension_cap)
    : subsystems_(std::move(subsystems)) {
  std::unordered_set<std::string> seen;
  for (const auto& s : subsystems_) {
    if (s.dimension <= 0) {
      throw ShapeError("subsystem '" + s.label + "' has non-positive dimension");
    }
    if (!seen.insert(s.label).second) {
      throw LabelError("duplicate subsystem label '" + s.label + "'");
    }
  }
  total_dimension_ = 1;
  for (const auto& s : subsystems_) {
    if (total_dimension_ > dimension_cap / s.dimension) {
      throw ShapeError("register dimension exceeds cap " + std::to_string(dimension_cap));
    }
    total_dimension_ *= s.dimension;
  }
  strides_.assign(subsystems_.size(), 1);
  for (int i = static_cast<int>(subsystems_.size()) - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] * subsystems_[i + 1].dimension;
  }
}

bool RegisterLayout::contains(std::string_view label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

int RegisterLayout::position(std::string_view label) const {
  for (int i = 0; i < size(); ++i) {
    if (subsystems_[i].label == label) return i;
  }
  throw LabelError("unknown subsystem label '" + std::string(label) + "'");
}

int RegisterLayout::dimension_of(std::string_view label) const {
  return subsystems_[position(label)].dimension;
}

int RegisterLayout::pack(const std::vector<int>& digits) const {
  int index = 0;
  for (int i = 0; i < size(); ++i) index += digits[i] * strides_[i];
  return index;
}

void RegisterLayout::unpack(int index, std::vector<int>& digits) const {
  digits.resize(subsystems_.size());
  for (int i = 0; i < size(); ++i) {
    digits[i] = (index / strides_[i]) % subsystems_[i].dimension;
  }
}

RegisterLayout RegisterLayout::concatenated(const RegisterLayout& other,
                                            int dimension_cap) const {
  std::vector<Subsystem> all = subsystems_;
  all.insert(all.end(), other.subsystems_.begin(), other.subsystems_.end());
  return RegisterLayout(std::move(all), dimension_cap);
}

std::vector<std::string> RegisterLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(subsystems_.size());
  for (const auto& s : subsystems_) out.push_back(s.label);
  return out;
}

PureState::PureState(RegisterLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != layout_.total_dimension()) {
    throw ShapeError("amplitude vector does not match register dimension");
  }
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kNormTol) {
    throw InvariantError("pure state is not normalized");
  }
}

PureState PureState::basis(RegisterLayout layout, const std::vector<int>& digits) {
  if (static_cast<int>(digits.size()) != layout.size()) {
    throw ShapeError("digit count does not match subsystem count");
  }
  Vector amp = Vector::Zero(layout.total_dimension());
  amp(layout.pack(digits)) = 1.0;
  return PureState(std::move(layout), std::move(amp));
}

MixedState PureState::to_mixed() const {
  return MixedState::unchecked(layout_, amplitudes_ * amplitudes_.adjoint());
}

MixedState::MixedState(RegisterLayout layout, Matrix matrix) {
  layout_ = std::move(layout);
  matrix_ = std::move(matrix);
  if (matrix_.rows() != layout_.total_dimension() || matrix_.cols() != matrix_.rows()) {
    throw ShapeError("density matrix does not match register dimension");
  }
  validate();
}

MixedState MixedState::unchecked(RegisterLayout layout, Matrix matrix) {
  MixedState s;
  s.layout_ = std::move(layout);
  s.matrix_ = std::move(matrix);
  return s;
}

MixedState MixedState::maximally_mixed(RegisterLayout layout) {
  const int d = layout.total_dimension();
  return unchecked(std::move(layout), Matrix::Identity(d, d) / static_cast<double>(d));
}

void MixedState::validate(double trace_tol) const {
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw InvariantError("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace().real() - 1.0) > trace_tol ||
      std::abs(matrix_.trace().imag()) > trace_tol) {
    throw InvariantError("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < kEigenvalueFloor) {
    throw InvariantError("density matrix is not positive semidefinite");
  }
}

namespace {

void check_kraus_shapes(const std::vector<Matrix>& kraus) {
  if (kraus.empty()) throw ShapeError("channel needs at least one Kraus operator");
  const auto rows = kraus.front().rows();
  for (const auto& k : kraus) {
    if (k.rows() != rows || k.cols() != rows) {
      throw ShapeError("Kraus operators must be square and share one dimension");
    }
  }
}

Matrix kraus_sum(const std::vector<Matrix>& kraus) {
  Matrix sum = Matrix::Zero(kraus.front().rows(), kraus.front().cols());
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return sum;
}

}  // namespace

QuantumChannel QuantumChannel::trace_preserving(std::vector<Matrix> kraus) {
  check_kraus_shapes(kraus);
  const Matrix sum = kraus_sum(kraus);
  const Matrix id = Matrix::Identity(sum.rows(), sum.cols());
  if ((sum - id).cwiseAbs().maxCoeff() > kKrausTol) {
    throw InvariantError("Kraus operators do not sum to the identity");
  }
  return QuantumChannel(std::move(kraus), true);
}

QuantumChannel QuantumChannel::heralded(std::vector<Matrix> kraus) {
  check_kraus_shapes(kraus);
  const Matrix sum = kraus_sum(kraus);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sum, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().maxCoeff() > 1.0 + kKrausTol) {
    throw InvariantError("heralded channel exceeds the identity");
  }
  return QuantumChannel(std::move(kraus), false);
}

MixedState tensor(const MixedState& a, const MixedState& b) {
  for (const auto& s : b.layout().subsystems()) {
    if (a.layout().contains(s.label)) {
      throw LabelError("tensor operands share label '" + s.label + "'");
    }
  }
  RegisterLayout layout = a.layout().concatenated(b.layout());
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  Matrix out(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (int i = 0; i < ma.rows(); ++i) {
    for (int j = 0; j < ma.cols(); ++j) {
      out.block(i * mb.rows(), j * mb.cols(), mb.rows(), mb.cols()) = ma(i, j) * mb;
    }
  }
  return MixedState::unchecked(std::move(layout), std::move(out));
}

Matrix embed_operator(const RegisterLayout& layout, const Matrix& op,
                      const std::vector<std::string>& targets) {
  if (targets.empty()) throw LabelError("no target subsystems given");
  std::vector<int> positions;
  positions.reserve(targets.size());
  int target_dim = 1;
  for (const auto& label : targets) {
    positions.push_back(layout.position(label));
    target_dim *= layout.dimension_of(label);
  }
  {
    std::unordered_set<int> unique(positions.begin(), positions.end());
    if (unique.size() != positions.size()) throw LabelError("repeated target label");
  }
  if (op.rows() != target_dim || op.cols() != target_dim) {
    throw ShapeError("operator dimension " + std::to_string(op.rows()) +
                     " does not match target dimension " + std::to_string(target_dim));
  }

  // Strides of the packed target index within the full register.
  std::vector<int> digit_strides(positions.size());
  {
    int s = 1;
    for (int i = static_cast<int>(positions.size()) - 1; i >= 0; --i) {
      digit_strides[i] = s;
      s *= layout.subsystems()[positions[i]].dimension;
    }
  }

  const int dim = layout.total_dimension();
  Matrix full = Matrix::Zero(dim, dim);
  std::vector<int> digits;
  for (int col = 0; col < dim; ++col) {
    layout.unpack(col, digits);
    int t_col = 0;
    for (size_t i = 0; i < positions.size(); ++i) t_col += digits[positions[i]] * digit_strides[i];
    // Base index with the target digits zeroed.
    int base = col;
    for (size_t i = 0; i < positions.size(); ++i) {
      base -= digits[positions[i]] * layout.stride(positions[i]);
    }
    for (int t_row = 0; t_row < target_dim; ++t_row) {
      int row = base;
      int rem = t_row;
      for (size_t i = 0; i < positions.size(); ++i) {
        row += (rem / digit_strides[i]) * layout.stride(positions[i]);
        rem %= digit_strides[i];
      }
      if (op(t_row, t_col) != Complex(0.0, 0.0)) full(row, col) = op(t_row, t_col);
    }
  }
  return full;
}

MixedState apply_channel(const MixedState& state, const QuantumChannel& channel,
                         const std::vector<std::string>& targets) {
  Matrix out = Matrix::Zero(state.matrix().rows(), state.matrix().cols());
  for (const auto& k : channel.kraus()) {
    const Matrix full = embed_operator(state.layout(), k, targets);
    out += full * state.matrix() * full.adjoint();
  }
  return MixedState::unchecked(state.layout(), std::move(out));
}

MixedState apply_operator(const MixedState& state, const Matrix& op,
                          const std::vector<std::string>& targets) {
  const Matrix full = embed_operator(state.layout(), op, targets);
  return MixedState::unchecked(state.layout(), full * state.matrix() * full.adjoint());
}

MixedState partial_trace(const MixedState& state, const std::vector<std::string>& keep) {
  const RegisterLayout& layout = state.layout();
  std::vector<int> keep_pos;
  std::vector<Subsystem> kept;
  for (const auto& label : keep) {
    keep_pos.push_back(layout.position(label));
    kept.push_back(layout.subsystems()[keep_pos.back()]);
  }
  {
    std::unordered_set<int> unique(keep_pos.begin(), keep_pos.end());
    if (unique.size() != keep_pos.size()) throw LabelError("repeated label in keep set");
  }
  std::vector<int> traced_pos;
  for (int i = 0; i < layout.size(); ++i) {
    if (std::find(keep_pos.begin(), keep_pos.end(), i) == keep_pos.end())
      traced_pos.push_back(i);
  }

  RegisterLayout out_layout{kept};
  int traced_dim = 1;
  for (int p : traced_pos) traced_dim *= layout.subsystems()[p].dimension;

  const int out_dim = out_layout.total_dimension();
  Matrix out = Matrix::Zero(out_dim, out_dim);

  // Enumerate kept-row, kept-col, traced multi-indices and sum the diagonal
  // over the traced digits.
  std::vector<int> kept_digits_row(keep_pos.size()), kept_digits_col(keep_pos.size());
  std::vector<int> traced_digits(traced_pos.size());
  for (int r = 0; r < out_dim; ++r) {
    out_layout.unpack(r, kept_digits_row);
    for (int c = 0; c < out_dim; ++c) {
      out_layout.unpack(c, kept_digits_col);
      Complex sum = 0.0;
      for (int t = 0; t < traced_dim; ++t) {
        int rem = t;
        for (int i = static_cast<int>(traced_pos.size()) - 1; i >= 0; --i) {
          traced_digits[i] = rem % layout.subsystems()[traced_pos[i]].dimension;
          rem /= layout.subsystems()[traced_pos[i]].dimension;
        }
        int row = 0, col = 0;
        for (size_t i = 0; i < keep_pos.size(); ++i) {
          row += kept_digits_row[i] * layout.stride(keep_pos[i]);
          col += kept_digits_col[i] * layout.stride(keep_pos[i]);
        }
        for (size_t i = 0; i < traced_pos.size(); ++i) {
          const int off = traced_digits[i] * layout.stride(traced_pos[i]);
          row += off;
          col += off;
        }
        sum += state.matrix()(row, col);
      }
      out(r, c) = sum;
    }
  }
  return MixedState::unchecked(std::move(out_layout), std::move(out));
}

std::vector<MeasurementBranch> measure_projective(const MixedState& state,
                                                  std::string_view target,
                                                  const std::vector<Matrix>& projectors) {
  const std::string label(target);
  const int d = state.layout().dimension_of(label);
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& p : projectors) {
    if (p.rows() != d || p.cols() != d) throw ShapeError("projector dimension mismatch");
    sum += p;
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kProjectorTol) {
    throw InvariantError("projector set is incomplete on target '" + label + "'");
  }

  constexpr double kBranchEps = 1e-12;
  std::vector<MeasurementBranch> branches;
  branches.reserve(projectors.size());
  for (const auto& p : projectors) {
    MixedState post = apply_operator(state, p, {label});
    const double prob = post.trace_real();
    MeasurementBranch branch;
    branch.probability = std::max(prob, 0.0);
    if (prob > kBranchEps) {
      post.mutable_matrix() /= prob;
      branch.post_state = std::move(post);
      branch.negligible = false;
    } else {
      branch.post_state = std::move(post);  // unnormalized residue, flagged
      branch.negligible = true;
    }
    branches.push_back(std::move(branch));
  }
  return branches;
}

double fidelity_to(const MixedState& state, const PureState& target) {
  if (state.layout().total_dimension() != target.layout().total_dimension()) {
    throw ShapeError("fidelity operands have different dimensions");
  }
  const Vector& v = target.amplitudes();
  return (v.adjoint() * state.matrix() * v)(0, 0).real();
}

double min_eigenvalue(const MixedState& state) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(state.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace qnetsim::qcore
