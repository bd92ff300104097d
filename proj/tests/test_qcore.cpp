#include <doctest.h>

#include <complex>

#include "qnetsim/qcore.hpp"
#include "qnetsim/rng.hpp"

using namespace qnetsim;
using qcore::Complex;
using qcore::Matrix;
using qcore::MixedState;
using qcore::PureState;
using qcore::QuantumChannel;
using qcore::RegisterLayout;
using qcore::Vector;

namespace {

RegisterLayout qubit(const std::string& label) { return RegisterLayout({{label, 2}}); }

MixedState basis_qubit(const std::string& label, int value) {
  return PureState::basis(qubit(label), {value}).to_mixed();
}

// Random density matrix via a Ginibre draw, d x d.
Matrix random_density(int d, Rng& rng) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Matrix projector(int d, int index) {
  Matrix p = Matrix::Zero(d, d);
  p(index, index) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("layout rejects duplicate labels and enforces the dimension cap") {
  CHECK_THROWS_AS(RegisterLayout({{"a", 2}, {"a", 2}}), LabelError);
  CHECK_THROWS_AS(RegisterLayout({{"a", 300}}), ShapeError);
  CHECK_NOTHROW(RegisterLayout({{"a", 16}, {"b", 16}}));
  CHECK_THROWS_AS(RegisterLayout({{"a", 16}, {"b", 17}}), ShapeError);
  CHECK_THROWS_AS(qubit("a").position("zz"), LabelError);
}

TEST_CASE("tensor of basis states is the joint basis state") {
  const auto joint = qcore::tensor(basis_qubit("a", 0), basis_qubit("b", 1));
  CHECK(joint.layout().total_dimension() == 4);
  CHECK(joint.matrix()(1, 1).real() == doctest::Approx(1.0));
  CHECK(joint.matrix().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("tensor of maximally mixed qubits is I/4") {
  const auto a = MixedState::maximally_mixed(qubit("a"));
  const auto b = MixedState::maximally_mixed(qubit("b"));
  const auto joint = qcore::tensor(a, b);
  CHECK((joint.matrix() - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(qcore::tensor(a, a), LabelError);
}

TEST_CASE("tensor eigenvalues are pairwise products of the factors") {
  Rng rng(41);
  const Matrix ra = random_density(2, rng);
  const Matrix rb = random_density(2, rng);
  const auto joint =
      qcore::tensor(MixedState(qubit("a"), ra), MixedState(qubit("b"), rb));
  CHECK(joint.trace_real() == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::SelfAdjointEigenSolver<Matrix> sa(ra), sb(rb), sj(joint.matrix());
  std::vector<double> expected;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) expected.push_back(sa.eigenvalues()(i) * sb.eigenvalues()(j));
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 4; ++i) CHECK(sj.eigenvalues()(i) == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("identity channel leaves the state untouched") {
  Rng rng(5);
  const MixedState state(qubit("a"), random_density(2, rng));
  const auto channel = QuantumChannel::trace_preserving({Matrix::Identity(2, 2)});
  const auto out = qcore::apply_channel(state, channel, {"a"});
  CHECK((out.matrix() - state.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("full depolarizing channel on one qubit of |00>") {
  const auto joint = qcore::tensor(basis_qubit("a", 0), basis_qubit("b", 0));
  Matrix x(2, 2), y(2, 2), z(2, 2), id = Matrix::Identity(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  const auto channel = QuantumChannel::trace_preserving(
      {0.5 * id, 0.5 * x, 0.5 * y, 0.5 * z});
  const auto out = qcore::apply_channel(joint, channel, {"a"});
  // (I/2) (x) |0><0|
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 0.5;
  expected(2, 2) = 0.5;
  CHECK((out.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bit-flip channel produces the hand-computed mixture") {
  const double p = 0.3;
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto channel = QuantumChannel::trace_preserving(
      {std::sqrt(1 - p) * Matrix::Identity(2, 2), std::sqrt(p) * x});
  const auto out = qcore::apply_channel(basis_qubit("a", 0), channel, {"a"});
  CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.7));
  CHECK(out.matrix()(1, 1).real() == doctest::Approx(0.3));
}

TEST_CASE("channel construction checks Kraus completeness") {
  Matrix half = 0.5 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(QuantumChannel::trace_preserving({half}), InvariantError);
  CHECK_NOTHROW(QuantumChannel::heralded({half}));
  CHECK_THROWS_AS(QuantumChannel::heralded({2.0 * Matrix::Identity(2, 2)}), InvariantError);
}

TEST_CASE("apply_channel rejects dimension mismatches") {
  const auto state = basis_qubit("a", 0);
  const auto channel = QuantumChannel::trace_preserving({Matrix::Identity(4, 4)});
  CHECK_THROWS_AS(qcore::apply_channel(state, channel, {"a"}), ShapeError);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
  Vector amp = Vector::Zero(4);
  amp(0) = amp(3) = 1.0 / std::sqrt(2.0);
  const PureState bell(RegisterLayout({{"a", 2}, {"b", 2}}), amp);
  const auto reduced = qcore::partial_trace(bell.to_mixed(), {"a"});
  CHECK((reduced.matrix() - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of a product recovers the factor") {
  Rng rng(6);
  const Matrix ra = random_density(2, rng);
  const Matrix rb = random_density(3, rng);
  const auto joint = qcore::tensor(MixedState(qubit("a"), ra),
                                   MixedState(RegisterLayout({{"b", 3}}), rb));
  const auto back = qcore::partial_trace(joint, {"a"});
  CHECK((back.matrix() - ra).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(qcore::partial_trace(joint, {"zz"}), LabelError);
}

TEST_CASE("partial trace of a 3-qubit state matches the index-summation oracle") {
  Rng rng(7);
  const RegisterLayout layout({{"q1", 2}, {"q2", 2}, {"q3", 2}});
  const MixedState state(layout, random_density(8, rng));
  const auto reduced = qcore::partial_trace(state, {"q1", "q3"});

  // Explicit loop oracle: rho'[(a,c),(a',c')] = sum_b rho[(a,b,c),(a',b,c')]
  Matrix oracle = Matrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      for (int ap = 0; ap < 2; ++ap)
        for (int cp = 0; cp < 2; ++cp) {
          Complex sum = 0;
          for (int b = 0; b < 2; ++b)
            sum += state.matrix()(4 * a + 2 * b + c, 4 * ap + 2 * b + cp);
          oracle(2 * a + c, 2 * ap + cp) = sum;
        }
  CHECK((reduced.matrix() - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("measuring |+> in Z gives two equal branches") {
  Vector amp(2);
  amp << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const auto state = PureState(qubit("a"), amp).to_mixed();
  const auto branches = qcore::measure_projective(state, "a", {projector(2, 0), projector(2, 1)});
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].probability == doctest::Approx(0.5));
  CHECK(branches[1].probability == doctest::Approx(0.5));
  CHECK(branches[0].post_state.matrix()(0, 0).real() == doctest::Approx(1.0));
  CHECK(branches[1].post_state.matrix()(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("measuring |0> in Z yields one branch, the other flagged negligible") {
  const auto branches =
      qcore::measure_projective(basis_qubit("a", 0), "a", {projector(2, 0), projector(2, 1)});
  CHECK(branches[0].probability == doctest::Approx(1.0));
  CHECK_FALSE(branches[0].negligible);
  CHECK(branches[1].negligible);
}

TEST_CASE("incomplete projector sets are rejected") {
  CHECK_THROWS_AS(qcore::measure_projective(basis_qubit("a", 0), "a", {projector(2, 0)}),
                  InvariantError);
}

TEST_CASE("measuring a Bell state's first qubit in the +- basis splits into spin branches") {
  Vector amp = Vector::Zero(4);
  amp(0) = amp(3) = 1.0 / std::sqrt(2.0);
  const auto bell = PureState(RegisterLayout({{"photon", 2}, {"spin", 2}}), amp).to_mixed();
  Matrix plus(2, 2), minus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  minus << 0.5, -0.5, -0.5, 0.5;
  const auto branches = qcore::measure_projective(bell, "photon", {plus, minus});
  CHECK(branches[0].probability == doctest::Approx(0.5));
  CHECK(branches[1].probability == doctest::Approx(0.5));
  // Full-matrix oracle: post spins are (|0>+|1>)/sqrt2 and (|0>-|1>)/sqrt2.
  const auto spin_plus = qcore::partial_trace(branches[0].post_state, {"spin"});
  const auto spin_minus = qcore::partial_trace(branches[1].post_state, {"spin"});
  CHECK(spin_plus.matrix()(0, 1).real() == doctest::Approx(0.5));
  CHECK(spin_minus.matrix()(0, 1).real() == doctest::Approx(-0.5));
}

TEST_CASE("properties: trace preservation, positivity, measurement oracle") {
  Rng rng(11);
  for (int round = 0; round < 20; ++round) {
    const int da = 2 + static_cast<int>(rng.next() % 3);  // 2..4
    const int db = 2 + static_cast<int>(rng.next() % 2);  // 2..3
    const RegisterLayout layout({{"a", da}, {"b", db}});
    const MixedState state(layout, random_density(da * db, rng));

    // Random contraction completed into a trace-preserving pair.
    Matrix k0(da, da);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j) k0(i, j) = Complex(rng.normal(), rng.normal());
    k0 *= 0.5 / k0.operatorNorm();
    Matrix gram = Matrix::Identity(da, da) - k0.adjoint() * k0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    Matrix k1 = es.operatorSqrt();
    const auto channel = QuantumChannel::trace_preserving({k0, k1});

    const auto out = qcore::apply_channel(state, channel, {"a"});
    CHECK(std::abs(out.trace_real() - 1.0) < 1e-9);
    CHECK(qcore::min_eigenvalue(out) > -1e-8);

    // measure_projective probabilities against the brute-force trace oracle
    std::vector<Matrix> projs;
    for (int i = 0; i < db; ++i) projs.push_back(projector(db, i));
    const auto branches = qcore::measure_projective(out, "b", projs);
    double total = 0;
    for (int i = 0; i < db; ++i) {
      const Matrix full = qcore::embed_operator(layout, projs[i], {"b"});
      const double oracle = (full * out.matrix() * full.adjoint()).trace().real();
      CHECK(branches[i].probability == doctest::Approx(oracle).epsilon(1e-10));
      total += branches[i].probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("partial_trace(tensor(a,b), labels(a)) == a elementwise") {
  Rng rng(13);
  for (int round = 0; round < 10; ++round) {
    const Matrix ra = random_density(3, rng);
    const Matrix rb = random_density(4, rng);
    const auto joint = qcore::tensor(MixedState(RegisterLayout({{"a", 3}}), ra),
                                     MixedState(RegisterLayout({{"b", 4}}), rb));
    const auto back = qcore::partial_trace(joint, {"a"});
    CHECK((back.matrix() - ra).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("state validation catches broken invariants") {
  Matrix bad(2, 2);
  bad << 1.0, 0.5, -0.5, 0.0;  // not Hermitian
  CHECK_THROWS_AS(MixedState(qubit("a"), bad), InvariantError);
  Matrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;  // negative eigenvalue
  CHECK_THROWS_AS(MixedState(qubit("a"), neg), InvariantError);
  Vector unnorm(2);
  unnorm << 1.0, 1.0;
  CHECK_THROWS_AS(PureState(qubit("a"), unnorm), InvariantError);
}
