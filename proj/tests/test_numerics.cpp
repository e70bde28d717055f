#include <doctest.h>

#include "cgf/numerics.hpp"
#include "oracles.hpp"

using namespace cgf;
using oracle::diag;
using oracle::real;

namespace {

bool throws_code(ErrorCode code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("adjoint conjugates and transposes") {
  CHECK(adjoint(identity(3)) == identity(3));
  CHECK(adjoint(real({{0, 1}, {0, 0}})) == real({{0, 0}, {1, 0}}));
  Matrix z(1, 1);
  z(0, 0) = Scalar(0, 1);
  CHECK(adjoint(z)(0, 0) == Scalar(0, -1));

  oracle::Source src(1);
  for (int k = 0; k < 20; ++k) {
    const Matrix m = src.matrix(src.integer(1, 6), src.integer(1, 6));
    CHECK(adjoint(adjoint(m)) == m);
    CHECK(adjoint(m).rows() == m.cols());
  }
}

TEST_CASE("herm_eig on small closed forms") {
  const HermitianEigen d = herm_eig(diag({3, 1, 2}));
  CHECK(d.values(0) == doctest::Approx(1));
  CHECK(d.values(1) == doctest::Approx(2));
  CHECK(d.values(2) == doctest::Approx(3));

  const HermitianEigen s = herm_eig(real({{0, 1}, {1, 0}}));
  CHECK(s.values(0) == doctest::Approx(-1));
  CHECK(s.values(1) == doctest::Approx(1));
}

TEST_CASE("herm_eig agrees with the inertia-bisection oracle") {
  oracle::Source src(42);
  const Matrix h = src.hermitian(6);
  const HermitianEigen e = herm_eig(h);
  const auto ref = oracle::eigenvalues(oracle::from(h));
  for (int k = 0; k < 6; ++k) CHECK(std::abs(e.values(k) - ref[k]) <= 1e-9);

  const double scale = op_norm(h);
  CHECK(op_norm(e.vectors.adjoint() * e.vectors - identity(6)) <= 1e-9);
  const Matrix rebuilt = e.vectors * e.values.cast<Scalar>().asDiagonal() * e.vectors.adjoint();
  CHECK(op_norm(rebuilt - h) <= 1e-9 * scale);
}

TEST_CASE("herm_eig rejects bad input") {
  CHECK(throws_code(ErrorCode::NotSquare, [] { herm_eig(Matrix::Zero(2, 3)); }));
  CHECK(throws_code(ErrorCode::NotSelfAdjoint, [] { herm_eig(real({{0, 1}, {0, 0}})); }));
}

TEST_CASE("property: eigenvalue sum equals trace, ascending order") {
  oracle::Source src(5);
  for (int k = 0; k < 50; ++k) {
    const Index n = src.integer(1, 8);
    const Matrix h = src.hermitian(n);
    const HermitianEigen e = herm_eig(h);
    CHECK(std::abs(e.values.sum() - h.trace().real()) <= 1e-9 * std::max(1.0, op_norm(h)));
    for (Index i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
  }
}

TEST_CASE("op_norm closed forms and oracles") {
  CHECK(op_norm(identity(4)) == doctest::Approx(1));
  CHECK(op_norm(diag({2, -3})) == doctest::Approx(3));

  oracle::Source src(7);
  const Matrix m = src.matrix(5, 3);
  const double norm = op_norm(m);
  double best = 0.0;
  for (int k = 0; k < 10000; ++k) best = std::max(best, (m * src.unit(3)).norm());
  CHECK(best <= norm + 1e-12);
  // Power iteration on M^* M converges to the norm from below.
  Vector x = src.unit(3);
  for (int k = 0; k < 500; ++k) x = (m.adjoint() * (m * x)).normalized();
  CHECK(std::abs((m * x).norm() - norm) <= 1e-9 * norm);
  CHECK(std::abs(norm - oracle::op_norm(oracle::from(m))) <= 1e-9 * norm);
}

TEST_CASE("property: op_norm of adjoint") {
  oracle::Source src(8);
  for (int k = 0; k < 50; ++k) {
    const Index n = src.integer(1, 7);
    const Matrix m = src.matrix(n, n);
    CHECK(std::abs(op_norm(m) - op_norm(adjoint(m))) <= 1e-9);
  }
}

TEST_CASE("invert") {
  CHECK(op_norm(invert(diag({2, 4})) - diag({0.5, 0.25})) <= 1e-15);
  CHECK(invert(identity(5)) == identity(5));
  CHECK(throws_code(ErrorCode::Singular, [] { invert(real({{1, 1}, {0, 0}})); }));
  CHECK(throws_code(ErrorCode::NotSquare, [] { invert(Matrix::Zero(2, 1)); }));

  oracle::Source src(9);
  for (int k = 0; k < 50; ++k) {
    const Index n = src.integer(1, 8);
    const Matrix m = src.matrix(n, n);
    const Matrix inv = invert(m);
    const double slack = 1e-9 * std::max(1.0, condition_number(m));
    CHECK(op_norm(m * inv - identity(n)) <= slack);
    CHECK(op_norm(inv * m - identity(n)) <= slack);
  }
}

TEST_CASE("positivity verdicts") {
  const PositivityVerdict a = positivity_verdict(diag({1, 2}));
  CHECK(a.is_positive);
  CHECK(a.lambda_min == doctest::Approx(1));
  CHECK(a.lambda_max == doctest::Approx(2));

  const PositivityVerdict b = positivity_verdict(real({{0, 1}, {1, 0}}));
  CHECK(b.is_self_adjoint);
  CHECK_FALSE(b.is_positive);
  CHECK(b.lambda_min == doctest::Approx(-1));

  const PositivityVerdict c = positivity_verdict(real({{0, 1}, {0, 0}}));
  CHECK_FALSE(c.is_self_adjoint);
  CHECK_FALSE(c.is_positive);

  CHECK(throws_code(ErrorCode::NotSquare, [] { positivity_verdict(Matrix::Zero(1, 2)); }));
}

TEST_CASE("property: positive verdict sandwiches the quadratic form") {
  oracle::Source src(11);
  for (int k = 0; k < 30; ++k) {
    const Index n = src.integer(1, 6);
    const Matrix p = src.positive(n, 0.1, 5.0);
    const PositivityVerdict v = positivity_verdict(p);
    REQUIRE(v.is_positive);
    CHECK(v.lambda_min <= v.lambda_max);
    for (int s = 0; s < 100; ++s) {
      const Vector f = src.unit(n);
      const double q = f.dot(p * f).real();
      CHECK(q >= v.lambda_min - 1e-9);
      CHECK(q <= v.lambda_max + 1e-9);
    }
  }
}

TEST_CASE("finiteness and tolerances") {
  Matrix m = identity(2);
  CHECK(all_finite(m));
  m(0, 1) = Scalar(std::nan(""), 0);
  CHECK_FALSE(all_finite(m));
  CHECK(throws_code(ErrorCode::NonFinite, [&] { require_finite(m, "m"); }));

  Tolerances t;
  CHECK_NOTHROW(t.validate());
  t.eq_tol = 0.0;
  CHECK(throws_code(ErrorCode::InvalidArgument, [&] { t.validate(); }));
}

TEST_CASE("singular values, condition number, commutators") {
  const RealVector s = singular_values(diag({1, -4, 2}));
  CHECK(s(0) == doctest::Approx(4));
  CHECK(s(2) == doctest::Approx(1));
  CHECK(condition_number(diag({1, 4})) == doctest::Approx(4));
  CHECK(std::isinf(condition_number(diag({1, 0}))));
  CHECK(min_singular_value(Matrix::Ones(1, 3)) == 0.0);
  CHECK(commutator_norm(diag({1, 2}), diag({3, 4})) == 0.0);
  CHECK(commutator_norm(real({{0, 1}, {0, 0}}), real({{0, 0}, {1, 0}})) == doctest::Approx(1));
}
