#include <doctest.h>

#include <cmath>

#include "cgf/harness/generators.hpp"
#include "cgf/perturb.hpp"
#include "oracles.hpp"

using namespace cgf;
using oracle::coordinate_frame;
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

Controller ctl(const Matrix& m) { return Controller::make(m); }

PerturbationParams exact(std::vector<double> c, const Controller& t, const Controller& u) {
  return PerturbationParams{0.0, 0.0, std::move(c), t, u};
}

}  // namespace

TEST_CASE("parameter validation") {
  const Controller i2 = Controller::identity(2);
  CHECK(throws_code(ErrorCode::InvalidArgument,
                    [&] { PerturbationParams{1.0, 0.0, {0, 0}, i2, i2}.validate(2); }));
  CHECK(throws_code(ErrorCode::InvalidArgument,
                    [&] { PerturbationParams{0.0, -0.1, {0, 0}, i2, i2}.validate(2); }));
  CHECK(throws_code(ErrorCode::InvalidArgument,
                    [&] { exact({0, -1}, i2, i2).validate(2); }));
  CHECK(throws_code(ErrorCode::ShapeMismatch, [&] { exact({0}, i2, i2).validate(2); }));
  CHECK(exact({3, 4}, i2, i2).c_norm() == doctest::Approx(5));
}

TEST_CASE("certification with lambda = 0 is decided exactly") {
  const GFrame f = coordinate_frame(2);
  const Controller i2 = Controller::identity(2);

  const PerturbationCertificate same = certify_perturbation(f, f, exact({0, 0}, i2, i2));
  CHECK(same.mode == CertificateMode::certified);
  CHECK(same.margin == 0.0);

  const PerturbationCertificate ok = certify_perturbation(f, f.scaled(0.9), exact({0.1, 0.1}, i2, i2));
  CHECK(ok.mode == CertificateMode::certified);
  CHECK(std::abs(ok.margin) <= 1e-15);

  const PerturbationCertificate bad =
      certify_perturbation(f, f.scaled(0.9), exact({0.05, 0.05}, i2, i2));
  REQUIRE(bad.mode == CertificateMode::violated);
  REQUIRE(bad.witness.has_value());
  REQUIRE(bad.index.has_value());
  CHECK(bad.margin == doctest::Approx(-0.05));
  // The witness is the coordinate vector of the offending block, up to phase.
  const Vector& w = *bad.witness;
  CHECK(std::abs(std::abs(w(static_cast<Index>(*bad.index))) - 1.0) <= 1e-12);
  // It reproduces the violation by more than eq_tol.
  const Matrix& lam = f.block(*bad.index);
  const double lhs = (lam * w - 0.9 * lam * w).norm();
  CHECK(lhs - 0.05 * w.norm() > 1e-9);

  CHECK(throws_code(ErrorCode::ShapeMismatch, [&] {
    certify_perturbation(f, coordinate_frame(3), exact({0, 0}, i2, i2));
  }));
}

TEST_CASE("property: reflexivity") {
  oracle::Source src(70);
  for (int k = 0; k < 50; ++k) {
    const GFrame f = src.frame(src.integer(1, 6));
    const Index n = f.ambient_dim();
    const Controller t = ctl(src.matrix(n, n));
    const PerturbationCertificate c =
        certify_perturbation(f, f, exact(std::vector<double>(f.size(), 0.0), t, t));
    CHECK(c.mode == CertificateMode::certified);
  }
}

TEST_CASE("property: certified iff every block defect is within c_i") {
  oracle::Source src(71);
  for (int k = 0; k < 100; ++k) {
    const GFrame f = src.frame(src.integer(1, 5));
    const Index n = f.ambient_dim();
    const GFrame g = gen_perturbed(f, src.uniform(0.0, 0.5), 1000 + k);
    const Controller t = ctl(src.matrix(n, n));
    const Controller u = ctl(src.matrix(n, n));
    std::vector<double> defects, c;
    for (std::size_t i = 0; i < f.size(); ++i) {
      // Defect by the inertia oracle on D^* D.
      const Matrix d = f.block(i) * t.matrix() - g.block(i) * u.matrix();
      defects.push_back(oracle::op_norm(oracle::from(d)));
      c.push_back(defects.back() * src.uniform(0.9, 1.1));
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, defects[i] - c[i]);
    if (std::abs(worst) < 1e-8) continue;  // too close to call against the oracle
    const PerturbationCertificate cert = certify_perturbation(f, g, exact(c, t, u));
    CHECK((cert.mode == CertificateMode::certified) == (worst <= 0.0));
    if (cert.mode == CertificateMode::violated) CHECK(cert.witness.has_value());
  }
}

TEST_CASE("positive lambda falls back to sampling") {
  const GFrame f = coordinate_frame(2);
  const Controller i2 = Controller::identity(2);
  // |0.1 x_i| <= 0.5 |0.9 x_i| + 0.01 |x| always holds, but the op-norm test fails.
  const PerturbationParams p{0.0, 0.5, {0.01, 0.01}, i2, i2};
  const PerturbationCertificate a = certify_perturbation(f, f.scaled(0.9), p, 500, 3);
  CHECK(a.mode == CertificateMode::sampled);
  CHECK(a.trials == 500);
  CHECK(a.margin >= 0.0);

  // Loose op-norm test passes: certified without sampling.
  const PerturbationParams q{0.2, 0.2, {0.1, 0.1}, i2, i2};
  CHECK(certify_perturbation(f, f.scaled(0.9), q, 500, 3).mode == CertificateMode::certified);

  // A genuine failure is found and reported with a witness.
  const PerturbationParams r{0.01, 0.01, {0.0, 0.0}, i2, i2};
  const PerturbationCertificate c = certify_perturbation(f, f.scaled(0.5), r, 500, 3);
  CHECK(c.mode == CertificateMode::violated);
  CHECK(c.witness.has_value());

  // Sampling is deterministic in the seed.
  const PerturbationCertificate b = certify_perturbation(f, f.scaled(0.9), p, 500, 3);
  CHECK(b.margin == a.margin);
}

TEST_CASE("predicted bounds closed forms") {
  const Controller i2 = Controller::identity(2);
  const FrameBounds a = predicted_perturbed_bounds(1, 1, exact({0, 0}, i2, i2));
  CHECK(a.lower == doctest::Approx(1));
  CHECK(a.upper == doctest::Approx(1));
  CHECK(a.provenance == BoundsProvenance::predicted);

  const FrameBounds b = predicted_perturbed_bounds(1, 1, exact({0, 0}, i2, ctl(2.0 * identity(2))));
  CHECK(b.lower == doctest::Approx(0.25));
  CHECK(b.upper == doctest::Approx(0.25));

  const FrameBounds c = predicted_perturbed_bounds(1, 2, exact({0, 0}, ctl(2.0 * identity(2)), i2));
  CHECK(c.lower == doctest::Approx(4));
  CHECK(c.upper == doctest::Approx(8));

  // (1 - lambda1) sqrt(A) / |T^-1| must exceed |c|.
  CHECK(throws_code(ErrorCode::HypothesisUnmet,
                    [&] { predicted_perturbed_bounds(1, 1, exact({0.6, 0.8}, i2, i2)); }));
}

TEST_CASE("property: larger c widens the predicted interval") {
  oracle::Source src(72);
  for (int k = 0; k < 200; ++k) {
    const Index n = src.integer(1, 4);
    const Controller t = ctl(identity(n) + 0.2 * src.matrix(n, n) / std::sqrt(double(n)));
    const Controller u = ctl(src.matrix(n, n));
    const double a = src.uniform(0.5, 2.0);
    const double b = a + src.uniform(0.0, 2.0);
    const std::size_t m = static_cast<std::size_t>(src.integer(1, 4));
    std::vector<double> c(m);
    for (auto& x : c) x = src.uniform(0.0, 0.05);
    PerturbationParams p{src.uniform(0.0, 0.3), src.uniform(0.0, 0.3), c, t, u};
    FrameBounds before;
    try {
      before = predicted_perturbed_bounds(a, b, p);
    } catch (const Error&) {
      continue;
    }
    CHECK(before.lower <= before.upper);
    p.c[static_cast<std::size_t>(src.integer(0, static_cast<int>(m) - 1))] += src.uniform(0.0, 0.01);
    try {
      const FrameBounds after = predicted_perturbed_bounds(a, b, p);
      CHECK(after.lower <= before.lower);
      CHECK(after.upper >= before.upper);
    } catch (const Error& e) {
      // Gate closing is the limit of the lower bound reaching zero.
      CHECK(e.code() == ErrorCode::HypothesisUnmet);
    }
  }
}

TEST_CASE("sharpness scenarios attain the predicted bounds") {
  const Controller i2 = Controller::identity(2);
  const GFrame f = coordinate_frame(2);

  const PerturbationReport a = verify_perturbation_theorem(f, f, exact({0, 0}, i2, i2));
  CHECK(std::abs(a.slack_lower) <= 1e-10);
  CHECK(std::abs(a.slack_upper) <= 1e-10);

  // G = F / 2 with U = 2I: Gamma_i U = Lambda_i.
  const PerturbationReport b =
      verify_perturbation_theorem(f, f.scaled(0.5), exact({0, 0}, i2, ctl(2.0 * identity(2))));
  CHECK(b.actual.lower == doctest::Approx(0.25));
  CHECK(std::abs(b.slack_lower) <= 1e-10);
  CHECK(std::abs(b.slack_upper) <= 1e-10);

  // F with bounds (1, 2), T = 2I, G = 2F.
  const GFrame h(2, {real({{1, 0}}), real({{0, std::sqrt(2.0)}})});
  const PerturbationReport c =
      verify_perturbation_theorem(h, h.scaled(2.0), exact({0, 0}, ctl(2.0 * identity(2)), i2));
  CHECK(c.predicted.lower == doctest::Approx(4));
  CHECK(c.predicted.upper == doctest::Approx(8));
  CHECK(std::abs(c.slack_lower) <= 1e-10);
  CHECK(std::abs(c.slack_upper) <= 1e-10);
}

TEST_CASE("verification rejects uncertified relations") {
  const Controller i2 = Controller::identity(2);
  const GFrame f = coordinate_frame(2);
  CHECK(throws_code(ErrorCode::HypothesisUnmet, [&] {
    verify_perturbation_theorem(f, f.scaled(0.9), exact({0.05, 0.05}, i2, i2));
  }));
  const PerturbationParams sampled{0.0, 0.5, {0.01, 0.01}, i2, i2};
  CHECK(throws_code(ErrorCode::HypothesisUnmet,
                    [&] { verify_perturbation_theorem(f, f.scaled(0.9), sampled, {}, 100); }));
}

TEST_CASE("upper bound fails when U is not a multiple of the identity") {
  // Gamma_i U = Lambda_i T with c = 0, so the relation is certified and the
  // predicted interval is (1, 1), while G has bounds (1, 4).
  const GFrame f = coordinate_frame(2);
  const GFrame g(2, {real({{1, 0}}), real({{0, 2}})});
  const PerturbationParams p = exact({0, 0}, Controller::identity(2), ctl(diag({1, 0.5})));
  CHECK(certify_perturbation(f, g, p).mode == CertificateMode::certified);
  try {
    verify_perturbation_theorem(f, g, p);
    FAIL("expected a containment violation");
  } catch (const ContainmentViolation& e) {
    CHECK(e.code() == ErrorCode::ContainmentViolation);
    CHECK(e.report().predicted.upper == doctest::Approx(1));
    CHECK(e.report().actual.upper == doctest::Approx(4));
    CHECK(e.report().slack_upper < 0);
  }
}

TEST_CASE("upper bound can fail with T = U when T is not scalar") {
  // |T| = 1, |T^-1| = 2. Only block 2 moves: Gamma_2 = (1 + d) e_2^T, c_2 = d/2.
  // Predicted upper (1 + d/2)^2, actual (1 + d)^2.
  const double d = 0.5;
  const GFrame f = coordinate_frame(2);
  const GFrame g(2, {real({{1, 0}}), real({{0, 1 + d}})});
  const Controller t = ctl(diag({1, 0.5}));
  const PerturbationParams p = exact({0.0, d / 2}, t, t);
  CHECK(certify_perturbation(f, g, p).mode == CertificateMode::certified);
  try {
    verify_perturbation_theorem(f, g, p);
    FAIL("expected a containment violation");
  } catch (const ContainmentViolation& e) {
    CHECK(e.report().predicted.upper == doctest::Approx(1.5625));
    CHECK(e.report().actual.upper == doctest::Approx(2.25));
    CHECK(e.report().slack_lower >= 0.0);
  }
}

TEST_CASE("property: with T = U the lower bound holds and the upper holds with |T^-1|") {
  // Sum |Gamma_i g|^2 with g = T f is squeezed between (sqrt(A) - |c| |T^-1|)^2 and
  // (sqrt(B) + |c| |T^-1|)^2 by the triangle inequality.
  oracle::Source src(73);
  int checked = 0, upper_misses = 0;
  for (int k = 0; k < 300; ++k) {
    const GFrame f = src.frame(src.integer(1, 5));
    const Index n = f.ambient_dim();
    const Matrix p = src.positive(n, 0.5, 2.0);
    const Controller t = ctl(p);
    const GFrameVerdict v = optimal_bounds(f);
    const double tinv = op_norm(t.inverse());
    const double budget = 0.5 * std::sqrt(v.bounds.lower) /
                          (tinv * op_norm(p) * std::sqrt(double(f.size())));
    const GFrame g = gen_perturbed(f, src.uniform(0.0, budget), 5000 + k);
    std::vector<double> c;
    for (std::size_t i = 0; i < f.size(); ++i) {
      c.push_back(op_norm(f.block(i) * p - g.block(i) * p) + 1e-12);
    }
    const PerturbationParams params = exact(c, t, t);
    PerturbationReport r;
    try {
      r = verify_perturbation_theorem(f, g, params);
    } catch (const ContainmentViolation& e) {
      r = e.report();
      ++upper_misses;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::HypothesisUnmet);
      continue;
    }
    ++checked;
    const double scale = std::max(1.0, r.predicted.upper);
    CHECK(r.slack_lower >= -1e-9 * scale);
    const double hi = std::pow(std::sqrt(v.bounds.upper) + params.c_norm() * tinv, 2);
    CHECK(r.actual.upper <= hi + 1e-9 * hi);
  }
  CHECK(checked > 200);
  MESSAGE("stated upper bound missed on " << upper_misses << " of " << checked << " instances");
}
