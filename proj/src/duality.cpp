#include "cgf/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cgf {

namespace {

void require_pair(const GFrame& g, const GFrame& f, const Controller& t, const Controller& u) {
  if (g.ambient_dim() != f.ambient_dim() || g.size() != f.size()) {
    throw Error(ErrorCode::ShapeMismatch, "families must share ambient dimension and index set");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (g.block(i).rows() != f.block(i).rows()) {
      throw Error(ErrorCode::ShapeMismatch, "block " + std::to_string(i) + " dimensions differ");
    }
  }
  if (t.dim() != f.ambient_dim() || u.dim() != f.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "controller dimension mismatch");
  }
}

double lambda_max(const Matrix& self_adjoint) {
  const HermitianEigen e = herm_eig(hermitian_part(self_adjoint));
  return e.values(e.values.size() - 1);
}

double lambda_min(const Matrix& self_adjoint) {
  return herm_eig(hermitian_part(self_adjoint)).values(0);
}

// T^* S_F T, the (T,T)-controlled frame operator.
Matrix sandwich_operator(const GFrame& f, const Controller& t) {
  return t.matrix().adjoint() * frame_operator(f) * t.matrix();
}

}  // namespace

CrossOperator cross_operator(const GFrame& g, const GFrame& f, const Controller& t,
                             const Controller& u) {
  require_pair(g, f, t, u);
  CrossOperator out;
  out.pair_operator = Matrix::Zero(f.ambient_dim(), f.ambient_dim());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.pair_operator += g.block(i).adjoint() * f.block(i);
  }
  out.matrix = u.matrix().adjoint() * out.pair_operator * t.matrix();
  return out;
}

Matrix cross_operator_termwise(const GFrame& g, const GFrame& f, const Controller& t,
                               const Controller& u) {
  require_pair(g, f, t, u);
  const Matrix ustar = u.matrix().adjoint();
  Matrix s = Matrix::Zero(f.ambient_dim(), f.ambient_dim());
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += ustar * g.block(i).adjoint() * (f.block(i) * t.matrix());
  }
  return s;
}

bool adjoint_identity_check(const GFrame& g, const GFrame& f, const Controller& t,
                            const Controller& u, const Tolerances& tol) {
  const Matrix lhs = cross_operator(g, f, t, u).matrix.adjoint();
  const Matrix rhs = cross_operator(f, g, u, t).matrix;
  return op_norm(lhs - rhs) <= scaled_tol(tol.eq_tol, op_norm(rhs));
}

LowerBoundTransfer lower_bound_transfer(const GFrame& g, const GFrame& f, const Controller& t,
                                        const Controller& u, const Tolerances& tol) {
  const Matrix s = cross_operator(g, f, t, u).matrix;
  LowerBoundTransfer out;
  out.lambda = min_singular_value(s);
  if (!(out.lambda > tol.pos_tol)) {
    throw Error(ErrorCode::HypothesisUnmet, "cross operator is not bounded below");
  }
  const Matrix sf = sandwich_operator(f, t);
  const Matrix sg = sandwich_operator(g, u);
  out.bessel_t = lambda_max(sf);
  out.bessel_u = lambda_max(sg);
  out.predicted_f = out.lambda * out.lambda / out.bessel_u;
  out.predicted_g = out.lambda * out.lambda / out.bessel_t;
  out.actual_f = lambda_min(sf);
  out.actual_g = lambda_min(sg);

  ImplicationReport& r = out.report;
  r.theorem = "lem3.2";
  r.premise = true;
  r.add("f_lower_margin", out.actual_f - out.predicted_f);
  r.add("g_lower_margin", out.actual_g - out.predicted_g);
  r.conclusion =
      out.actual_f >= out.predicted_f - scaled_tol(tol.eq_tol, out.bessel_t) &&
      out.actual_g >= out.predicted_g - scaled_tol(tol.eq_tol, out.bessel_u) &&
      out.actual_f > 0.0 && out.actual_g > 0.0;
  return out;
}

DualWitness dual_witness(const GFrame& f, const Controller& t, const Tolerances& tol) {
  const ControlledVerdict v = is_controlled_g_frame(f, t, t, tol);
  if (!v.is_controlled_frame) {
    throw Error(ErrorCode::HypothesisUnmet, "F is not a (T,T)-controlled g-frame");
  }
  DualWitness out{t, f, v.bounds.lower, {}};
  const double got = lambda_min(cross_operator(f, f, t, t).matrix);
  ImplicationReport& r = out.report;
  r.theorem = "thm3.3";
  r.premise = true;
  r.add("witness_margin", got - out.m);
  r.conclusion = got >= out.m - scaled_tol(tol.eq_tol, v.bounds.upper);
  return out;
}

ImplicationReport certify_dual_witness(const GFrame& f, const Controller& t, const GFrame& g,
                                       const Controller& u, double m, const Tolerances& tol) {
  const Matrix s = cross_operator(g, f, t, u).matrix;
  ImplicationReport r;
  r.theorem = "thm3.3";
  const double re_min = lambda_min(s);  // min Re<S f, f> over unit f
  r.add("witness_lambda_min", re_min);
  r.premise = m > 0.0 && re_min >= m;
  if (!r.premise) return r;

  const Matrix sf = sandwich_operator(f, t);
  const double bessel_u = lambda_max(sandwich_operator(g, u));
  const double predicted = m * m / bessel_u;
  const double actual = lambda_min(sf);
  r.add("lower_margin", actual - predicted);
  r.conclusion = actual > 0.0 && actual >= predicted - scaled_tol(tol.eq_tol, lambda_max(sf));
  return r;
}

NearOperatorTransfer near_frame_operator_transfer(const GFrame& f, const GFrame& g,
                                                  const Controller& t, const Controller& u,
                                                  const Tolerances& tol) {
  const Matrix s = cross_operator(g, f, t, u).matrix;
  const ControlledVerdict fv = is_controlled_g_frame(f, t, t, tol);
  if (!fv.is_controlled_frame) {
    throw Error(ErrorCode::HypothesisUnmet, "F is not a (T,T)-controlled g-frame");
  }
  const double big_a = fv.bounds.lower;
  const double big_b = fv.bounds.upper;
  NearOperatorTransfer out;
  out.lambda = op_norm(s - sandwich_operator(f, t));
  // The lower bound (A - lambda)|f| is vacuous at lambda = A, so require strictness.
  if (!(out.lambda < big_a)) {
    throw Error(ErrorCode::HypothesisUnmet, "lambda = " + std::to_string(out.lambda) +
                                                " is not below A = " + std::to_string(big_a));
  }
  out.near_boundary = out.lambda >= big_a - tol.eq_tol;
  out.predicted_sigma = big_a - out.lambda;
  out.predicted_lower = out.predicted_sigma * out.predicted_sigma / big_b;
  out.actual_sigma = min_singular_value(s);
  out.actual_lower = lambda_min(sandwich_operator(g, u));

  ImplicationReport& r = out.report;
  r.theorem = "thm3.4";
  r.premise = true;
  if (out.near_boundary) r.notes.emplace_back("lambda within eq_tol of A");
  r.add("sigma_margin", out.actual_sigma - out.predicted_sigma);
  r.add("lower_margin", out.actual_lower - out.predicted_lower);
  const double slack = scaled_tol(tol.eq_tol, big_b);
  r.conclusion = out.actual_sigma >= out.predicted_sigma - slack &&
                 out.actual_lower >= out.predicted_lower - slack && out.actual_lower > 0.0;
  return out;
}

NearIdentityTransfer near_identity_transfer(const GFrame& g, const GFrame& f, const Controller& t,
                                            const Controller& u, const Tolerances& tol) {
  const Matrix s = cross_operator(g, f, t, u).matrix;
  NearIdentityTransfer out;
  out.epsilon = op_norm(identity(s.rows()) - s);
  if (!(out.epsilon < 1.0)) {
    throw Error(ErrorCode::HypothesisUnmet, "|I - S| = " + std::to_string(out.epsilon) + " >= 1");
  }
  const Matrix sf = sandwich_operator(f, t);
  const Matrix sg = sandwich_operator(g, u);
  out.actual_sigma = min_singular_value(s);
  out.bessel_t = lambda_max(sf);
  out.bessel_u = lambda_max(sg);
  const double c = (1.0 - out.epsilon) * (1.0 - out.epsilon);
  out.predicted_f = c / out.bessel_u;
  out.predicted_g = c / out.bessel_t;
  out.actual_f = lambda_min(sf);
  out.actual_g = lambda_min(sg);

  ImplicationReport& r = out.report;
  r.theorem = "prop3.5";
  r.premise = true;
  r.notes.emplace_back("(U,U) lower bound derived via the adjoint identity");
  r.add("sigma_margin", out.actual_sigma - (1.0 - out.epsilon));
  r.add("f_lower_margin", out.actual_f - out.predicted_f);
  r.add("g_lower_margin", out.actual_g - out.predicted_g);
  r.conclusion = out.actual_sigma >= 1.0 - out.epsilon - tol.eq_tol &&
                 out.actual_f >= out.predicted_f - scaled_tol(tol.eq_tol, out.bessel_t) &&
                 out.actual_g >= out.predicted_g - scaled_tol(tol.eq_tol, out.bessel_u) &&
                 out.actual_f > 0.0 && out.actual_g > 0.0;
  return out;
}

namespace {

double contraction(const Matrix& s) {
  if (s.rows() != s.cols()) throw Error(ErrorCode::NotSquare, "Neumann series needs square S");
  return op_norm(identity(s.rows()) - s);
}

void finish_report(const Matrix& s, const Matrix& p, std::size_t n, const Tolerances& tol,
                   NeumannReport& rep) {
  const Index dim = s.rows();
  rep.iterations = n;
  rep.residual = op_norm(p * s - identity(dim));
  rep.residual_bound = std::pow(rep.q, static_cast<double>(n + 1)) / (1.0 - rep.q);
  rep.inverse_norm_bound = 1.0 / (1.0 - rep.q);
  rep.inverse_norm = op_norm(invert(s, tol));
  rep.inverse_bound_holds =
      rep.inverse_norm <= rep.inverse_norm_bound + scaled_tol(tol.eq_tol, rep.inverse_norm_bound);
}

}  // namespace

NeumannResult neumann_partial_sum(const Matrix& s, std::size_t n, const Tolerances& tol) {
  NeumannResult out;
  out.report.q = contraction(s);
  if (!(out.report.q < 1.0)) {
    throw Error(ErrorCode::NotContractive, "|I - S| = " + std::to_string(out.report.q));
  }
  const Matrix r = identity(s.rows()) - s;
  Matrix power = identity(s.rows());
  out.inverse = power;
  for (std::size_t k = 1; k <= n; ++k) {
    power = power * r;
    out.inverse += power;
  }
  finish_report(s, out.inverse, n, tol, out.report);
  return out;
}

NeumannResult neumann_inverse(const Matrix& s, double target, std::size_t max_iter,
                              const Tolerances& tol) {
  NeumannResult out;
  out.report.q = contraction(s);
  if (!(out.report.q < 1.0)) {
    throw Error(ErrorCode::NotContractive, "|I - S| = " + std::to_string(out.report.q));
  }
  const Index dim = s.rows();
  const Matrix r = identity(dim) - s;
  Matrix power = identity(dim);
  out.inverse = power;
  std::size_t n = 0;
  double residual = op_norm(out.inverse * s - identity(dim));
  while (residual > target) {
    if (n == max_iter) {
      throw Error(ErrorCode::MaxIterExceeded, "residual " + std::to_string(residual) +
                                                  " after " + std::to_string(n) + " iterations");
    }
    ++n;
    power = power * r;
    out.inverse += power;
    residual = op_norm(out.inverse * s - identity(dim));
  }
  finish_report(s, out.inverse, n, tol, out.report);
  return out;
}

Reconstruction reconstruct(const CoefficientVector& coeffs, const GFrame& g, const GFrame& f,
                           const Controller& t, const Controller& u, const Tolerances& tol,
                           std::size_t max_iter, ReconstructionPath path, double target) {
  if (!coeffs.matches(f)) throw Error(ErrorCode::ShapeMismatch, "coefficients do not match F");
  const Matrix s = cross_operator(g, f, t, u).matrix;
  Vector y = Vector::Zero(f.ambient_dim());
  for (std::size_t i = 0; i < g.size(); ++i) y += g.block(i).adjoint() * coeffs.segments[i];
  y = u.matrix().adjoint() * y;

  Reconstruction out;
  Matrix p;
  if (path == ReconstructionPath::neumann) {
    NeumannResult nr = neumann_inverse(s, target, max_iter, tol);
    p = std::move(nr.inverse);
    out.report = nr.report;
  } else {
    p = invert(s, tol);
    NeumannReport& rep = out.report;
    rep.q = contraction(s);
    rep.iterations = 0;
    rep.residual = op_norm(p * s - identity(s.rows()));
    rep.inverse_norm = op_norm(p);
    rep.residual_bound = scaled_tol(tol.eq_tol, condition_number(s));
    if (rep.q < 1.0) {
      rep.inverse_norm_bound = 1.0 / (1.0 - rep.q);
      rep.inverse_bound_holds = rep.inverse_norm <= rep.inverse_norm_bound +
                                                        scaled_tol(tol.eq_tol, rep.inverse_norm_bound);
    } else {
      rep.inverse_norm_bound = std::numeric_limits<double>::infinity();
      rep.inverse_bound_holds = true;
    }
  }
  out.signal = p * y;
  out.ordering_gap = (out.signal - s * (p * out.signal)).norm();
  return out;
}

namespace {

ResolutionFamily summarize(std::vector<Matrix> terms, ResolutionKind kind, std::size_t n,
                           double bound) {
  ResolutionFamily fam;
  fam.kind = kind;
  fam.truncation = n;
  fam.terms = std::move(terms);
  const Index dim = fam.terms.front().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& w : fam.terms) sum += w;
  fam.defect = op_norm(sum - identity(dim));
  fam.bound = bound;
  return fam;
}

}  // namespace

ResolutionPair resolution_family(const GFrame& g, const GFrame& f, const Controller& t,
                                 const Controller& u, const Tolerances& tol) {
  const Matrix s = cross_operator(g, f, t, u).matrix;
  ResolutionPair out;
  const ControlledVerdict fv = is_controlled_g_frame(f, t, t, tol);
  if (contraction(s) < 1.0) {
    out.source = InvertibilitySource::near_identity;
  } else if (fv.is_controlled_frame && op_norm(s - sandwich_operator(f, t)) < fv.bounds.lower) {
    out.source = InvertibilitySource::near_frame_operator;
  } else {
    out.source = InvertibilitySource::direct;
  }
  const Matrix sinv = invert(s, tol);
  const Matrix smirror = s.adjoint();  // S_{U F G T}
  const Matrix minv = invert(smirror, tol);
  out.condition = condition_number(s);

  const Matrix ustar = u.matrix().adjoint();
  const Matrix tstar = t.matrix().adjoint();
  std::vector<Matrix> w, wm;
  w.reserve(f.size());
  wm.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    w.push_back(sinv * ustar * g.block(i).adjoint() * f.block(i) * t.matrix());
    wm.push_back(minv * tstar * f.block(i).adjoint() * g.block(i) * u.matrix());
  }
  const double declared = scaled_tol(tol.eq_tol, out.condition);
  out.family = summarize(std::move(w), ResolutionKind::exact, 0, declared);
  out.mirror = summarize(std::move(wm), ResolutionKind::exact, 0, declared);
  return out;
}

ResolutionFamily truncated_resolution(const GFrame& g, const GFrame& f, const Controller& t,
                                      const Controller& u, std::size_t n_max,
                                      const Tolerances& /*tol*/) {
  const Matrix s = cross_operator(g, f, t, u).matrix;
  const double q = contraction(s);
  if (!(q < 1.0)) throw Error(ErrorCode::NotContractive, "|I - S| = " + std::to_string(q));
  const Matrix r = identity(s.rows()) - s;
  const Matrix ustar = u.matrix().adjoint();
  std::vector<Matrix> base;
  base.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    base.push_back(ustar * g.block(i).adjoint() * f.block(i) * t.matrix());
  }
  std::vector<Matrix> terms;
  terms.reserve((n_max + 1) * f.size());
  Matrix power = identity(s.rows());
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) power = power * r;
    for (const auto& b : base) terms.push_back(power * b);
  }
  return summarize(std::move(terms), ResolutionKind::truncated, n_max,
                   std::pow(q, static_cast<double>(n_max + 1)) / (1.0 - q));
}

}  // namespace cgf
