#include "cgf/controlled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cgf {

Controller Controller::make(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NotSquare, "controller must be square");
  require_finite(m, "controller");
  Matrix inv = invert(m, tol);
  std::optional<Sandwich> sandwich;
  const PositivityVerdict pv = positivity_verdict(m, tol);
  if (pv.is_positive) sandwich = Sandwich{pv.lambda_min, pv.lambda_max};
  return Controller(m, std::move(inv), sandwich);
}

namespace {

void require_dims(const GFrame& f, const Controller& t, const Controller& u) {
  if (t.dim() != f.ambient_dim() || u.dim() != f.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "controllers must be " + std::to_string(f.ambient_dim()) + "x" +
                    std::to_string(f.ambient_dim()));
  }
}

void require_gl_plus(const Controller& c, const char* name) {
  if (!c.in_gl_plus()) {
    throw Error(ErrorCode::HypothesisUnmet, std::string(name) + " is not in GL+(H)");
  }
}

}  // namespace

Matrix controlled_frame_operator(const GFrame& f, const Controller& t, const Controller& u) {
  require_dims(f, t, u);
  return u.matrix().adjoint() * frame_operator(f) * t.matrix();
}

Matrix controlled_frame_operator_termwise(const GFrame& f, const Controller& t,
                                          const Controller& u) {
  require_dims(f, t, u);
  const Matrix ustar = u.matrix().adjoint();
  Matrix s = Matrix::Zero(f.ambient_dim(), f.ambient_dim());
  for (const auto& b : f.blocks()) s += ustar * b.adjoint() * (b * t.matrix());
  return s;
}

ControlledVerdict controlled_verdict(const Matrix& s, const Tolerances& tol) {
  // In a complex space <S f, f> is real for every f iff S = S^*, so the
  // controlled frame inequality reduces to a spectral test.
  const PositivityVerdict pv = positivity_verdict(s, tol);
  ControlledVerdict v;
  v.operator_self_adjoint = pv.is_self_adjoint;
  v.bounds = FrameBounds::optimal(pv.lambda_min, pv.lambda_max);
  v.is_controlled_frame = pv.is_positive;
  return v;
}

ControlledVerdict is_controlled_g_frame(const GFrame& f, const Controller& t, const Controller& u,
                                        const Tolerances& tol) {
  return controlled_verdict(controlled_frame_operator(f, t, u), tol);
}

ImplicationReport check_prop23_forward(const GFrame& f, const Controller& t, const Controller& u,
                                       const Tolerances& tol) {
  require_dims(f, t, u);
  require_gl_plus(t, "T");
  require_gl_plus(u, "U");

  ImplicationReport r;
  r.theorem = "prop2.3fwd";
  const ControlledVerdict cv = is_controlled_g_frame(f, t, u, tol);
  const GFrameVerdict gv = optimal_bounds(f, tol);
  r.premise = cv.is_controlled_frame;
  r.add("controlled_lower", cv.bounds.lower);
  r.add("frame_lower", gv.bounds.lower);
  if (!r.premise) return r;

  r.conclusion = gv.is_frame;
  if (gv.is_frame) {
    // |S_Lambda^{-1}| <= |T| |U^*| / A
    const double lhs = op_norm(invert(frame_operator(f), tol));
    const double rhs = op_norm(t.matrix()) * op_norm(u.matrix()) / cv.bounds.lower;
    r.add("inverse_norm_witness", rhs - lhs);
    r.conclusion = lhs <= rhs + scaled_tol(tol.eq_tol, rhs);
  }
  return r;
}

ReverseContainment check_prop23_reverse(const GFrame& f, const Controller& t, const Controller& u,
                                        const Tolerances& tol) {
  require_dims(f, t, u);
  require_gl_plus(t, "T");
  require_gl_plus(u, "U");

  const Matrix& tm = t.matrix();
  const Matrix& um = u.matrix();
  const Matrix s = frame_operator(f);
  const double nt = op_norm(tm), nu = op_norm(um), ns = op_norm(s);
  struct Pair {
    const char* name;
    double defect;
    double scale;
  };
  const Pair pairs[] = {{"TU", commutator_norm(tm, um), nt * nu},
                        {"TS", commutator_norm(tm, s), nt * ns},
                        {"US", commutator_norm(um, s), nu * ns}};
  for (const auto& p : pairs) {
    if (p.defect > tol.eq_tol * p.scale) {
      throw Error(ErrorCode::HypothesisUnmet,
                  std::string("controllers do not commute: [") + p.name +
                      "] = " + std::to_string(p.defect));
    }
  }

  ReverseContainment out;
  ImplicationReport& r = out.report;
  r.theorem = "prop2.3rev";
  for (const auto& p : pairs) r.add(std::string("commutator_") + p.name, p.defect);

  const GFrameVerdict gv = optimal_bounds(f, tol);
  r.premise = gv.is_frame;
  out.verdict = is_controlled_g_frame(f, t, u, tol);

  // U is self-adjoint, so the sandwich of U^* is the sandwich of U.
  const Sandwich st = *t.sandwich();
  const Sandwich su = *u.sandwich();
  out.predicted = FrameBounds::predicted(st.m * su.m * gv.bounds.lower,
                                         st.M * su.M * gv.bounds.upper, "prop2.3rev");
  if (!r.premise) return out;

  const double lo_margin = out.verdict.bounds.lower - out.predicted.lower;
  const double hi_margin = out.predicted.upper - out.verdict.bounds.upper;
  r.add("lower_margin", lo_margin);
  r.add("upper_margin", hi_margin);
  const double slack = scaled_tol(tol.eq_tol, out.predicted.upper);
  r.conclusion = out.verdict.is_controlled_frame && lo_margin >= -slack && hi_margin >= -slack;
  return out;
}

ImplicationReport check_cor24(const GFrame& f, const Controller& t, const Controller& u,
                              const Tolerances& tol) {
  require_dims(f, t, u);
  ImplicationReport r;
  r.theorem = "cor2.4";
  const GFrameVerdict gv = optimal_bounds(f, tol);
  const Matrix s = controlled_frame_operator(f, t, u);
  const PositivityVerdict pv = positivity_verdict(s, tol);
  r.premise = gv.is_frame && pv.is_positive;
  r.add("operator_lambda_min", pv.lambda_min);
  if (!r.premise) return r;
  r.conclusion = controlled_verdict(s, tol).is_controlled_frame;
  return r;
}

TransferResult bounded_difference_transfer(const GFrame& f, const GFrame& g, const Controller& t,
                                           const Controller& u, const Tolerances& tol) {
  require_dims(f, t, u);
  if (g.ambient_dim() != f.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "families live on different spaces");
  }
  const Matrix sf = controlled_frame_operator(f, t, u);
  const ControlledVerdict fv = controlled_verdict(sf, tol);
  if (!fv.is_controlled_frame) {
    throw Error(ErrorCode::HypothesisUnmet, "F is not a (T,U)-controlled g-frame");
  }
  if (!is_g_complete(g, tol)) throw Error(ErrorCode::HypothesisUnmet, "G is not g-complete");

  const Matrix d = u.matrix().adjoint() * (frame_operator(f) - frame_operator(g)) * t.matrix();
  const double scale = std::max(op_norm(d), op_norm(sf));
  if (self_adjoint_defect(d) > tol.sym_tol * scale) {
    throw Error(ErrorCode::HypothesisUnmet, "U^*(S_F - S_G)T is not self-adjoint");
  }
  const HermitianEigen de = herm_eig(hermitian_part(d), tol);
  const double dmin = de.values(0);
  const double dmax = de.values(de.values.size() - 1);
  if (dmin < -tol.pos_tol) {
    throw Error(ErrorCode::HypothesisUnmet, "U^*(S_F - S_G)T is indefinite");
  }
  const double big_a = fv.bounds.lower;
  const double big_b = fv.bounds.upper;
  const double rr = std::max(dmax, 0.0);
  if (!(rr < big_a)) {
    throw Error(ErrorCode::HypothesisUnmet, "R = " + std::to_string(rr) + " is not below A");
  }

  TransferResult out;
  out.predicted = FrameBounds::predicted(big_a - rr, big_b + rr, "prop2.5");
  out.verdict = is_controlled_g_frame(g, t, u, tol);
  ImplicationReport& r = out.report;
  r.theorem = "prop2.5";
  r.premise = true;
  r.add("R", rr);
  r.add("lower_margin", out.verdict.bounds.lower - out.predicted.lower);
  r.add("upper_margin", out.predicted.upper - out.verdict.bounds.upper);
  r.conclusion = out.verdict.is_controlled_frame &&
                 out.predicted.contains(out.verdict.bounds.lower, out.verdict.bounds.upper,
                                        scaled_tol(tol.eq_tol, out.predicted.upper));
  return out;
}

TransferResult positive_difference_transfer(const GFrame& f, const GFrame& g, const Controller& t,
                                            const Controller& u, const Tolerances& tol,
                                            PositivityMode mode) {
  require_dims(f, t, u);
  if (g.ambient_dim() != f.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "families live on different spaces");
  }
  const Matrix sf = controlled_frame_operator(f, t, u);
  const ControlledVerdict fv = controlled_verdict(sf, tol);
  if (!fv.is_controlled_frame) {
    throw Error(ErrorCode::HypothesisUnmet, "F is not a (T,U)-controlled g-frame");
  }
  if (!is_g_complete(g, tol)) throw Error(ErrorCode::HypothesisUnmet, "G is not g-complete");

  const Matrix phi = u.matrix().adjoint() * (frame_operator(g) - frame_operator(f)) * t.matrix();
  const double scale = std::max(op_norm(phi), op_norm(sf));
  if (self_adjoint_defect(phi) > tol.sym_tol * scale) {
    throw Error(ErrorCode::HypothesisUnmet, "Phi is not self-adjoint");
  }
  const HermitianEigen pe = herm_eig(hermitian_part(phi), tol);
  const double pmin = pe.values(0);
  const double pmax = pe.values(pe.values.size() - 1);
  const bool positive =
      mode == PositivityMode::strict ? pmin > tol.pos_tol : pmin >= -tol.pos_tol;
  if (!positive) throw Error(ErrorCode::HypothesisUnmet, "Phi is not positive");

  TransferResult out;
  // S_{TGU} = Phi + S_{TFU}
  out.predicted = FrameBounds::predicted(fv.bounds.lower, fv.bounds.upper + std::max(pmax, 0.0),
                                         "prop2.6");
  out.verdict = is_controlled_g_frame(g, t, u, tol);
  ImplicationReport& r = out.report;
  r.theorem = "prop2.6";
  r.premise = true;
  r.notes.emplace_back("Phi is compact (finite dimension)");
  r.add("phi_lambda_min", pmin);
  r.add("lower_margin", out.verdict.bounds.lower - out.predicted.lower);
  r.add("upper_margin", out.predicted.upper - out.verdict.bounds.upper);
  r.conclusion = out.verdict.is_controlled_frame;
  return out;
}

GFrame compose(const GFrame& outer, const std::vector<GFrame>& inners) {
  if (inners.size() != outer.size()) {
    throw Error(ErrorCode::DimensionMismatch, "need one inner family per outer block");
  }
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const Matrix& lam = outer.block(i);
    if (inners[i].ambient_dim() != lam.rows()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "inner family " + std::to_string(i) + " must act on C^" +
                      std::to_string(lam.rows()));
    }
    for (const auto& gam : inners[i].blocks()) blocks.push_back(gam * lam);
  }
  return GFrame(outer.ambient_dim(), std::move(blocks));
}

CompositionCheck check_composition(const GFrame& outer, const std::vector<GFrame>& inners,
                                   const Controller& t, const Controller& u,
                                   const std::vector<InnerControllers>& inner_controllers,
                                   const Tolerances& tol) {
  require_dims(outer, t, u);
  const GFrame composed = compose(outer, inners);
  if (!inner_controllers.empty() && inner_controllers.size() != inners.size()) {
    throw Error(ErrorCode::DimensionMismatch, "need one controller pair per inner family");
  }

  CompositionCheck out;
  out.inner_lower = std::numeric_limits<double>::infinity();
  out.inner_upper = 0.0;
  for (std::size_t i = 0; i < inners.size(); ++i) {
    const Index di = inners[i].ambient_dim();
    const Controller ti =
        inner_controllers.empty() ? Controller::identity(di) : inner_controllers[i].t;
    const Controller ui =
        inner_controllers.empty() ? Controller::identity(di) : inner_controllers[i].u;
    const ControlledVerdict iv = is_controlled_g_frame(inners[i], ti, ui, tol);
    if (!iv.is_controlled_frame) {
      throw Error(ErrorCode::HypothesisUnmet,
                  "inner family " + std::to_string(i) + " is not a controlled g-frame");
    }
    out.inner_lower = std::min(out.inner_lower, iv.bounds.lower);
    out.inner_upper = std::max(out.inner_upper, iv.bounds.upper);
  }
  const double c = out.inner_lower;
  const double d = out.inner_upper;

  const ControlledVerdict ov = is_controlled_g_frame(outer, t, u, tol);
  const ControlledVerdict cv = is_controlled_g_frame(composed, t, u, tol);

  ImplicationReport& fw = out.forward;
  fw.theorem = "thm2.7";
  fw.premise = ov.is_controlled_frame;
  if (fw.premise) {
    const FrameBounds pred =
        FrameBounds::predicted(c * ov.bounds.lower, d * ov.bounds.upper, "thm2.7");
    fw.add("lower_margin", cv.bounds.lower - pred.lower);
    fw.add("upper_margin", pred.upper - cv.bounds.upper);
    fw.conclusion = cv.is_controlled_frame &&
                    pred.contains(cv.bounds.lower, cv.bounds.upper,
                                  scaled_tol(tol.eq_tol, pred.upper));
  }

  ImplicationReport& cw = out.converse;
  cw.theorem = "thm2.7";
  cw.premise = cv.is_controlled_frame;
  if (cw.premise) {
    const FrameBounds pred =
        FrameBounds::predicted(cv.bounds.lower / d, cv.bounds.upper / c, "thm2.7");
    cw.add("lower_margin", ov.bounds.lower - pred.lower);
    cw.add("upper_margin", pred.upper - ov.bounds.upper);
    cw.conclusion = ov.is_controlled_frame &&
                    pred.contains(ov.bounds.lower, ov.bounds.upper,
                                  scaled_tol(tol.eq_tol, pred.upper));
  }
  return out;
}

InducedVectorFrame induced_vector_frame(const GFrame& f, const Controller& t, const Controller& u,
                                        const std::vector<Matrix>& bases, const Tolerances& tol) {
  require_dims(f, t, u);
  if (bases.size() != f.size()) {
    throw Error(ErrorCode::ShapeMismatch, "need one orthonormal basis per block");
  }
  InducedVectorFrame out;
  const Matrix tstar = t.matrix().adjoint();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Matrix& e = bases[i];
    const Index di = f.block(i).rows();
    if (e.rows() != di || e.cols() != di) {
      throw Error(ErrorCode::ShapeMismatch, "basis " + std::to_string(i) + " must be " +
                                                std::to_string(di) + "x" + std::to_string(di));
    }
    if (op_norm(e.adjoint() * e - identity(di)) > tol.eq_tol) {
      throw Error(ErrorCode::NotUnitaryBasis, "basis " + std::to_string(i) + " is not unitary");
    }
    const Matrix u_ij = f.block(i).adjoint() * e;  // columns are Lambda_i^* e_ij
    for (Index j = 0; j < di; ++j) out.vectors.push_back(tstar * u_ij.col(j));
  }
  out.omega = u.matrix().adjoint() * t.inverse().adjoint();
  return out;
}

Matrix vector_frame_operator(const InducedVectorFrame& v) {
  const Index n = v.omega.rows();
  Matrix gram = Matrix::Zero(n, n);
  for (const auto& x : v.vectors) gram += x * x.adjoint();
  return v.omega * gram;
}

Scalar induced_quadratic_form(const InducedVectorFrame& v, const Vector& x) {
  Scalar acc{0.0, 0.0};
  for (const auto& fij : v.vectors) {
    const Scalar a = fij.dot(x);                // <x, f_ij>
    const Scalar b = x.dot(v.omega * fij);      // <Omega f_ij, x>
    acc += a * b;
  }
  return acc;
}

GFrame direct_sum(const GFrame& f, const GFrame& g) {
  const Index n = f.ambient_dim();
  const Index k = g.ambient_dim();
  const std::size_t count = std::max(f.size(), g.size());
  std::vector<Matrix> blocks;
  blocks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const bool has_f = i < f.size();
    const bool has_g = i < g.size();
    const Index di = has_f ? f.block(i).rows() : g.block(i).rows();
    const Index ei = has_g ? g.block(i).rows() : f.block(i).rows();
    Matrix b = Matrix::Zero(di + ei, n + k);
    if (has_f) b.topLeftCorner(di, n) = f.block(i);
    if (has_g) b.bottomRightCorner(ei, k) = g.block(i);
    blocks.push_back(std::move(b));
  }
  return GFrame(n + k, std::move(blocks));
}

Controller direct_sum(const Controller& t, const Controller& u, const Tolerances& tol) {
  const Index n = t.dim(), k = u.dim();
  Matrix m = Matrix::Zero(n + k, n + k);
  m.topLeftCorner(n, n) = t.matrix();
  m.bottomRightCorner(k, k) = u.matrix();
  return Controller::make(m, tol);
}

DirectSumCheck check_direct_sum(const GFrame& f, const GFrame& g, const Controller& t,
                                const Controller& u, const Tolerances& tol) {
  const ControlledVerdict fv = is_controlled_g_frame(f, t, t, tol);
  const ControlledVerdict gv = is_controlled_g_frame(g, u, u, tol);
  if (!fv.is_controlled_frame) {
    throw Error(ErrorCode::HypothesisUnmet, "F is not a (T,T)-controlled g-frame");
  }
  if (!gv.is_controlled_frame) {
    throw Error(ErrorCode::HypothesisUnmet, "G is not a (U,U)-controlled g-frame");
  }
  DirectSumCheck out;
  out.predicted = FrameBounds::predicted(std::min(fv.bounds.lower, gv.bounds.lower),
                                         std::max(fv.bounds.upper, gv.bounds.upper), "thm2.9");
  const GFrame sum = direct_sum(f, g);
  const Controller tu = direct_sum(t, u, tol);
  out.verdict = is_controlled_g_frame(sum, tu, tu, tol);

  ImplicationReport& r = out.report;
  r.theorem = "thm2.9";
  r.premise = true;
  r.add("lower_margin", out.verdict.bounds.lower - out.predicted.lower);
  r.add("upper_margin", out.predicted.upper - out.verdict.bounds.upper);
  r.conclusion = out.verdict.is_controlled_frame &&
                 out.predicted.contains(out.verdict.bounds.lower, out.verdict.bounds.upper,
                                        scaled_tol(tol.eq_tol, out.predicted.upper));
  return out;
}

}  // namespace cgf
