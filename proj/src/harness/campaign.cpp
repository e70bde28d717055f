#include "cgf/harness/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "cgf/duality.hpp"
#include "cgf/harness/rng.hpp"
#include "cgf/perturb.hpp"

namespace cgf {

void CampaignConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (dim_min < 1 || dim_max < dim_min) bad("need 1 <= dim_min <= dim_max");
  if (max_blocks < 1 || max_block_dim < 1) bad("block envelope must be non-empty");
  if (static_cast<Index>(max_blocks) * max_block_dim < dim_max) {
    bad("block envelope cannot cover dim_max");
  }
  if (!(conditioning >= 1.0)) bad("conditioning must be >= 1");
  if (!(q_min >= 0.0) || !(q_max >= q_min) || !std::isfinite(q_max)) bad("need 0 <= q_min <= q_max");
  tol.validate();
}

namespace {

// Seed slots inside one trial.
enum Slot : std::uint64_t {
  kChoices = 0,
  kFrame = 1,
  kControllerT = 2,
  kControllerU = 3,
  kSecondFrame = 4,
  kNoise = 5,
  kSampling = 6,
};

std::vector<Index> draw_dims(Rng& rng, Index n, Index min_count, Index max_count, Index lo,
                             Index hi) {
  const Index count = rng.between(min_count, max_count);
  std::vector<Index> dims(static_cast<std::size_t>(count));
  Index total = 0;
  for (auto& d : dims) {
    d = rng.between(lo, hi);
    total += d;
  }
  // Grow blocks round-robin until the family can span C^n.
  for (std::size_t i = 0; total < n; i = (i + 1) % dims.size()) {
    if (dims[i] < hi) {
      ++dims[i];
      ++total;
    }
  }
  return dims;
}

InstanceSpec draw_spec(Rng& rng, const CampaignConfig& c, std::uint64_t seed) {
  InstanceSpec s;
  s.n = rng.between(c.dim_min, c.dim_max);
  const Index min_count = (s.n + c.max_block_dim - 1) / c.max_block_dim;
  s.dims = draw_dims(rng, s.n, min_count, static_cast<Index>(c.max_blocks), 1, c.max_block_dim);
  s.seed = seed;
  s.conditioning = c.conditioning;
  return s;
}

struct Trial {
  Trial(std::uint64_t s, const CampaignConfig& c)
      : seed(s), cfg(c), tol(c.tol), rng(derive_seed(s, kChoices)) {
    spec = draw_spec(rng, cfg, sub(kFrame));
  }

  std::uint64_t sub(std::uint64_t slot) const { return derive_seed(seed, slot); }

  GFrame frame() const { return gen_gframe(spec, tol); }

  Controller controller(ControllerKind kind, Slot slot,
                        const std::optional<Matrix>& base = std::nullopt) const {
    return gen_controller(spec.n, kind, sub(slot), base, spec.degree, tol);
  }

  std::uint64_t seed;
  const CampaignConfig& cfg;
  const Tolerances& tol;
  Rng rng;
  InstanceSpec spec;
  ImplicationReport out;
};

void merge(ImplicationReport& dst, const ImplicationReport& src, const std::string& prefix) {
  for (const auto& m : src.margins) dst.add(prefix + m.name, m.value);
  for (const auto& n : src.notes) dst.notes.push_back(prefix + n);
}

GFrame blockwise_scaled(const GFrame& f, const std::vector<double>& factors) {
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < f.size(); ++i) blocks.push_back(factors[i] * f.block(i));
  return GFrame(f.ambient_dim(), std::move(blocks));
}

std::vector<double> draw_factors(Rng& rng, std::size_t k, double lo, double hi) {
  std::vector<double> s(k);
  for (auto& x : s) x = rng.uniform(lo, hi);
  return s;
}

// sum_i |Lambda_i T|, used to size noise so a cross operator moves by a known amount.
double controlled_block_mass(const GFrame& f, const Controller& t) {
  double acc = 0.0;
  for (const auto& b : f.blocks()) acc += op_norm(b * t.matrix());
  return acc;
}

Matrix inverse_sqrt(const Matrix& s, const Tolerances& tol) {
  const HermitianEigen e = herm_eig(s, tol);
  RealVector d = e.values.cwiseSqrt().cwiseInverse();
  return e.vectors * d.cast<Scalar>().asDiagonal() * e.vectors.adjoint();
}

void trial_prop23_fwd(Trial& tr) {
  const GFrame f0 = tr.frame();
  const auto pattern = tr.rng.between(0, 3);
  const Matrix s0 = frame_operator(f0);
  if (pattern == 0) {
    tr.spec.controller_kind = ControllerKind::gl_plus_random;
    const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
    tr.out = check_prop23_forward(f0, t, t, tr.tol);
  } else if (pattern == 1) {
    tr.spec.controller_kind = ControllerKind::polynomial_of_s;
    const Controller t = tr.controller(ControllerKind::polynomial_of_s, kControllerT, s0);
    const Controller u = tr.controller(ControllerKind::polynomial_of_s, kControllerU, s0);
    tr.out = check_prop23_forward(f0, t, u, tr.tol);
  } else if (pattern == 2) {
    tr.spec.controller_kind = ControllerKind::gl_plus_random;
    const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
    const Controller u = tr.controller(ControllerKind::gl_plus_random, kControllerU);
    tr.out = check_prop23_forward(f0, t, u, tr.tol);
    tr.out.notes.emplace_back("independent controllers");
  } else {
    // Kill one direction so the family is no longer complete.
    tr.spec.controller_kind = ControllerKind::gl_plus_random;
    Rng noise(tr.sub(kNoise));
    const Vector v = noise.unit_vector(tr.spec.n);
    const Matrix proj = identity(tr.spec.n) - v * v.adjoint();
    const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
    tr.out = check_prop23_forward(f0.right_multiplied(proj), t, t, tr.tol);
    tr.out.notes.emplace_back("rank-deficient family");
  }
}

void trial_prop23_rev(Trial& tr) {
  const GFrame f = tr.frame();
  const Matrix s = frame_operator(f);
  tr.spec.controller_kind = ControllerKind::polynomial_of_s;
  const Controller t = tr.controller(ControllerKind::polynomial_of_s, kControllerT, s);
  const Controller u = tr.controller(ControllerKind::polynomial_of_s, kControllerU, s);
  tr.out = check_prop23_reverse(f, t, u, tr.tol).report;
}

void trial_cor24(Trial& tr) {
  const GFrame f = tr.frame();
  const auto pattern = tr.rng.between(0, 2);
  if (pattern == 0) {
    tr.spec.controller_kind = ControllerKind::gl_random;
    const Controller t = tr.controller(ControllerKind::gl_random, kControllerT);
    tr.out = check_cor24(f, t, t, tr.tol);
  } else if (pattern == 1) {
    tr.spec.controller_kind = ControllerKind::polynomial_of_s;
    const Matrix s = frame_operator(f);
    const Controller t = tr.controller(ControllerKind::polynomial_of_s, kControllerT, s);
    const Controller u = tr.controller(ControllerKind::polynomial_of_s, kControllerU, s);
    tr.out = check_cor24(f, t, u, tr.tol);
  } else {
    tr.spec.controller_kind = ControllerKind::gl_random;
    const Controller t = tr.controller(ControllerKind::gl_random, kControllerT);
    const Controller u = tr.controller(ControllerKind::gl_random, kControllerU);
    tr.out = check_cor24(f, t, u, tr.tol);
    tr.out.notes.emplace_back("independent controllers");
  }
}

void trial_prop25(Trial& tr) {
  const GFrame f = tr.frame();
  tr.spec.controller_kind = ControllerKind::gl_plus_random;
  const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
  const auto pattern = tr.rng.between(0, 2);
  GFrame g = f;
  if (pattern == 0) {
    // Shrink little enough that R stays below A: R <= (1 - s_min^2) B_T <= 0.9 A.
    const double kappa = condition_number(controlled_frame_operator(f, t, t));
    const double s_min = std::sqrt(1.0 - 0.9 / kappa);
    g = blockwise_scaled(f, draw_factors(tr.rng, f.size(), s_min, 1.0));
  } else if (pattern == 1) {
    g = blockwise_scaled(f, draw_factors(tr.rng, f.size(), 0.3, 1.0));
  } else {
    g = gen_perturbed(f, 0.1 * op_norm(f.stacked()), tr.sub(kNoise));
  }
  tr.out = bounded_difference_transfer(f, g, t, t, tr.tol).report;
}

void trial_prop26(Trial& tr) {
  const GFrame f = tr.frame();
  tr.spec.controller_kind = ControllerKind::gl_plus_random;
  const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
  const auto pattern = tr.rng.between(0, 2);
  GFrame g = f;
  if (pattern == 0) {
    g = blockwise_scaled(f, draw_factors(tr.rng, f.size(), 1.0, 1.5));
  } else if (pattern == 2) {
    g = gen_perturbed(f, 0.1 * op_norm(f.stacked()), tr.sub(kNoise));
  }
  tr.out = positive_difference_transfer(f, g, t, t, tr.tol).report;
}

void trial_thm27(Trial& tr) {
  // Two-level instances: outer blocks of size 2 or 3 on a space of dim <= 4.
  tr.spec.n = std::min<Index>(4, tr.cfg.dim_max);
  tr.spec.dims = draw_dims(tr.rng, tr.spec.n, 2, 4, 2, 3);
  tr.spec.controller_kind = ControllerKind::gl_plus_random;
  const GFrame f = tr.frame();
  std::vector<GFrame> inners;
  for (std::size_t i = 0; i < f.size(); ++i) {
    InstanceSpec is;
    is.n = f.block(i).rows();
    is.dims = draw_dims(tr.rng, is.n, 1, 3, 1, 3);
    is.seed = derive_seed(tr.seed, 100 + i);
    is.conditioning = tr.cfg.conditioning;
    inners.push_back(gen_gframe(is, tr.tol));
  }
  const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
  const CompositionCheck c = check_composition(f, inners, t, t, {}, tr.tol);
  tr.out.theorem = "thm2.7";
  tr.out.premise = c.forward.premise || c.converse.premise;
  tr.out.conclusion = (!c.forward.premise || c.forward.conclusion) &&
                      (!c.converse.premise || c.converse.conclusion);
  tr.out.add("inner_lower", c.inner_lower);
  tr.out.add("inner_upper", c.inner_upper);
  merge(tr.out, c.forward, "forward_");
  merge(tr.out, c.converse, "converse_");
}

void trial_thm28(Trial& tr) {
  const GFrame f = tr.frame();
  const auto pattern = tr.rng.between(0, 2);
  std::optional<Controller> t, u;
  if (pattern == 0) {
    tr.spec.controller_kind = ControllerKind::gl_plus_random;
    t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
    u = t;
  } else if (pattern == 1) {
    tr.spec.controller_kind = ControllerKind::gl_random;
    t = tr.controller(ControllerKind::gl_random, kControllerT);
    u = tr.controller(ControllerKind::gl_random, kControllerU);
  } else {
    tr.spec.controller_kind = ControllerKind::identity;
    t = Controller::identity(tr.spec.n);
    u = t;
  }
  Rng basis_rng(tr.sub(kNoise));
  std::vector<Matrix> bases;
  for (const auto& b : f.blocks()) bases.push_back(basis_rng.unitary(b.rows()));
  const InducedVectorFrame iv = induced_vector_frame(f, *t, *u, bases, tr.tol);
  const Matrix s = controlled_frame_operator(f, *t, *u);
  const double s_norm = op_norm(s);

  Rng sample(tr.sub(kSampling));
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x = sample.complex_normal(tr.spec.n, 1).col(0);
    const Scalar lhs = induced_quadratic_form(iv, x);
    const Scalar rhs = x.dot(s * x);  // <S x, x>
    worst = std::max(worst, std::abs(lhs - rhs) / (x.squaredNorm() * s_norm));
  }
  const ControlledVerdict cv = controlled_verdict(s, tr.tol);
  const ControlledVerdict vv = controlled_verdict(vector_frame_operator(iv), tr.tol);
  const double gap = std::max(std::abs(cv.bounds.lower - vv.bounds.lower),
                              std::abs(cv.bounds.upper - vv.bounds.upper));
  const double allowed = scaled_tol(tr.tol.eq_tol, s_norm);

  tr.out.theorem = "thm2.8";
  tr.out.premise = true;
  tr.out.add("identity_margin", 1e-9 - worst);
  tr.out.add("verdict_margin", allowed - gap);
  tr.out.conclusion = worst <= 1e-9 && cv.is_controlled_frame == vv.is_controlled_frame &&
                      gap <= allowed;
}

void trial_thm29(Trial& tr) {
  GFrame f = tr.frame();
  Rng rng2(tr.sub(kSecondFrame));
  const InstanceSpec gs = draw_spec(rng2, tr.cfg, derive_seed(tr.sub(kSecondFrame), 1));
  GFrame g = gen_gframe(gs, tr.tol);
  const auto pattern = tr.rng.between(0, 1);
  std::optional<Controller> t, u;
  if (pattern == 0) {
    tr.spec.controller_kind = ControllerKind::gl_random;
    t = tr.controller(ControllerKind::gl_random, kControllerT);
    u = gen_controller(gs.n, ControllerKind::gl_random, tr.sub(kControllerU), std::nullopt, 2,
                       tr.tol);
  } else {
    // Tight summands: rescaled Parseval families with identity controllers.
    tr.spec.controller_kind = ControllerKind::identity;
    f = f.right_multiplied(inverse_sqrt(frame_operator(f), tr.tol)).scaled(tr.rng.uniform(0.5, 2.0));
    g = g.right_multiplied(inverse_sqrt(frame_operator(g), tr.tol)).scaled(tr.rng.uniform(0.5, 2.0));
    t = Controller::identity(f.ambient_dim());
    u = Controller::identity(g.ambient_dim());
  }
  const DirectSumCheck d = check_direct_sum(f, g, *t, *u, tr.tol);
  tr.out = d.report;

  const ControlledVerdict fv = is_controlled_g_frame(f, *t, *t, tr.tol);
  const ControlledVerdict gv = is_controlled_g_frame(g, *u, *u, tr.tol);
  auto tight = [&](const ControlledVerdict& v) {
    return std::abs(v.bounds.upper - v.bounds.lower) <= tr.tol.eq_tol * v.bounds.upper;
  };
  const double gap = std::max(std::abs(d.verdict.bounds.lower - d.predicted.lower),
                              std::abs(d.verdict.bounds.upper - d.predicted.upper));
  const double allowed = scaled_tol(tr.tol.eq_tol, d.predicted.upper);
  tr.out.add("equality_margin", allowed - gap);
  if (tight(fv) && tight(gv)) {
    tr.out.notes.emplace_back("both summands tight");
    tr.out.add("tight_equality_margin", 1e-9 - gap);
    tr.out.conclusion = tr.out.conclusion && gap <= allowed;
  }
}

void trial_lem32(Trial& tr) {
  const GFrame f = tr.frame();
  const auto pattern = tr.rng.between(0, 1);
  if (pattern == 0) {
    tr.spec.controller_kind = ControllerKind::gl_plus_random;
    const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
    const double mag = tr.rng.uniform(0.0, 0.5) * op_norm(f.stacked());
    const GFrame g = gen_perturbed(f, mag, tr.sub(kNoise));
    tr.out = lower_bound_transfer(g, f, t, t, tr.tol).report;
  } else {
    tr.spec.controller_kind = ControllerKind::gl_random;
    InstanceSpec gs = tr.spec;
    gs.seed = tr.sub(kSecondFrame);
    const GFrame g = gen_gframe(gs, tr.tol);
    const Controller t = tr.controller(ControllerKind::gl_random, kControllerT);
    const Controller u = tr.controller(ControllerKind::gl_random, kControllerU);
    tr.out = lower_bound_transfer(g, f, t, u, tr.tol).report;
    tr.out.notes.emplace_back("independent second family");
  }
}

void trial_thm33(Trial& tr) {
  const GFrame f = tr.frame();
  tr.spec.controller_kind = ControllerKind::gl_random;
  const Controller t = tr.controller(ControllerKind::gl_random, kControllerT);
  const DualWitness w = dual_witness(f, t, tr.tol);
  tr.out.theorem = "thm3.3";
  tr.out.premise = w.report.premise;
  merge(tr.out, w.report, "forward_");

  // Converse: a nearby pair (U, G) whose cross operator has positive real part.
  Rng noise(tr.sub(kNoise));
  const Matrix z = noise.complex_normal(tr.spec.n, tr.spec.n);
  const Matrix um = t.matrix() + tr.rng.uniform(0.0, 0.2) * op_norm(t.matrix()) / op_norm(z) * z;
  bool converse_ok = true;
  try {
    const Controller u = Controller::make(um, tr.tol);
    const GFrame g =
        gen_perturbed(f, tr.rng.uniform(0.0, 0.3) * op_norm(f.stacked()), tr.sub(kSecondFrame));
    const double m = positivity_verdict(cross_operator(g, f, t, u).matrix, tr.tol).lambda_min;
    if (m > 0.0) {
      const ImplicationReport c = certify_dual_witness(f, t, g, u, m * (1.0 - 1e-9), tr.tol);
      merge(tr.out, c, "converse_");
      converse_ok = !c.premise || c.conclusion;
      if (!c.premise) tr.out.notes.emplace_back("converse witness rejected");
    } else {
      tr.out.notes.emplace_back("converse pair has no positive witness");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Singular) throw;
    tr.out.notes.emplace_back("converse controller singular");
  }
  tr.out.conclusion = w.report.conclusion && converse_ok;
}

void trial_thm34(Trial& tr) {
  const GFrame f = tr.frame();
  tr.spec.controller_kind = ControllerKind::gl_plus_random;
  const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
  const Controller u = tr.controller(ControllerKind::gl_plus_random, kControllerU);
  // Gamma_i = Lambda_i T U^{-1} + E_i makes S_{T G F U} close to T^* S_F T.
  const GFrame g0 = f.right_multiplied(t.matrix() * u.inverse());
  const double a = is_controlled_g_frame(f, t, t, tr.tol).bounds.lower;
  const double mag =
      tr.rng.uniform(0.0, 1.2) * a / (op_norm(u.matrix()) * controlled_block_mass(f, t));
  const GFrame g = gen_perturbed(g0, mag, tr.sub(kNoise));
  tr.out = near_frame_operator_transfer(f, g, t, u, tr.tol).report;
}

// Gamma_i = Lambda_i S^{-1} T^{-*} U^{-1} + E_i gives S_{T G F U} = I + small.
GFrame near_identity_partner(Trial& tr, const GFrame& f, const Controller& t, const Controller& u,
                             double reach) {
  const Matrix x = invert(frame_operator(f), tr.tol) * t.inverse().adjoint() * u.inverse();
  const double mag =
      tr.rng.uniform(0.0, reach) / (op_norm(u.matrix()) * controlled_block_mass(f, t));
  return gen_perturbed(f.right_multiplied(x), mag, tr.sub(kNoise));
}

void trial_prop35(Trial& tr) {
  const GFrame f = tr.frame();
  tr.spec.controller_kind = ControllerKind::gl_random;
  const Controller t = tr.controller(ControllerKind::gl_random, kControllerT);
  const Controller u = tr.controller(ControllerKind::gl_random, kControllerU);
  const GFrame g = near_identity_partner(tr, f, t, u, 1.2);
  tr.out = near_identity_transfer(g, f, t, u, tr.tol).report;
}

void trial_neumann(Trial& tr) {
  const Index n = tr.spec.n;
  const double q_target = tr.rng.uniform(tr.cfg.q_min, tr.cfg.q_max);
  Rng noise(tr.sub(kNoise));
  const Matrix z = noise.complex_normal(n, n);
  const Matrix s = identity(n) - (q_target / op_norm(z)) * z;
  tr.spec.controller_kind = ControllerKind::identity;

  const NeumannResult res = neumann_inverse(s, 1e-12, 10000, tr.tol);
  const NeumannReport& rep = res.report;
  const Matrix direct = invert(s, tr.tol);
  const double agreement = op_norm(res.inverse - direct);

  double partial = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 20; ++k) {
    const NeumannReport pr = neumann_partial_sum(s, k, tr.tol).report;
    partial = std::min(partial, pr.residual_bound + 1e-12 - pr.residual);
  }
  tr.out.theorem = "neumann";
  tr.out.premise = true;
  tr.out.add("q", rep.q);
  tr.out.add("iterations", static_cast<double>(rep.iterations));
  tr.out.add("residual_margin", rep.residual_bound + 1e-12 - rep.residual);
  tr.out.add("partial_sum_margin", partial);
  tr.out.add("inverse_agreement_margin", 1e-8 - agreement);
  tr.out.add("inverse_norm_margin", rep.inverse_norm_bound - rep.inverse_norm);
  tr.out.conclusion = rep.residual <= rep.residual_bound + 1e-12 && partial >= 0.0 &&
                      agreement <= 1e-8 && rep.inverse_bound_holds;
}

void trial_resolution(Trial& tr) {
  const GFrame f = tr.frame();
  tr.spec.controller_kind = ControllerKind::gl_random;
  const Controller t = tr.controller(ControllerKind::gl_random, kControllerT);
  const Controller u = tr.controller(ControllerKind::gl_random, kControllerU);
  const GFrame g = near_identity_partner(tr, f, t, u, 0.9);
  const Matrix s = cross_operator(g, f, t, u).matrix;
  const double cond = condition_number(s);
  if (!(cond <= 1e4)) {
    throw Error(ErrorCode::HypothesisUnmet, "cond(S) = " + std::to_string(cond) + " above 1e4");
  }
  const ResolutionPair rp = resolution_family(g, f, t, u, tr.tol);
  const double exact = std::max(rp.family.defect, rp.mirror.defect);

  tr.out.theorem = "resolution";
  tr.out.premise = true;
  tr.out.add("exact_margin", 1e-9 - exact);
  bool ok = exact <= 1e-9;

  const double q = op_norm(identity(s.rows()) - s);
  if (q < 1.0) {
    double bound_margin = std::numeric_limits<double>::infinity();
    double monotone = std::numeric_limits<double>::infinity();
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= 10; ++k) {
      const ResolutionFamily tf = truncated_resolution(g, f, t, u, k, tr.tol);
      bound_margin = std::min(bound_margin, tf.bound + 1e-10 - tf.defect);
      if (k > 0) monotone = std::min(monotone, prev - tf.defect);
      prev = tf.defect;
    }
    tr.out.add("truncated_margin", bound_margin);
    tr.out.add("monotone_margin", monotone);
    ok = ok && bound_margin >= 0.0 && monotone >= -tr.tol.eq_tol;
  } else {
    tr.out.notes.emplace_back("truncated family skipped: |I - S| >= 1");
  }
  tr.out.conclusion = ok;
}

void trial_thm42(Trial& tr) {
  const GFrame f = tr.frame();
  tr.spec.controller_kind = ControllerKind::gl_plus_random;
  const Controller t = tr.controller(ControllerKind::gl_plus_random, kControllerT);
  const double a = optimal_bounds(f, tr.tol).bounds.lower;
  const double k = static_cast<double>(f.size());
  // Noise small enough that the gating inequality always holds.
  const double reach =
      0.5 * std::sqrt(a) / (op_norm(t.inverse()) * op_norm(t.matrix()) * std::sqrt(k));
  const double mag = tr.rng.between(0, 9) == 0 ? 0.0 : tr.rng.uniform(0.0, reach);
  const GFrame g = gen_perturbed(f, mag, tr.sub(kNoise));

  std::vector<double> c;
  for (std::size_t i = 0; i < f.size(); ++i) {
    c.push_back(op_norm((f.block(i) - g.block(i)) * t.matrix()) + 1e-12);
  }
  const PerturbationParams p{0.0, 0.0, std::move(c), t, t};
  tr.out.theorem = "thm4.2";
  tr.out.premise = true;
  tr.out.add("c_norm", p.c_norm());
  auto record = [&](const PerturbationReport& r) {
    tr.out.add("certificate_margin", r.certificate.margin);
    tr.out.add("slack_lower", r.slack_lower);
    tr.out.add("slack_upper", r.slack_upper);
  };
  try {
    record(verify_perturbation_theorem(f, g, p, tr.tol, 10000, tr.sub(kSampling)));
    tr.out.conclusion = true;
  } catch (const ContainmentViolation& e) {
    record(e.report());
    tr.out.notes.emplace_back(e.what());
    tr.out.conclusion = false;
  }
}

using TrialFn = void (*)(Trial&);

const std::vector<std::pair<std::string, TrialFn>>& registry() {
  static const std::vector<std::pair<std::string, TrialFn>> r = {
      {"prop2.3fwd", trial_prop23_fwd}, {"prop2.3rev", trial_prop23_rev},
      {"cor2.4", trial_cor24},          {"prop2.5", trial_prop25},
      {"prop2.6", trial_prop26},        {"thm2.7", trial_thm27},
      {"thm2.8", trial_thm28},          {"thm2.9", trial_thm29},
      {"lem3.2", trial_lem32},          {"thm3.3", trial_thm33},
      {"thm3.4", trial_thm34},          {"prop3.5", trial_prop35},
      {"neumann", trial_neumann},       {"resolution", trial_resolution},
      {"thm4.2", trial_thm42},
  };
  return r;
}

TrialFn lookup(std::string_view theorem) {
  for (const auto& [name, fn] : registry()) {
    if (name == theorem) return fn;
  }
  throw Error(ErrorCode::UnknownTheorem, "'" + std::string(theorem) + "' is not registered");
}

// Failures that mean "this instance does not satisfy the hypotheses".
bool is_vacuous(ErrorCode code) {
  switch (code) {
    case ErrorCode::HypothesisUnmet:
    case ErrorCode::GenerationFailed:
    case ErrorCode::Singular:
    case ErrorCode::NotContractive:
      return true;
    default:
      return false;
  }
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

const std::vector<std::string>& registered_theorems() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : registry()) out.push_back(entry.first);
    return out;
  }();
  return names;
}

bool is_registered(std::string_view theorem) {
  const auto& names = registered_theorems();
  return std::find(names.begin(), names.end(), theorem) != names.end();
}

TrialReport run_trial(std::string_view theorem, std::size_t index, std::uint64_t master_seed,
                      const CampaignConfig& config) {
  const TrialFn fn = lookup(theorem);
  const auto start = std::chrono::steady_clock::now();
  TrialReport rec;
  rec.index = index;
  rec.seed = derive_seed(master_seed, index);
  rec.theorem = std::string(theorem);

  Trial tr(rec.seed, config);
  try {
    fn(tr);
    rec.hypotheses_met = tr.out.premise;
    rec.conclusion_verified = tr.out.premise && tr.out.conclusion;
  } catch (const Error& e) {
    if (is_vacuous(e.code())) {
      rec.hypotheses_met = false;
    } else if (e.code() == ErrorCode::MaxIterExceeded) {
      rec.hypotheses_met = true;
      rec.conclusion_verified = false;
    } else {
      throw;
    }
    tr.out.notes.emplace_back(e.what());
  }
  rec.spec = tr.spec;
  rec.margins = std::move(tr.out.margins);
  rec.notes = std::move(tr.out.notes);
  rec.elapsed = std::chrono::steady_clock::now() - start;
  return rec;
}

CampaignReport run_campaign(std::string_view theorem, std::size_t trials,
                            std::uint64_t master_seed, const CampaignConfig& config,
                            unsigned threads) {
  lookup(theorem);
  config.validate();
  CampaignReport rep;
  rep.theorem = std::string(theorem);
  rep.master_seed = master_seed;
  rep.trials = trials;
  rep.config = config;
  rep.records.resize(trials);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(trials, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      try {
        rep.records[i] = run_trial(theorem, i, master_seed, config);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::pair<std::string, std::vector<double>>> buckets;
  for (const auto& r : rep.records) {
    if (!r.hypotheses_met) continue;
    ++rep.hypotheses_met;
    if (r.conclusion_verified) {
      ++rep.verified;
    } else {
      ++rep.violations;
    }
    for (const auto& m : r.margins) {
      auto it = std::find_if(buckets.begin(), buckets.end(),
                             [&](const auto& b) { return b.first == m.name; });
      if (it == buckets.end()) {
        buckets.emplace_back(m.name, std::vector<double>{});
        it = std::prev(buckets.end());
      }
      it->second.push_back(m.value);
    }
  }
  for (auto& [name, values] : buckets) {
    rep.margins.push_back({name, values.size(), *std::min_element(values.begin(), values.end()),
                           median_of(values)});
  }
  return rep;
}

nlohmann::ordered_json to_json(const InstanceSpec& spec) {
  nlohmann::ordered_json j;
  j["n"] = spec.n;
  j["dims"] = spec.dims;
  j["seed"] = spec.seed;
  j["controller_kind"] = std::string(to_string(spec.controller_kind));
  j["degree"] = spec.degree;
  j["conditioning"] = spec.conditioning;
  return j;
}

nlohmann::ordered_json to_json(const CampaignReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["rng"] = std::string(kRngAlgorithm);
  j["theorem"] = report.theorem;
  j["master_seed"] = report.master_seed;
  j["trials"] = report.trials;

  const CampaignConfig& c = report.config;
  ordered_json cfg;
  cfg["dim_min"] = c.dim_min;
  cfg["dim_max"] = c.dim_max;
  cfg["max_blocks"] = c.max_blocks;
  cfg["max_block_dim"] = c.max_block_dim;
  cfg["conditioning"] = c.conditioning;
  cfg["q_min"] = c.q_min;
  cfg["q_max"] = c.q_max;
  cfg["tolerances"] = ordered_json{{"sym_tol", c.tol.sym_tol},
                                   {"pos_tol", c.tol.pos_tol},
                                   {"rank_tol", c.tol.rank_tol},
                                   {"eq_tol", c.tol.eq_tol}};
  j["config"] = std::move(cfg);

  ordered_json agg;
  agg["hypotheses_met"] = report.hypotheses_met;
  agg["conclusion_verified"] = report.verified;
  agg["violations"] = report.violations;
  agg["hypotheses_met_rate"] =
      report.trials ? static_cast<double>(report.hypotheses_met) / report.trials : 0.0;
  if (report.hypotheses_met) {
    agg["conclusion_verified_rate"] =
        static_cast<double>(report.verified) / report.hypotheses_met;
  } else {
    agg["conclusion_verified_rate"] = nullptr;
  }
  ordered_json margins = ordered_json::object();
  for (const auto& m : report.margins) {
    margins[m.name] = ordered_json{{"count", m.count}, {"min", m.min}, {"median", m.median}};
  }
  agg["margins"] = std::move(margins);
  j["aggregate"] = std::move(agg);

  ordered_json records = ordered_json::array();
  for (const auto& r : report.records) {
    ordered_json rec;
    rec["index"] = r.index;
    rec["seed"] = r.seed;
    rec["spec"] = to_json(r.spec);
    rec["hypotheses_met"] = r.hypotheses_met;
    rec["conclusion_verified"] = r.conclusion_verified;
    ordered_json ms = ordered_json::object();
    for (const auto& m : r.margins) ms[m.name] = m.value;
    rec["margins"] = std::move(ms);
    rec["notes"] = r.notes;
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  return j;
}

std::string report_text(const CampaignReport& report) { return to_json(report).dump(2) + "\n"; }

}  // namespace cgf
