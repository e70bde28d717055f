#include "cgf/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cgf/harness/rng.hpp"

namespace cgf {

void PerturbationParams::validate(std::size_t blocks) const {
  auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x < 1.0; };
  if (!in_unit(lambda1) || !in_unit(lambda2)) {
    throw Error(ErrorCode::InvalidArgument, "lambda1 and lambda2 must lie in [0, 1)");
  }
  if (c.size() != blocks) {
    throw Error(ErrorCode::ShapeMismatch, "need one c_i per block");
  }
  for (double ci : c) {
    if (!std::isfinite(ci) || ci < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "c_i must be finite and non-negative");
    }
  }
  if (t.dim() != u.dim()) throw Error(ErrorCode::DimensionMismatch, "T and U differ in size");
}

double PerturbationParams::c_norm() const {
  double s = 0.0;
  for (double ci : c) s += ci * ci;
  return std::sqrt(s);
}

namespace {

void require_same_shape(const GFrame& f, const GFrame& g, const PerturbationParams& p) {
  if (f.ambient_dim() != g.ambient_dim() || f.size() != g.size()) {
    throw Error(ErrorCode::ShapeMismatch, "families must share ambient dimension and index set");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.block(i).rows() != g.block(i).rows()) {
      throw Error(ErrorCode::ShapeMismatch, "block " + std::to_string(i) + " dimensions differ");
    }
  }
  p.validate(f.size());
  if (p.t.dim() != f.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "controller dimension mismatch");
  }
}

struct Sample {
  double lhs;
  double rhs;
};

Sample evaluate(const Matrix& ft, const Matrix& gu, double l1, double l2, double ci,
                const Vector& x) {
  const Vector a = ft * x;
  const Vector b = gu * x;
  return {(a - b).norm(), l1 * a.norm() + l2 * b.norm() + ci * x.norm()};
}

}  // namespace

PerturbationCertificate certify_perturbation(const GFrame& f, const GFrame& g,
                                             const PerturbationParams& p, std::size_t trials,
                                             std::uint64_t seed, const Tolerances& tol) {
  require_same_shape(f, g, p);
  PerturbationCertificate cert;

  std::vector<Matrix> ft, gu;
  ft.reserve(f.size());
  gu.reserve(f.size());
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_index = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    ft.push_back(f.block(i) * p.t.matrix());
    gu.push_back(g.block(i) * p.u.matrix());
    const double m = p.c[i] - op_norm(ft[i] - gu[i]);
    if (m < worst) {
      worst = m;
      worst_index = i;
    }
  }
  if (worst >= 0.0) {
    cert.mode = CertificateMode::certified;
    cert.margin = worst;
    return cert;
  }

  // Top right singular vector of the worst defect block.
  Eigen::JacobiSVD<Matrix> svd(ft[worst_index] - gu[worst_index], Eigen::ComputeFullV);
  const Vector top = svd.matrixV().col(0);
  if (p.lambda1 == 0.0 && p.lambda2 == 0.0) {
    cert.mode = CertificateMode::violated;
    cert.margin = worst;
    cert.witness = top;
    cert.index = worst_index;
    return cert;
  }

  const Sample s0 =
      evaluate(ft[worst_index], gu[worst_index], p.lambda1, p.lambda2, p.c[worst_index], top);
  double margin = s0.rhs - s0.lhs;
  if (s0.lhs - s0.rhs > tol.eq_tol) {
    cert.mode = CertificateMode::violated;
    cert.margin = margin;
    cert.witness = top;
    cert.index = worst_index;
    return cert;
  }
  const Index n = f.ambient_dim();
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t k = 0; k < trials; ++k) {
      Rng rng(derive_seed(seed, i, k));
      const Vector x = rng.unit_vector(n);
      const Sample s = evaluate(ft[i], gu[i], p.lambda1, p.lambda2, p.c[i], x);
      margin = std::min(margin, s.rhs - s.lhs);
      if (s.lhs - s.rhs > tol.eq_tol) {
        cert.mode = CertificateMode::violated;
        cert.margin = margin;
        cert.witness = x;
        cert.index = i;
        cert.trials = k + 1;
        return cert;
      }
    }
  }
  cert.mode = CertificateMode::sampled;
  cert.margin = margin;
  cert.trials = trials;
  return cert;
}

FrameBounds predicted_perturbed_bounds(double a, double b, const PerturbationParams& p) {
  const double c = p.c_norm();
  const double tinv = op_norm(p.t.inverse());
  const double tn = op_norm(p.t.matrix());
  const double un = op_norm(p.u.matrix());
  const double gate = (1.0 - p.lambda1) * std::sqrt(a) / tinv;
  if (!(gate > c)) {
    throw Error(ErrorCode::HypothesisUnmet, "(1 - lambda1) sqrt(A) / |T^-1| = " +
                                                std::to_string(gate) + " does not exceed |c|_2 = " +
                                                std::to_string(c));
  }
  const double lo = (gate - c) / (1.0 + p.lambda2) / un;
  const double hi = ((1.0 + p.lambda1) * std::sqrt(b) * tn + c) / (1.0 - p.lambda2) / un;
  return FrameBounds::predicted(lo * lo, hi * hi, "thm4.2");
}

ContainmentViolation::ContainmentViolation(PerturbationReport report)
    : Error(ErrorCode::ContainmentViolation,
            "bounds (" + std::to_string(report.actual.lower) + ", " +
                std::to_string(report.actual.upper) + ") outside predicted (" +
                std::to_string(report.predicted.lower) + ", " +
                std::to_string(report.predicted.upper) + ")"),
      report_(std::move(report)) {}

PerturbationReport verify_perturbation_theorem(const GFrame& f, const GFrame& g,
                                               const PerturbationParams& p,
                                               const Tolerances& tol, std::size_t trials,
                                               std::uint64_t seed) {
  PerturbationReport rep;
  rep.certificate = certify_perturbation(f, g, p, trials, seed, tol);
  if (rep.certificate.mode != CertificateMode::certified) {
    throw Error(ErrorCode::HypothesisUnmet, "perturbation relation is not certified");
  }
  const GFrameVerdict fv = optimal_bounds(f, tol);
  rep.predicted = predicted_perturbed_bounds(fv.bounds.lower, fv.bounds.upper, p);
  rep.actual = optimal_bounds(g, tol).bounds;
  rep.slack_lower = rep.actual.lower - rep.predicted.lower;
  rep.slack_upper = rep.predicted.upper - rep.actual.upper;
  const double slack = scaled_tol(tol.eq_tol, rep.predicted.upper);
  if (rep.slack_lower < -slack || rep.slack_upper < -slack) throw ContainmentViolation(rep);
  return rep;
}

}  // namespace cgf
