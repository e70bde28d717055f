#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cgf/controlled.hpp"

namespace cgf {

/// Closeness relation between two families:
///   |Lambda_i T f - Gamma_i U f| <= l1 |Lambda_i T f| + l2 |Gamma_i U f| + c_i |f|.
struct PerturbationParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> c;
  Controller t;
  Controller u;

  // Throws InvalidArgument unless 0 <= lambda < 1, c_i >= 0 finite, and c has `blocks` entries.
  void validate(std::size_t blocks) const;
  double c_norm() const;
};

enum class CertificateMode { certified, sampled, violated };

struct PerturbationCertificate {
  CertificateMode mode = CertificateMode::certified;
  // Smallest observed (rhs - lhs); for the operator-norm route min_i (c_i - |Lambda_i T - Gamma_i U|).
  double margin = 0.0;
  std::size_t trials = 0;
  std::optional<Vector> witness;
  std::optional<std::size_t> index;
};

/// With lambda1 = lambda2 = 0 the relation is equivalent to
/// |Lambda_i T - Gamma_i U| <= c_i, so the answer is exact. Otherwise the same
/// operator-norm test is a sufficient condition, and failing it falls back to
/// sampling `trials` unit vectors per block. A sampled pass is never reported
/// as certified.
PerturbationCertificate certify_perturbation(const GFrame& f, const GFrame& g,
                                             const PerturbationParams& p,
                                             std::size_t trials = 10000, std::uint64_t seed = 0,
                                             const Tolerances& tol = {});

/// Transferred g-frame bounds for the perturbed family. Throws HypothesisUnmet
/// unless (1 - lambda1) sqrt(A) / |T^{-1}| > |c|_2.
FrameBounds predicted_perturbed_bounds(double a, double b, const PerturbationParams& p);

struct PerturbationReport {
  PerturbationCertificate certificate;
  FrameBounds predicted;
  FrameBounds actual;       // optimal bounds of G
  double slack_lower = 0.0;  // actual.lower - predicted.lower
  double slack_upper = 0.0;  // predicted.upper - actual.upper
};

class ContainmentViolation : public Error {
 public:
  explicit ContainmentViolation(PerturbationReport report);
  const PerturbationReport& report() const noexcept { return report_; }

 private:
  PerturbationReport report_;
};

/// Checks that G's optimal bounds lie in the predicted interval. Throws
/// HypothesisUnmet when the perturbation is not certified or the gating
/// inequality fails, and ContainmentViolation when the interval is missed.
PerturbationReport verify_perturbation_theorem(const GFrame& f, const GFrame& g,
                                               const PerturbationParams& p,
                                               const Tolerances& tol = {},
                                               std::size_t trials = 10000,
                                               std::uint64_t seed = 0);

}  // namespace cgf
