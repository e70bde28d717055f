#pragma once

#include <cstddef>
#include <vector>

#include "cgf/controlled.hpp"

namespace cgf {

/// S_{T Gamma Lambda U} = U^* (sum_i Gamma_i^* Lambda_i) T for a pair of
/// families sharing one index set. Generally not self-adjoint.
struct CrossOperator {
  Matrix matrix;         // U^* S_{Gamma Lambda} T
  Matrix pair_operator;  // S_{Gamma Lambda} = sum_i Gamma_i^* Lambda_i
};

CrossOperator cross_operator(const GFrame& g, const GFrame& f, const Controller& t,
                             const Controller& u);
Matrix cross_operator_termwise(const GFrame& g, const GFrame& f, const Controller& t,
                               const Controller& u);

// adjoint(S_{T G F U}) == S_{U F G T}
bool adjoint_identity_check(const GFrame& g, const GFrame& f, const Controller& t,
                            const Controller& u, const Tolerances& tol = {});

struct LowerBoundTransfer {
  ImplicationReport report;
  double lambda = 0.0;         // sigma_min(S_{T G F U})
  double bessel_t = 0.0;       // B_T = lambda_max(T^* S_F T)
  double bessel_u = 0.0;       // B_U = lambda_max(U^* S_G U)
  double predicted_f = 0.0;    // lambda^2 / B_U
  double predicted_g = 0.0;    // lambda^2 / B_T
  double actual_f = 0.0;       // lambda_min(T^* S_F T)
  double actual_g = 0.0;       // lambda_min(U^* S_G U)
};

/// A cross operator bounded below makes F (T,T)- and G (U,U)-controlled
/// frames. Throws HypothesisUnmet when lambda <= pos_tol.
LowerBoundTransfer lower_bound_transfer(const GFrame& g, const GFrame& f, const Controller& t,
                                        const Controller& u, const Tolerances& tol = {});

struct DualWitness {
  Controller u;
  GFrame g;
  double m = 0.0;
  ImplicationReport report;
};

/// Forward direction: a (T,T)-controlled frame is its own witness with
/// U = T, G = F, m = A_T. Throws HypothesisUnmet otherwise.
DualWitness dual_witness(const GFrame& f, const Controller& t, const Tolerances& tol = {});

/// Converse direction: if Re<S f, f> >= m |f|^2 for S = U^* sum Gamma_i^* Lambda_i T
/// with m > 0, then F's (T,T)-controlled lower bound is at least m^2 / B_U.
ImplicationReport certify_dual_witness(const GFrame& f, const Controller& t, const GFrame& g,
                                       const Controller& u, double m, const Tolerances& tol = {});

struct NearOperatorTransfer {
  ImplicationReport report;
  double lambda = 0.0;           // |S_{T G F U} - S_{T F T}|
  double predicted_sigma = 0.0;  // A - lambda
  double predicted_lower = 0.0;  // (A - lambda)^2 / B
  double actual_sigma = 0.0;     // sigma_min(S_{T G F U})
  double actual_lower = 0.0;     // lambda_min(U^* S_G U)
  bool near_boundary = false;    // lambda within eq_tol of A
};

/// Throws HypothesisUnmet unless F is a (T,T)-controlled frame and lambda < A.
NearOperatorTransfer near_frame_operator_transfer(const GFrame& f, const GFrame& g,
                                                  const Controller& t, const Controller& u,
                                                  const Tolerances& tol = {});

struct NearIdentityTransfer {
  ImplicationReport report;
  double epsilon = 0.0;          // |I - S_{T G F U}|
  double actual_sigma = 0.0;
  double bessel_t = 0.0;
  double bessel_u = 0.0;
  double predicted_f = 0.0;      // (1 - eps)^2 / B_U
  double predicted_g = 0.0;      // (1 - eps)^2 / B_T, derived through the adjoint identity
  double actual_f = 0.0;
  double actual_g = 0.0;
};

NearIdentityTransfer near_identity_transfer(const GFrame& g, const GFrame& f, const Controller& t,
                                            const Controller& u, const Tolerances& tol = {});

struct NeumannReport {
  double q = 0.0;                   // |I - S|
  std::size_t iterations = 0;       // N, index of the last partial sum
  double residual = 0.0;            // |P_N S - I|
  double residual_bound = 0.0;      // q^{N+1} / (1 - q)
  double inverse_norm_bound = 0.0;  // 1 / (1 - q)
  double inverse_norm = 0.0;        // |S^{-1}| from a direct inverse
  bool inverse_bound_holds = false;
};

struct NeumannResult {
  Matrix inverse;  // P_N = sum_{k <= N} (I - S)^k
  NeumannReport report;
};

/// Partial sum with exactly N + 1 terms. Throws NotContractive when q >= 1.
NeumannResult neumann_partial_sum(const Matrix& s, std::size_t n_terms_minus_one,
                                  const Tolerances& tol = {});

/// Stops at the first N with |P_N S - I| <= target, capped at max_iter.
/// Throws NotContractive (q >= 1) or MaxIterExceeded.
NeumannResult neumann_inverse(const Matrix& s, double target = 1e-12,
                              std::size_t max_iter = 10000, const Tolerances& tol = {});

enum class ReconstructionPath { neumann, direct };

struct Reconstruction {
  Vector signal;
  NeumannReport report;
  // |f_rec - S (S^{-1} f_rec)|: agreement of the two orderings of the formula.
  double ordering_gap = 0.0;
};

/// Recover f from coefficients {Lambda_i T f} via f = S^{-1} U^* sum_i Gamma_i^* c_i.
Reconstruction reconstruct(const CoefficientVector& coeffs, const GFrame& g, const GFrame& f,
                           const Controller& t, const Controller& u, const Tolerances& tol = {},
                           std::size_t max_iter = 10000,
                           ReconstructionPath path = ReconstructionPath::neumann,
                           double target = 1e-14);

enum class ResolutionKind { exact, truncated };

enum class InvertibilitySource { near_identity, near_frame_operator, direct };

struct ResolutionFamily {
  ResolutionKind kind = ResolutionKind::exact;
  std::size_t truncation = 0;  // N for the truncated kind
  std::vector<Matrix> terms;
  double defect = 0.0;  // |sum terms - I|
  double bound = 0.0;   // declared tolerance (exact) or q^{N+1}/(1-q) (truncated)
};

struct ResolutionPair {
  ResolutionFamily family;  // S^{-1} U^* Gamma_i^* Lambda_i T
  ResolutionFamily mirror;  // S_{U F G T}^{-1} T^* Lambda_i^* Gamma_i U
  InvertibilitySource source = InvertibilitySource::direct;
  double condition = 0.0;
};

/// Throws Singular when S_{T G F U} is not invertible.
ResolutionPair resolution_family(const GFrame& g, const GFrame& f, const Controller& t,
                                 const Controller& u, const Tolerances& tol = {});

/// Terms (I - S)^n U^* Gamma_i^* Lambda_i T for n = 0..N, stored n-major.
/// Throws NotContractive when q >= 1.
ResolutionFamily truncated_resolution(const GFrame& g, const GFrame& f, const Controller& t,
                                      const Controller& u, std::size_t n_max,
                                      const Tolerances& tol = {});

}  // namespace cgf
