#pragma once

#include <optional>
#include <vector>

#include "cgf/gframe.hpp"
#include "cgf/implication.hpp"

namespace cgf {

struct Sandwich {
  double m = 0.0;  // m I <= T
  double M = 0.0;  // T <= M I
};

/// An invertible operator T in GL(H) with its inverse and the GL+ verdict
/// computed once at construction.
class Controller {
 public:
  /// Throws NotSquare, NonFinite, or Singular (M not in GL(H)).
  static Controller make(const Matrix& m, const Tolerances& tol = {});
  static Controller identity(Index n) { return make(cgf::identity(n)); }

  const Matrix& matrix() const noexcept { return matrix_; }
  const Matrix& inverse() const noexcept { return inverse_; }
  Index dim() const noexcept { return matrix_.rows(); }
  // Always true for a constructed controller; kept to mirror GL(H) membership.
  bool in_gl() const noexcept { return true; }
  bool in_gl_plus() const noexcept { return sandwich_.has_value(); }
  const std::optional<Sandwich>& sandwich() const noexcept { return sandwich_; }

 private:
  Controller(Matrix m, Matrix inv, std::optional<Sandwich> s)
      : matrix_(std::move(m)), inverse_(std::move(inv)), sandwich_(s) {}

  Matrix matrix_;
  Matrix inverse_;
  std::optional<Sandwich> sandwich_;
};

struct ControlledVerdict {
  bool operator_self_adjoint = false;
  FrameBounds bounds;
  bool is_controlled_frame = false;
};

// U^* S_Lambda T.
Matrix controlled_frame_operator(const GFrame& f, const Controller& t, const Controller& u);
// sum_i U^* Lambda_i^* Lambda_i T, accumulated term by term.
Matrix controlled_frame_operator_termwise(const GFrame& f, const Controller& t,
                                          const Controller& u);

ControlledVerdict controlled_verdict(const Matrix& s, const Tolerances& tol = {});
ControlledVerdict is_controlled_g_frame(const GFrame& f, const Controller& t, const Controller& u,
                                        const Tolerances& tol = {});

// Controlled frame with GL+ controllers is a plain g-frame.
ImplicationReport check_prop23_forward(const GFrame& f, const Controller& t, const Controller& u,
                                       const Tolerances& tol = {});

struct ReverseContainment {
  ImplicationReport report;
  FrameBounds predicted;  // [m m' C, M M' D]
  ControlledVerdict verdict;
};

// Commuting GL+ controllers that commute with S_Lambda give a controlled frame
// with bounds inside [m m' C, M M' D].
ReverseContainment check_prop23_reverse(const GFrame& f, const Controller& t, const Controller& u,
                                        const Tolerances& tol = {});

ImplicationReport check_cor24(const GFrame& f, const Controller& t, const Controller& u,
                              const Tolerances& tol = {});

struct TransferResult {
  ImplicationReport report;
  FrameBounds predicted;
  ControlledVerdict verdict;  // verdict for the transferred family G
};

/// G inherits the (T,U)-controlled frame property from F when
/// 0 <= U^*(S_F - S_G)T <= R I with R < A. Predicted bounds (A - R, B + R).
TransferResult bounded_difference_transfer(const GFrame& f, const GFrame& g, const Controller& t,
                                           const Controller& u, const Tolerances& tol = {});

enum class PositivityMode { strict, semidefinite };

/// G is a (T,U)-controlled frame when Phi = U^*(S_G - S_F)T is positive.
/// Compactness of Phi holds trivially in finite dimension.
TransferResult positive_difference_transfer(const GFrame& f, const GFrame& g, const Controller& t,
                                            const Controller& u, const Tolerances& tol = {},
                                            PositivityMode mode = PositivityMode::semidefinite);

/// Flattened family {Gamma_ij Lambda_i}, ordered by i then j. Inner frame i
/// lives on C^{d_i}.
GFrame compose(const GFrame& outer, const std::vector<GFrame>& inners);

struct InnerControllers {
  Controller t;
  Controller u;
};

struct CompositionCheck {
  ImplicationReport forward;   // F controlled => composed bounds in [C A, D B]
  ImplicationReport converse;  // composed controlled => F bounds in [A'/D, B'/C]
  double inner_lower = 0.0;    // C = min C_i
  double inner_upper = 0.0;    // D = max D_i
};

/// Both directions of the composition sandwich. Inner controllers default to
/// identity on each C^{d_i}; throws HypothesisUnmet when an inner family is
/// not a controlled frame for its inner controllers.
CompositionCheck check_composition(const GFrame& outer, const std::vector<GFrame>& inners,
                                   const Controller& t, const Controller& u,
                                   const std::vector<InnerControllers>& inner_controllers = {},
                                   const Tolerances& tol = {});

struct InducedVectorFrame {
  std::vector<Vector> vectors;  // f_ij = T^* Lambda_i^* e_ij, ordered by i then j
  Matrix omega;                 // U^* (T^*)^{-1}
};

/// Throws NotUnitaryBasis if some basis is not unitary within eq_tol, and
/// ShapeMismatch if basis i is not d_i x d_i.
InducedVectorFrame induced_vector_frame(const GFrame& f, const Controller& t, const Controller& u,
                                        const std::vector<Matrix>& bases,
                                        const Tolerances& tol = {});

// Omega-controlled vector frame operator Omega sum_ij f_ij f_ij^*.
Matrix vector_frame_operator(const InducedVectorFrame& v);
// sum_ij <f, f_ij> <Omega f_ij, f>.
Scalar induced_quadratic_form(const InducedVectorFrame& v, const Vector& x);

/// Block-diagonal family {Lambda_i (+) Gamma_i} on C^{n+k}. The shorter family is
/// padded with zero blocks whose row count matches the partner block.
GFrame direct_sum(const GFrame& f, const GFrame& g);
Controller direct_sum(const Controller& t, const Controller& u, const Tolerances& tol = {});

struct DirectSumCheck {
  ImplicationReport report;
  FrameBounds predicted;  // (min{A,C}, max{B,D})
  ControlledVerdict verdict;
};

DirectSumCheck check_direct_sum(const GFrame& f, const GFrame& g, const Controller& t,
                                const Controller& u, const Tolerances& tol = {});

}  // namespace cgf
