#include "cgf/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cgf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
    case ErrorCode::NotUnitaryBasis: return "NotUnitaryBasis";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::ContainmentViolation: return "ContainmentViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::UnknownTheorem: return "UnknownTheorem";
  }
  return "Unknown";
}

void Tolerances::validate() const {
  if (!(sym_tol > 0 && pos_tol > 0 && rank_tol > 0 && eq_tol > 0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerances must be strictly positive");
  }
}

namespace {

void require_square(const Matrix& m, std::string_view op) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NotSquare, std::string(op) + ": " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()));
  }
}

}  // namespace

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix adjoint(const Matrix& m) { return m.adjoint(); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what));
}

RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

double min_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  RealVector s = singular_values(m);
  // Wide matrices have min(rows, cols) singular values; the trailing ones
  // correspond to a nontrivial kernel.
  if (m.cols() > m.rows()) return 0.0;
  return s(s.size() - 1);
}

double condition_number(const Matrix& m) {
  const RealVector s = singular_values(m);
  if (s.size() == 0 || m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const double lo = s(s.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

double self_adjoint_defect(const Matrix& m) {
  require_square(m, "self_adjoint_defect");
  return op_norm(m - m.adjoint());
}

bool is_self_adjoint(const Matrix& m, const Tolerances& tol) {
  return self_adjoint_defect(m) <= tol.sym_tol * op_norm(m);
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

namespace {

HermitianEigen solve_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NotSelfAdjoint, "eigensolver failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

HermitianEigen herm_eig(const Matrix& m, const Tolerances& tol) {
  require_square(m, "herm_eig");
  const double defect = self_adjoint_defect(m);
  const double scale = op_norm(m);
  if (defect > tol.sym_tol * scale) {
    throw Error(ErrorCode::NotSelfAdjoint,
                "defect " + std::to_string(defect) + " exceeds sym_tol * |M|");
  }
  return solve_hermitian(m);
}

Matrix invert(const Matrix& m, const Tolerances& tol) {
  require_square(m, "invert");
  const RealVector s = singular_values(m);
  if (s.size() == 0 || !(s(s.size() - 1) > tol.rank_tol * s(0))) {
    throw Error(ErrorCode::Singular, "smallest singular value below rank_tol * sigma_max");
  }
  return m.fullPivLu().inverse();
}

PositivityVerdict positivity_verdict(const Matrix& m, const Tolerances& tol) {
  require_square(m, "positivity_verdict");
  PositivityVerdict v;
  v.is_self_adjoint = is_self_adjoint(m, tol);
  const HermitianEigen eig = solve_hermitian(m);
  v.lambda_min = eig.values(0);
  v.lambda_max = eig.values(eig.values.size() - 1);
  v.is_positive = v.is_self_adjoint && v.lambda_min > tol.pos_tol;
  return v;
}

double commutator_norm(const Matrix& x, const Matrix& y) { return op_norm(x * y - y * x); }

}  // namespace cgf
