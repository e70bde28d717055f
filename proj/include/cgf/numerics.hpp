#pragma once

// Dense complex linear algebra substrate. Every operator in the library is a
// finite matrix over C; real data is carried with zero imaginary parts.

#include <complex>

#include <Eigen/Dense>

#include "cgf/error.hpp"

namespace cgf {

using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Tolerances {
  double sym_tol = 1e-8;    // relative self-adjointness defect
  double pos_tol = 1e-10;   // absolute eigenvalue floor for positivity
  double rank_tol = 1e-10;  // relative singular value floor
  double eq_tol = 1e-9;     // numeric equality

  // Throws InvalidArgument unless every tolerance is strictly positive.
  void validate() const;
};

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns, vectors.col(k) pairs with values(k)
};

struct PositivityVerdict {
  bool is_self_adjoint = false;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool is_positive = false;
};

Matrix identity(Index n);
Matrix adjoint(const Matrix& m);

bool all_finite(const Matrix& m);
// Throws NonFinite naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

// Descending singular values.
RealVector singular_values(const Matrix& m);
double op_norm(const Matrix& m);
double min_singular_value(const Matrix& m);
// sigma_max / sigma_min; +inf for rank-deficient input.
double condition_number(const Matrix& m);

double self_adjoint_defect(const Matrix& m);
bool is_self_adjoint(const Matrix& m, const Tolerances& tol = {});
Matrix hermitian_part(const Matrix& m);

/// Eigen-decomposition of a self-adjoint matrix. The input is symmetrized
/// before solving, so round-off asymmetry within sym_tol is absorbed.
/// Throws NotSquare, or NotSelfAdjoint when the defect exceeds sym_tol * |M|.
HermitianEigen herm_eig(const Matrix& m, const Tolerances& tol = {});

/// Inverse of a member of GL(H). Throws Singular when
/// sigma_min <= rank_tol * sigma_max.
Matrix invert(const Matrix& m, const Tolerances& tol = {});

/// Spectral sandwich lambda_min I <= (M+M*)/2 <= lambda_max I together with the
/// GL+ decision. Never throws NotSelfAdjoint; non-self-adjoint input simply
/// yields is_positive = false.
PositivityVerdict positivity_verdict(const Matrix& m, const Tolerances& tol = {});

double commutator_norm(const Matrix& x, const Matrix& y);

// Absolute slack used for inequality checks on quantities of size `scale`.
inline double scaled_tol(double tol, double scale) { return tol * (scale > 1.0 ? scale : 1.0); }

}  // namespace cgf
