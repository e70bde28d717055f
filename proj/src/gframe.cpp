#include "cgf/gframe.hpp"

#include <cmath>
#include <utility>

namespace cgf {

GFrame::GFrame(Index ambient_dim, std::vector<Matrix> blocks)
    : n_(ambient_dim), blocks_(std::move(blocks)) {
  if (n_ < 1) throw Error(ErrorCode::InvalidArgument, "ambient dimension must be positive");
  if (blocks_.empty()) throw Error(ErrorCode::InvalidArgument, "a g-frame needs at least one block");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Matrix& b = blocks_[i];
    if (b.cols() != n_ || b.rows() < 1) {
      throw Error(ErrorCode::ShapeError, "block " + std::to_string(i) + " is " +
                                             std::to_string(b.rows()) + "x" +
                                             std::to_string(b.cols()) + ", expected d x " +
                                             std::to_string(n_));
    }
    require_finite(b, "block " + std::to_string(i));
  }
}

std::vector<Index> GFrame::dims() const {
  std::vector<Index> d;
  d.reserve(blocks_.size());
  for (const auto& b : blocks_) d.push_back(b.rows());
  return d;
}

Index GFrame::total_dim() const {
  Index total = 0;
  for (const auto& b : blocks_) total += b.rows();
  return total;
}

Matrix GFrame::stacked() const {
  Matrix s(total_dim(), n_);
  Index row = 0;
  for (const auto& b : blocks_) {
    s.middleRows(row, b.rows()) = b;
    row += b.rows();
  }
  return s;
}

GFrame GFrame::scaled(Scalar s) const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(s * b);
  return GFrame(n_, std::move(out));
}

GFrame GFrame::right_multiplied(const Matrix& m) const {
  if (m.rows() != n_ || m.cols() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "right factor must be n x n");
  }
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b * m);
  return GFrame(n_, std::move(out));
}

bool operator==(const GFrame& a, const GFrame& b) {
  if (a.n_ != b.n_ || a.blocks_.size() != b.blocks_.size()) return false;
  for (std::size_t i = 0; i < a.blocks_.size(); ++i) {
    if (a.blocks_[i].rows() != b.blocks_[i].rows() || a.blocks_[i] != b.blocks_[i]) return false;
  }
  return true;
}

bool CoefficientVector::matches(const GFrame& f) const {
  if (segments.size() != f.size()) return false;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].size() != f.block(i).rows()) return false;
  }
  return true;
}

Scalar inner(const CoefficientVector& a, const CoefficientVector& b) {
  if (a.segments.size() != b.segments.size()) {
    throw Error(ErrorCode::ShapeMismatch, "coefficient vectors have different segment counts");
  }
  Scalar acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    if (a.segments[i].size() != b.segments[i].size()) {
      throw Error(ErrorCode::ShapeMismatch, "segment " + std::to_string(i) + " lengths differ");
    }
    // <x, y> is linear in x: sum x_k conj(y_k).
    acc += b.segments[i].dot(a.segments[i]);
  }
  return acc;
}

FrameBounds FrameBounds::optimal(double lower, double upper) {
  return {lower, upper, BoundsProvenance::optimal, {}};
}

FrameBounds FrameBounds::predicted(double lower, double upper, std::string theorem) {
  return {lower, upper, BoundsProvenance::predicted, std::move(theorem)};
}

CoefficientVector analysis(const GFrame& f, const Vector& x) {
  if (x.size() != f.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "signal length " + std::to_string(x.size()) +
                                                  " != ambient dimension " +
                                                  std::to_string(f.ambient_dim()));
  }
  CoefficientVector c;
  c.segments.reserve(f.size());
  for (const auto& b : f.blocks()) c.segments.push_back(b * x);
  return c;
}

Vector synthesis(const GFrame& f, const CoefficientVector& c) {
  if (!c.matches(f)) throw Error(ErrorCode::ShapeMismatch, "coefficients do not match frame shape");
  Vector out = Vector::Zero(f.ambient_dim());
  for (std::size_t i = 0; i < f.size(); ++i) out += f.block(i).adjoint() * c.segments[i];
  return out;
}

Matrix frame_operator(const GFrame& f) {
  Matrix s = Matrix::Zero(f.ambient_dim(), f.ambient_dim());
  for (const auto& b : f.blocks()) s += b.adjoint() * b;
  return s;
}

namespace {

// Orthonormal basis (columns) of span{Lambda_i^* (H_i)} = range of stacked^*.
Matrix adjoint_range_basis(const GFrame& f, const Tolerances& tol) {
  Eigen::JacobiSVD<Matrix> svd(f.stacked(), Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  Index rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (rank < s.size() && s(rank) > tol.rank_tol * s(0)) ++rank;
  }
  return svd.matrixV().leftCols(rank);
}

}  // namespace

GFrameVerdict optimal_bounds(const GFrame& f, const Tolerances& tol, BoundsMode mode) {
  Matrix s = frame_operator(f);
  if (mode == BoundsMode::span) {
    const Matrix basis = adjoint_range_basis(f, tol);
    if (basis.cols() == 0) {
      GFrameVerdict v;
      v.bounds = FrameBounds::optimal(0.0, 0.0);
      return v;
    }
    s = basis.adjoint() * s * basis;
  }
  const HermitianEigen eig = herm_eig(s, tol);
  const double lo = std::max(eig.values(0), 0.0);
  const double hi = std::max(eig.values(eig.values.size() - 1), lo);

  GFrameVerdict v;
  v.is_bessel = true;
  v.bounds = FrameBounds::optimal(lo, hi);
  v.is_frame = eig.values(0) > tol.pos_tol;
  v.is_tight = v.is_frame && std::abs(hi - lo) <= tol.eq_tol * hi;
  v.is_parseval = v.is_tight && std::abs(lo - 1.0) <= tol.eq_tol && std::abs(hi - 1.0) <= tol.eq_tol;
  return v;
}

bool is_g_complete(const GFrame& f, const Tolerances& tol) {
  if (f.total_dim() < f.ambient_dim()) return false;
  const RealVector s = singular_values(f.stacked());
  if (s(0) == 0.0) return false;
  return s(f.ambient_dim() - 1) > tol.rank_tol * s(0);
}

}  // namespace cgf
