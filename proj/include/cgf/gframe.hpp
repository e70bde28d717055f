#pragma once

#include <string>
#include <vector>

#include "cgf/numerics.hpp"

namespace cgf {

/// A finite g-frame candidate: operators Lambda_i : C^n -> C^{d_i}, stored as
/// d_i x n blocks and identified by position.
class GFrame {
 public:
  GFrame(Index ambient_dim, std::vector<Matrix> blocks);

  Index ambient_dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  const Matrix& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<Matrix>& blocks() const noexcept { return blocks_; }

  std::vector<Index> dims() const;
  Index total_dim() const;

  // Analysis operator as one (sum d_i) x n matrix.
  Matrix stacked() const;

  GFrame scaled(Scalar s) const;
  // Every block right-multiplied by `m` (n x n).
  GFrame right_multiplied(const Matrix& m) const;

  friend bool operator==(const GFrame& a, const GFrame& b);

 private:
  Index n_;
  std::vector<Matrix> blocks_;
};

struct CoefficientVector {
  std::vector<Vector> segments;

  bool matches(const GFrame& f) const;
};

Scalar inner(const CoefficientVector& a, const CoefficientVector& b);

enum class BoundsProvenance { optimal, predicted };

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  BoundsProvenance provenance = BoundsProvenance::optimal;
  std::string theorem;  // set when provenance == predicted

  static FrameBounds optimal(double lower, double upper);
  static FrameBounds predicted(double lower, double upper, std::string theorem);

  bool contains(double a, double b, double slack) const {
    return a >= lower - slack && b <= upper + slack;
  }
};

struct GFrameVerdict {
  bool is_bessel = true;
  bool is_frame = false;
  bool is_parseval = false;
  bool is_tight = false;
  FrameBounds bounds;
};

enum class BoundsMode {
  whole_space,
  // g-frame sequence: bounds of S restricted to span{Lambda_i^*(H_i)}.
  span,
};

CoefficientVector analysis(const GFrame& f, const Vector& x);
Vector synthesis(const GFrame& f, const CoefficientVector& c);
Matrix frame_operator(const GFrame& f);

GFrameVerdict optimal_bounds(const GFrame& f, const Tolerances& tol = {},
                             BoundsMode mode = BoundsMode::whole_space);
bool is_g_complete(const GFrame& f, const Tolerances& tol = {});

}  // namespace cgf
