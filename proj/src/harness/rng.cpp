#include "cgf/harness/rng.hpp"

#include <cmath>
#include <numbers>

namespace cgf {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(engine_() % span);
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Scalar Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Scalar(re, im) / std::numbers::sqrt2;
}

Matrix Rng::complex_normal(Index rows, Index cols) {
  Matrix m(rows, cols);
  // Row-major fill order is part of the reproducibility contract.
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = complex_normal();
  }
  return m;
}

Vector Rng::unit_vector(Index n) {
  Vector v(n);
  double norm = 0.0;
  do {
    for (Index i = 0; i < n; ++i) v(i) = complex_normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

Matrix Rng::unitary(Index n) {
  const Matrix z = complex_normal(n, n);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace cgf
