#include "cgf/harness/generators.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "cgf/harness/rng.hpp"

namespace cgf {

std::string_view to_string(ControllerKind kind) noexcept {
  switch (kind) {
    case ControllerKind::identity: return "identity";
    case ControllerKind::diagonal: return "diagonal";
    case ControllerKind::gl_random: return "gl_random";
    case ControllerKind::gl_plus_random: return "gl_plus_random";
    case ControllerKind::polynomial_of_s: return "polynomial_of_S";
  }
  return "unknown";
}

ControllerKind parse_controller_kind(std::string_view name) {
  for (auto k : {ControllerKind::identity, ControllerKind::diagonal, ControllerKind::gl_random,
                 ControllerKind::gl_plus_random, ControllerKind::polynomial_of_s}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown controller kind '" + std::string(name) + "'");
}

void InstanceSpec::validate() const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  if (dims.empty()) throw Error(ErrorCode::InvalidArgument, "dims must be non-empty");
  for (Index d : dims) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "block dims must be positive");
  }
  if (!(conditioning >= 1.0)) throw Error(ErrorCode::InvalidArgument, "conditioning must be >= 1");
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be non-negative");
}

GFrame gen_gframe(const InstanceSpec& spec, const Tolerances& tol, int max_retries) {
  spec.validate();
  const Index total = std::accumulate(spec.dims.begin(), spec.dims.end(), Index{0});
  if (total < spec.n) {
    throw Error(ErrorCode::GenerationFailed,
                "sum of block dims " + std::to_string(total) + " < n = " + std::to_string(spec.n));
  }
  Rng rng(spec.seed);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<Matrix> blocks;
    blocks.reserve(spec.dims.size());
    for (Index d : spec.dims) blocks.push_back(rng.complex_normal(d, spec.n));
    GFrame f(spec.n, std::move(blocks));
    if (!is_g_complete(f, tol)) continue;
    if (condition_number(frame_operator(f)) <= spec.conditioning) return f;
  }
  throw Error(ErrorCode::GenerationFailed,
              "no g-complete draw within conditioning cap after " + std::to_string(max_retries) +
                  " attempts");
}

Controller polynomial_controller(const Matrix& base_s, const std::vector<double>& coeffs,
                                 const Tolerances& tol) {
  if (base_s.rows() != base_s.cols()) throw Error(ErrorCode::NotSquare, "base S must be square");
  if (coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "polynomial needs coefficients");
  const Index n = base_s.rows();
  Matrix power = identity(n);
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (k > 0) power = power * base_s;
    p += coeffs[k] * power;
  }
  return Controller::make(p, tol);
}

namespace {

constexpr int kControllerRetries = 100;

Matrix draw_controller_matrix(Index n, ControllerKind kind, Rng& rng,
                              const std::optional<Matrix>& base_s, int degree) {
  switch (kind) {
    case ControllerKind::identity: return identity(n);
    case ControllerKind::diagonal: {
      Matrix m = Matrix::Zero(n, n);
      for (Index i = 0; i < n; ++i) m(i, i) = rng.uniform(0.5, 2.0);
      return m;
    }
    case ControllerKind::gl_random: {
      const Matrix z = rng.complex_normal(n, n);
      return identity(n) + (0.5 / std::sqrt(static_cast<double>(n))) * z;
    }
    case ControllerKind::gl_plus_random: {
      const Matrix q = rng.unitary(n);
      RealVector ev(n);
      for (Index i = 0; i < n; ++i) ev(i) = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));
      Matrix m = q * ev.cast<Scalar>().asDiagonal() * q.adjoint();
      return hermitian_part(m);
    }
    case ControllerKind::polynomial_of_s: {
      if (!base_s) throw Error(ErrorCode::InvalidArgument, "polynomial_of_S needs a base S");
      Matrix power = identity(n);
      Matrix p = Matrix::Zero(n, n);
      for (int k = 0; k <= degree; ++k) {
        if (k > 0) power = power * *base_s;
        p += rng.uniform(0.1, 1.0) * power;
      }
      return p;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown controller kind");
}

}  // namespace

Controller gen_controller(Index n, ControllerKind kind, std::uint64_t seed,
                          const std::optional<Matrix>& base_s, int degree,
                          const Tolerances& tol) {
  if (base_s && (base_s->rows() != n || base_s->cols() != n)) {
    throw Error(ErrorCode::DimensionMismatch, "base S must be n x n");
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < kControllerRetries; ++attempt) {
    const Matrix m = draw_controller_matrix(n, kind, rng, base_s, degree);
    if (kind == ControllerKind::gl_random && condition_number(m) > 100.0) continue;
    try {
      return Controller::make(m, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Singular) throw;
    }
  }
  throw Error(ErrorCode::Singular, "controller draws kept landing outside GL(H)");
}

GFrame gen_perturbed(const GFrame& f, double magnitude, std::uint64_t seed) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw Error(ErrorCode::InvalidArgument, "magnitude must be finite and non-negative");
  }
  if (magnitude == 0.0) return f;
  Rng rng(seed);
  std::vector<Matrix> blocks;
  blocks.reserve(f.size());
  for (const auto& b : f.blocks()) {
    Matrix e = rng.complex_normal(b.rows(), b.cols());
    e /= e.norm();
    blocks.push_back(b + magnitude * e);
  }
  return GFrame(f.ambient_dim(), std::move(blocks));
}

}  // namespace cgf
