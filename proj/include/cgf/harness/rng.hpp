#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "cgf/numerics.hpp"

namespace cgf {

// Recorded in every campaign report so runs can be replayed elsewhere.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64; seeds split with splitmix64; normals by Box-Muller on 53-bit uniforms";

std::uint64_t splitmix64(std::uint64_t x) noexcept;
// Child seed for (master, a, b); distinct tuples give unrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Deterministic generator. Only the engine's raw 64-bit output is used, so
/// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  double normal();
  Scalar complex_normal();  // E|z|^2 = 1
  Matrix complex_normal(Index rows, Index cols);
  Vector unit_vector(Index n);
  // Haar-distributed unitary.
  Matrix unitary(Index n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace cgf
