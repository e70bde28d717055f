#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cgf/controlled.hpp"

namespace cgf {

enum class ControllerKind { identity, diagonal, gl_random, gl_plus_random, polynomial_of_s };

std::string_view to_string(ControllerKind kind) noexcept;
// Throws InvalidArgument for an unknown name.
ControllerKind parse_controller_kind(std::string_view name);

struct InstanceSpec {
  Index n = 2;
  std::vector<Index> dims{1, 1};
  std::uint64_t seed = 0;
  ControllerKind controller_kind = ControllerKind::gl_plus_random;
  int degree = 2;  // polynomial_of_s only
  double conditioning = 1e4;

  void validate() const;
};

/// Blocks are drawn entrywise from a complex standard normal stream seeded by
/// spec.seed and redrawn until the family is g-complete with cond(S) within the
/// cap. Throws GenerationFailed when sum d_i < n or the retry budget runs out.
GFrame gen_gframe(const InstanceSpec& spec, const Tolerances& tol = {}, int max_retries = 200);

// p(S) = sum_k coeffs[k] S^k.
Controller polynomial_controller(const Matrix& base_s, const std::vector<double>& coeffs,
                                 const Tolerances& tol = {});

/// Draws a controller of the requested kind. polynomial_of_s needs base_s and
/// returns p(S) with coefficients in [0.1, 1], so any two such draws commute
/// with each other and with S.
Controller gen_controller(Index n, ControllerKind kind, std::uint64_t seed,
                          const std::optional<Matrix>& base_s = std::nullopt, int degree = 2,
                          const Tolerances& tol = {});

/// Gamma_i = Lambda_i + magnitude E_i with unit-Frobenius noise blocks E_i.
GFrame gen_perturbed(const GFrame& f, double magnitude, std::uint64_t seed);

}  // namespace cgf
