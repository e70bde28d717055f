#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cgf {

// A named real; by convention a non-negative margin means the inequality it
// measures holds (before any tolerance is applied).
struct Margin {
  std::string name;
  double value = 0.0;
};

/// Outcome of checking one "hypothesis => conclusion" statement on a concrete
/// instance. Preconditions that make the statement inapplicable are reported
/// by throwing HypothesisUnmet instead.
struct ImplicationReport {
  std::string theorem;
  bool premise = false;
  bool conclusion = false;
  std::vector<Margin> margins;
  std::vector<std::string> notes;

  bool violated() const noexcept { return premise && !conclusion; }
  void add(std::string name, double value) { margins.push_back({std::move(name), value}); }
  std::optional<double> margin(std::string_view name) const {
    for (const auto& m : margins) {
      if (m.name == name) return m.value;
    }
    return std::nullopt;
  }
};

}  // namespace cgf
