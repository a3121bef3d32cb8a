#pragma once

#include <cstdint>
#include <optional>

#include "genotype.hpp"

namespace noisyopt {

/// Outcome of one optimisation run.
struct TrialResult {
  Genotype returned;
  bool success = false;
  std::uint64_t evals_used = 0;
  /// Evaluations spent before the optimum was first created. Only set when a
  /// first-hitting-time run stopped on a hit.
  std::optional<std::uint64_t> first_hit_evals;
  std::uint64_t iterations = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

}  // namespace noisyopt
