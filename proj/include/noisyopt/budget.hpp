#pragma once

#include <cstdint>

#include "errors.hpp"

namespace noisyopt {

/// Number of noisy samples drawn per genotype per comparison.
class ResamplingRate {
public:
  explicit ResamplingRate(std::uint32_t r) : r_(r) {
    detail::require(r >= 1, "ResamplingRate: r must be at least 1");
  }

  std::uint32_t value() const noexcept { return r_; }

  /// Evaluations spent by one comparison (challenger and parent).
  std::uint64_t cost_per_comparison() const noexcept { return 2 * std::uint64_t{r_}; }

  friend bool operator==(const ResamplingRate&, const ResamplingRate&) = default;

private:
  std::uint32_t r_;
};

/// Counts raw fitness evaluations against a fixed total.
class BudgetMeter {
public:
  explicit BudgetMeter(std::uint64_t total) : total_(total) {
    detail::require(total >= 1, "BudgetMeter: total must be at least 1");
  }

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t used() const noexcept { return used_; }
  std::uint64_t remaining() const noexcept { return total_ - used_; }

  bool can_afford(std::uint64_t evaluations) const noexcept { return evaluations <= remaining(); }

  /// Records a single evaluation. Throws ContractViolation when exhausted.
  void charge_one() {
    detail::require(used_ < total_, "BudgetMeter: evaluation budget exhausted");
    ++used_;
  }

private:
  std::uint64_t total_;
  std::uint64_t used_ = 0;
};

}  // namespace noisyopt
