#pragma once

#include <optional>
#include <string_view>

#include "budget.hpp"
#include "genotype.hpp"
#include "problems.hpp"
#include "trial_result.hpp"

namespace noisyopt {

enum class StoppingRule {
  /// Stop as soon as the optimum is created (budget still caps the run).
  FirstHittingTime,
  /// Run until the budget is spent and judge the final incumbent only.
  FixedBudget,
};

enum class StopDecision {
  Continue,
  ReturnCandidateAsHit,
  ReturnIncumbent,
};

constexpr std::string_view to_string(StoppingRule rule) noexcept {
  return rule == StoppingRule::FirstHittingTime ? "fht" : "fixed-budget";
}

inline std::optional<StoppingRule> parse_stopping_rule(std::string_view text) noexcept {
  if (text == "fht") return StoppingRule::FirstHittingTime;
  if (text == "fixed-budget") return StoppingRule::FixedBudget;
  return std::nullopt;
}

/// Decides whether a run ends before spending another comparison.
///
/// Under first-hitting-time an optimal `candidate` ends the run as a hit; this
/// check has priority over the budget gate. Under either rule the run returns
/// its incumbent once fewer than 2r evaluations remain. The fixed-budget rule
/// never consults the optimum predicate. No randomness, no meter mutation.
template <NoisyProblem P>
StopDecision should_stop(StoppingRule rule, const Genotype& candidate, const P& problem,
                         const BudgetMeter& meter, ResamplingRate r) {
  if (rule == StoppingRule::FirstHittingTime && problem.is_optimal(candidate)) {
    return StopDecision::ReturnCandidateAsHit;
  }
  if (!meter.can_afford(r.cost_per_comparison())) return StopDecision::ReturnIncumbent;
  return StopDecision::Continue;
}

inline StopDecision should_stop(StoppingRule rule, const Genotype& candidate,
                                const ProblemSpec& spec, const BudgetMeter& meter,
                                ResamplingRate r) {
  return std::visit([&](const auto& p) { return should_stop(rule, candidate, p, meter, r); },
                    spec);
}

/// A trial succeeds iff the genotype it returned is the optimum. Under
/// first-hitting-time that covers both a hit and an optimal final incumbent.
template <NoisyProblem P>
bool trial_success(StoppingRule /*rule*/, const TrialResult& result, const P& problem) {
  return problem.is_optimal(result.returned);
}

inline bool trial_success(StoppingRule rule, const TrialResult& result, const ProblemSpec& spec) {
  return std::visit([&](const auto& p) { return trial_success(rule, result, p); }, spec);
}

}  // namespace noisyopt
