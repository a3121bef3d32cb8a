#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "budget.hpp"
#include "errors.hpp"
#include "genotype.hpp"
#include "harness.hpp"
#include "problems.hpp"
#include "random.hpp"
#include "trial_result.hpp"

namespace noisyopt {

/// Random mutation hill climber: flips exactly one uniformly chosen bit.
struct Rmhc {
  friend bool operator==(const Rmhc&, const Rmhc&) = default;
};

/// (1+1)-EA: flips each bit independently. Without an explicit
/// `mutation_prob` the rate is 1/n for the problem it runs on.
struct OnePlusOneEa {
  std::optional<double> mutation_prob;

  double resolved_mutation_prob(std::size_t n) const {
    const double p = mutation_prob.value_or(1.0 / static_cast<double>(n));
    detail::require(p > 0.0 && p <= 1.0, "OnePlusOneEa: mutation probability must be in (0, 1]");
    return p;
  }

  friend bool operator==(const OnePlusOneEa&, const OnePlusOneEa&) = default;
};

using AlgorithmSpec = std::variant<Rmhc, OnePlusOneEa>;

/// "rmhc" or "opo-ea".
inline std::string_view algorithm_kind(const AlgorithmSpec& alg) {
  return std::holds_alternative<Rmhc>(alg) ? "rmhc" : "opo-ea";
}

/// Copy of `x` with one uniformly chosen bit flipped. One bounded draw.
inline Genotype mutate_rmhc(const Genotype& x, RandomStream& rng) {
  Genotype child = x;
  child.flip(static_cast<std::size_t>(rng.below(x.size())));
  return child;
}

/// Copy of `x` with each bit flipped when a uniform [0,1) draw is <= p.
/// One draw per bit; zero flips is a legal outcome.
inline Genotype mutate_ea(const Genotype& x, double p, RandomStream& rng) {
  detail::require(p > 0.0 && p <= 1.0, "mutate_ea: p must be in (0, 1]");
  Genotype child = x;
  for (std::size_t d = 0; d < child.size(); ++d) {
    if (rng.uniform01() <= p) child.flip(d);
  }
  return child;
}

inline Genotype mutate(const AlgorithmSpec& alg, const Genotype& x, RandomStream& rng) {
  if (const auto* ea = std::get_if<OnePlusOneEa>(&alg)) {
    return mutate_ea(x, ea->resolved_mutation_prob(x.size()), rng);
  }
  return mutate_rmhc(x, rng);
}

/// Resampled acceptance test: draws r fresh samples of the challenger, then r
/// fresh samples of the incumbent, charging one evaluation per sample. Returns
/// true iff the challenger's sample mean is >= the incumbent's, so ties go to
/// the challenger. Throws ContractViolation if fewer than 2r evaluations remain.
template <NoisyProblem P>
bool compare_resampled(const P& problem, const Genotype& challenger, const Genotype& incumbent,
                       ResamplingRate r, BudgetMeter& meter, RandomStream& rng) {
  detail::require(meter.can_afford(r.cost_per_comparison()),
                  "compare_resampled: insufficient evaluation budget");
  double challenger_sum = 0.0;
  for (std::uint32_t i = 0; i < r.value(); ++i) {
    challenger_sum += problem.noisy_eval(challenger, rng).value;
    meter.charge_one();
  }
  double incumbent_sum = 0.0;
  for (std::uint32_t i = 0; i < r.value(); ++i) {
    incumbent_sum += problem.noisy_eval(incumbent, rng).value;
    meter.charge_one();
  }
  const double n = static_cast<double>(r.value());
  return challenger_sum / n >= incumbent_sum / n;
}

inline bool compare_resampled(const ProblemSpec& spec, const Genotype& challenger,
                              const Genotype& incumbent, ResamplingRate r, BudgetMeter& meter,
                              RandomStream& rng) {
  return std::visit(
      [&](const auto& p) { return compare_resampled(p, challenger, incumbent, r, meter, rng); },
      spec);
}

/// Runs one trial from a given starting genotype.
///
/// Each iteration: stop check on the incumbent (hit under first-hitting-time,
/// or fewer than 2r evaluations left), mutation, hit check on the challenger,
/// then `compare_resampled`. Hit checks are free; the starting genotype is
/// checked before anything is evaluated. Randomness is consumed in the order
/// mutation draws, challenger samples, incumbent samples.
template <NoisyProblem P>
TrialResult run_trial_from(const AlgorithmSpec& alg, const P& problem, StoppingRule rule,
                           ResamplingRate r, std::uint64_t budget, Genotype initial,
                           RandomStream& rng) {
  detail::require(initial.size() == problem.dimension(),
                  "run_trial: initial genotype does not match problem dimension");
  BudgetMeter meter(budget);
  Genotype incumbent = std::move(initial);
  std::uint64_t iterations = 0;

  const auto finish = [&](Genotype returned, bool hit) {
    TrialResult result{std::move(returned), false, meter.used(), std::nullopt, iterations};
    if (hit) result.first_hit_evals = meter.used();
    result.success = trial_success(rule, result, problem);
    return result;
  };

  for (;;) {
    switch (should_stop(rule, incumbent, problem, meter, r)) {
      case StopDecision::ReturnCandidateAsHit: return finish(std::move(incumbent), true);
      case StopDecision::ReturnIncumbent: return finish(std::move(incumbent), false);
      case StopDecision::Continue: break;
    }
    Genotype challenger = mutate(alg, incumbent, rng);
    if (should_stop(rule, challenger, problem, meter, r) == StopDecision::ReturnCandidateAsHit) {
      return finish(std::move(challenger), true);
    }
    if (compare_resampled(problem, challenger, incumbent, r, meter, rng)) {
      incumbent = std::move(challenger);
    }
    ++iterations;
  }
}

/// Runs one trial from a uniformly random genotype (one draw per bit, taken
/// from `rng` before anything else).
template <NoisyProblem P>
TrialResult run_trial(const AlgorithmSpec& alg, const P& problem, StoppingRule rule,
                      ResamplingRate r, std::uint64_t budget, RandomStream& rng) {
  Genotype initial = Genotype::random(problem.dimension(), rng);
  return run_trial_from(alg, problem, rule, r, budget, std::move(initial), rng);
}

inline TrialResult run_trial(const AlgorithmSpec& alg, const ProblemSpec& spec, StoppingRule rule,
                             ResamplingRate r, std::uint64_t budget, RandomStream& rng) {
  return std::visit([&](const auto& p) { return run_trial(alg, p, rule, r, budget, rng); }, spec);
}

inline TrialResult run_trial_from(const AlgorithmSpec& alg, const ProblemSpec& spec,
                                  StoppingRule rule, ResamplingRate r, std::uint64_t budget,
                                  Genotype initial, RandomStream& rng) {
  return std::visit(
      [&](const auto& p) {
        return run_trial_from(alg, p, rule, r, budget, std::move(initial), rng);
      },
      spec);
}

}  // namespace noisyopt
