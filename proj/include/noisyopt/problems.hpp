#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>

#include "errors.hpp"
#include "genotype.hpp"
#include "random.hpp"

namespace noisyopt {

/// One noisy observation of a genotype's fitness.
struct FitnessSample {
  double value;
};

/// Additive Gaussian noise N(mean, stddev^2).
struct NoiseModel {
  double mean = 0.0;
  double stddev = 1.0;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// A maximisation problem on bit strings whose fitness can only be observed
/// through noisy samples. `true_fitness` and `is_optimal` are the noise-free
/// oracles used for bookkeeping; an optimiser only ever sees `noisy_eval`.
template <class P>
concept NoisyProblem = requires(const P& p, const Genotype& x, RandomStream& rng) {
  { p.dimension() } -> std::convertible_to<std::size_t>;
  { p.true_fitness(x) } -> std::convertible_to<double>;
  { p.noisy_eval(x, rng) } -> std::same_as<FitnessSample>;
  { p.is_optimal(x) } -> std::convertible_to<bool>;
};

namespace detail {
inline void check_dimension(std::size_t expected, const Genotype& x) {
  require(x.size() == expected, "genotype length does not match problem dimension");
}
}  // namespace detail

/// OneMax with additive Gaussian noise: number of 1-bits plus N(mean, stddev^2).
class OneMaxGaussian {
public:
  explicit OneMaxGaussian(std::size_t n, NoiseModel noise = {}) : n_(n), noise_(noise) {
    detail::require(n >= 1, "OneMaxGaussian: n must be at least 1");
    detail::require(noise.stddev >= 0.0, "OneMaxGaussian: noise stddev must be non-negative");
  }

  std::size_t dimension() const noexcept { return n_; }
  const NoiseModel& noise() const noexcept { return noise_; }

  double true_fitness(const Genotype& x) const {
    detail::check_dimension(n_, x);
    return static_cast<double>(x.count_ones());
  }

  /// One normal deviate per call, even when stddev is zero.
  FitnessSample noisy_eval(const Genotype& x, RandomStream& rng) const {
    const double clean = true_fitness(x);
    return {clean + noise_.mean + noise_.stddev * rng.normal()};
  }

  bool is_optimal(const Genotype& x) const {
    detail::check_dimension(n_, x);
    return x.is_all_ones();
  }

  friend bool operator==(const OneMaxGaussian&, const OneMaxGaussian&) = default;

private:
  std::size_t n_;
  NoiseModel noise_;
};

/// Win/loss game model. The genotype read as an n-bit binary number (first
/// bit most significant) gives the win probability Value(x) / (2^n - 1);
/// each sample is a single game outcome in {0, 1}.
class PMax {
public:
  static constexpr std::size_t kMaxDimension = 62;

  explicit PMax(std::size_t n) : n_(n) {
    detail::require(n >= 1, "PMax: n must be at least 1");
    detail::require(n <= kMaxDimension, "PMax: n must not exceed 62");
  }

  std::size_t dimension() const noexcept { return n_; }

  std::uint64_t denominator() const noexcept { return (std::uint64_t{1} << n_) - 1; }

  double true_fitness(const Genotype& x) const {
    detail::check_dimension(n_, x);
    return static_cast<double>(x.value()) / static_cast<double>(denominator());
  }

  /// Win iff a uniform integer in [0, 2^n - 1) falls below Value(x), which
  /// realises the win probability exactly. One bounded draw per call.
  FitnessSample noisy_eval(const Genotype& x, RandomStream& rng) const {
    detail::check_dimension(n_, x);
    const bool win = rng.below(denominator()) < x.value();
    return {win ? 1.0 : 0.0};
  }

  bool is_optimal(const Genotype& x) const {
    detail::check_dimension(n_, x);
    return x.is_all_ones();
  }

  friend bool operator==(const PMax&, const PMax&) = default;

private:
  std::size_t n_;
};

static_assert(NoisyProblem<OneMaxGaussian>);
static_assert(NoisyProblem<PMax>);

using ProblemSpec = std::variant<OneMaxGaussian, PMax>;

inline std::size_t dimension(const ProblemSpec& spec) {
  return std::visit([](const auto& p) { return p.dimension(); }, spec);
}

inline double true_fitness(const ProblemSpec& spec, const Genotype& x) {
  return std::visit([&](const auto& p) { return p.true_fitness(x); }, spec);
}

inline FitnessSample noisy_eval(const ProblemSpec& spec, const Genotype& x, RandomStream& rng) {
  return std::visit([&](const auto& p) { return p.noisy_eval(x, rng); }, spec);
}

inline bool is_optimal(const ProblemSpec& spec, const Genotype& x) {
  return std::visit([&](const auto& p) { return p.is_optimal(x); }, spec);
}

/// "onemax" or "pmax".
inline std::string_view problem_kind(const ProblemSpec& spec) {
  return std::holds_alternative<OneMaxGaussian>(spec) ? "onemax" : "pmax";
}

}  // namespace noisyopt
