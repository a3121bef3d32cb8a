#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/distributions/normal.hpp>

#include "errors.hpp"

namespace noisyopt {

struct Interval {
  double low;
  double high;
};

/// Two-sided standard normal critical value for `confidence` in (0, 1).
inline double normal_critical_value(double confidence) {
  detail::require(confidence > 0.0 && confidence < 1.0, "confidence must be in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>{}, 0.5 + confidence / 2.0);
}

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
  detail::require(trials >= 1, "wilson_interval: trials must be at least 1");
  detail::require(successes <= trials, "wilson_interval: successes exceed trials");
  const double z = normal_critical_value(confidence);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // Endpoints are exact at the boundaries; rounding would otherwise leave
  // them a few ulps off 0 or 1.
  const double low = successes == 0 ? 0.0 : std::clamp(centre - half, 0.0, p);
  const double high = successes == trials ? 1.0 : std::clamp(centre + half, p, 1.0);
  return {low, high};
}

}  // namespace noisyopt
