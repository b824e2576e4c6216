#pragma once

#include <cmath>
#include <cstdint>

namespace leggett {

/// Estimated expectation value of a +-1 quantity (a correlation or a local
/// average) with its standard error and the number of events behind it.
struct CorrelationEstimate {
  double value{0.0};
  double std_error{0.0};
  std::uint64_t total_counts{0};
};

/// Mean of n samples of a +-1 variable whose outcomes sum to `sum`.
inline CorrelationEstimate estimate_from_sum(std::int64_t sum, std::uint64_t n) {
  const double m = static_cast<double>(sum) / static_cast<double>(n);
  const double var = 1.0 - m * m;
  return {m, std::sqrt((var > 0.0 ? var : 0.0) / static_cast<double>(n)), n};
}

} // namespace leggett
