#pragma once

#include "leggett/geometry.hpp"

namespace leggett {

/// Two-photon visibility V in [0, 1]; scales singlet correlations to -V a.b.
class Visibility {
public:
  constexpr Visibility() = default;
  /// Throws std::invalid_argument outside [0, 1].
  explicit Visibility(double v);
  constexpr double value() const noexcept { return v_; }

private:
  double v_{1.0};
};

/// Singlet correlation -a.b.
double singlet_correlation(const PoincareVector &a, const PoincareVector &b);

/// -V a.b
double visibility_correlation(const PoincareVector &a, const PoincareVector &b, Visibility vis);

/// P(i, j) = (1 - i j V a.b)/4 for outcomes i, j in {-1, +1}: unbiased
/// marginals and correlation -V a.b. Throws std::invalid_argument for
/// outcomes other than +-1.
double joint_probability(int i, int j, const PoincareVector &a, const PoincareVector &b, Visibility vis);

} // namespace leggett
