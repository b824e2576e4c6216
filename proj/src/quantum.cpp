#include "leggett/quantum.hpp"

#include <algorithm>
#include <stdexcept>

namespace leggett {

Visibility::Visibility(double v) : v_(v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("visibility must lie in [0, 1]");
}

double singlet_correlation(const PoincareVector &a, const PoincareVector &b) {
  return -std::clamp(dot(a, b), -1.0, 1.0);
}

double visibility_correlation(const PoincareVector &a, const PoincareVector &b, Visibility vis) {
  return vis.value() * singlet_correlation(a, b);
}

double joint_probability(int i, int j, const PoincareVector &a, const PoincareVector &b, Visibility vis) {
  if ((i != 1 && i != -1) || (j != 1 && j != -1)) {
    throw std::invalid_argument("outcomes must be +1 or -1");
  }
  return 0.25 * (1.0 + i * j * visibility_correlation(a, b, vis));
}

} // namespace leggett
