#pragma once

#include <cstdint>
#include <random>

namespace leggett {

/// Random stream used throughout. Every stochastic routine takes one
/// explicitly; nothing in the library owns global random state.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer applied to (base, index). Used to derive
/// independent sub-streams for sweep rows, trials and workers.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_stream(std::uint64_t base, std::uint64_t index) {
  return Rng{derive_seed(base, index)};
}

/// Uniform double in [0, 1) on the 2^-53 lattice: the top 53 bits of one
/// engine output. Much cheaper than generate_canonical in libstdc++, which
/// dominates the hidden-variable sampling loops otherwise.
inline double uniform01(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace leggett
