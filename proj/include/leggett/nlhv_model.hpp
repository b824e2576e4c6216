#pragma once

// Explicit non-local hidden-variable model. A source emits pairs with
// definite polarizations (u to Alice, v to Bob) and a shared hidden variable
// lambda, uniform on [0, 1]. Alice answers +1 on [0, lambda_A] with
// lambda_A = (1 + u.a)/2. Bob answers +1 on [x1, x2], where the interval
// depends on Alice's setting and polarization:
//
//   x1 = (1 + u.a - v.b + a.b)/4,   x2 = (3 + u.a + v.b + a.b)/4.
//
// Both sides obey Malus' law on every subensemble, and the correlation equals
// the singlet value -a.b whenever |a.b +- u.a| <= 1 -+ v.b.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leggett/estimate.hpp"
#include "leggett/geometry.hpp"
#include "leggett/random.hpp"

namespace leggett {

enum class Outcome : int { Minus = -1, Plus = 1 };
constexpr int value(Outcome o) { return static_cast<int>(o); }

/// Hidden variable lambda in [0, 1].
class HiddenVariable {
public:
  /// Throws std::invalid_argument outside [0, 1].
  explicit HiddenVariable(double lambda);
  double value() const noexcept { return lambda_; }

private:
  double lambda_;
};

struct SubensemblePolarization {
  PoincareVector u; ///< sent to Alice
  PoincareVector v; ///< sent to Bob
};

/// Bob's +1 interval [x1, x2].
struct BobInterval {
  double x1{0.0};
  double x2{0.0};
  double width() const { return x2 - x1; }
  bool contains(double lambda) const { return x1 <= lambda && lambda <= x2; }
};

/// What to do with settings outside the validity region.
enum class IntervalPolicy {
  /// Throw ModelInvalid.
  Strict,
  /// Keep the interval width (1 + v.b)/2 and shift [x1, x2] into [0, 1].
  /// Malus' law still holds on both sides, so the model stays inside the
  /// class the Leggett-type inequality constrains, but the correlation no
  /// longer equals -a.b. Used by --allow-invalid and by the audit.
  MalusPreserving,
};

inline constexpr double kValidityTolerance = 1e-12;

double alice_threshold(const PoincareVector &a, const PoincareVector &u);

Outcome alice_outcome(const PoincareVector &a, const PoincareVector &u, HiddenVariable lambda);

/// Interval exactly as defined above. Throws ModelInvalid when x1 < 0,
/// x2 > 1 or x1 > x2 (each beyond kValidityTolerance).
BobInterval bob_interval(const PoincareVector &a, const PoincareVector &b,
                         const PoincareVector &u, const PoincareVector &v);

/// Same interval without range checks.
BobInterval raw_bob_interval(const PoincareVector &a, const PoincareVector &b,
                             const PoincareVector &u, const PoincareVector &v);

/// Width-preserving shift of raw_bob_interval into [0, 1].
BobInterval shifted_bob_interval(const PoincareVector &a, const PoincareVector &b,
                                 const PoincareVector &u, const PoincareVector &v);

/// Interval under the given policy (Strict also requires model_valid).
BobInterval policy_interval(const PoincareVector &a, const PoincareVector &b,
                            const PoincareVector &u, const PoincareVector &v, IntervalPolicy policy);

Outcome bob_outcome(const PoincareVector &a, const PoincareVector &b, const PoincareVector &u,
                    const PoincareVector &v, HiddenVariable lambda);

/// |a.b + u.a| <= 1 - v.b and |a.b - u.a| <= 1 + v.b.
bool model_valid(const PoincareVector &a, const PoincareVector &b, const PoincareVector &u,
                 const PoincareVector &v);

struct SubensembleAverages {
  double mean_a{0.0};
  double mean_b{0.0};
  double mean_ab{0.0};
};

/// Closed form (u.a, v.b, -a.b). Throws ModelInvalid outside the valid region.
SubensembleAverages subensemble_averages(const PoincareVector &a, const PoincareVector &b,
                                         const PoincareVector &u, const PoincareVector &v);

/// Averages obtained by integrating the outcome functions over lambda
/// piecewise between their breakpoints. Exact up to rounding, and defined
/// for either policy.
SubensembleAverages integrate_subensemble(const PoincareVector &a, const PoincareVector &b,
                                          const PoincareVector &u, const PoincareVector &v,
                                          IntervalPolicy policy);

struct SubensembleEstimate {
  CorrelationEstimate mean_a, mean_b, mean_ab;
};

/// Monte Carlo companion of subensemble_averages: n uniform lambda draws.
SubensembleEstimate sample_subensemble(const PoincareVector &a, const PoincareVector &b,
                                       const PoincareVector &u, const PoincareVector &v,
                                       std::uint64_t n, Rng &rng,
                                       IntervalPolicy policy = IntervalPolicy::Strict);

struct WeightedPair {
  SubensemblePolarization pair;
  double weight{1.0};
};

/// Distribution F(u, v) of subensemble polarizations.
class SourceModel {
public:
  enum class Kind { SingletTwoPoint, FixedPair, WeightedList };

  /// u uniform on the sphere, then (u, -u) or (-u, u) with probability 1/2.
  static SourceModel singlet_two_point();
  static SourceModel fixed_pair(const PoincareVector &u, const PoincareVector &v);
  /// Weights must be nonnegative with a positive sum; they are normalized.
  /// Throws std::invalid_argument otherwise.
  static SourceModel weighted_list(std::vector<WeightedPair> pairs);
  /// Two-point singlet mixture pinned to one axis: (n, -n) and (-n, n) with
  /// weight 1/2 each. Measurements in the plane orthogonal to n reproduce the
  /// singlet correlations exactly.
  static SourceModel singlet_about(const PoincareVector &axis);

  Kind kind() const noexcept { return kind_; }
  /// Normalized pairs (FixedPair: one pair of weight 1; SingletTwoPoint: empty).
  std::span<const WeightedPair> pairs() const noexcept { return pairs_; }

  SubensemblePolarization sample(Rng &rng) const;

private:
  SourceModel(Kind kind, std::vector<WeightedPair> pairs);

  Kind kind_;
  std::vector<WeightedPair> pairs_;
  std::vector<double> cumulative_;
};

std::string to_string(SourceModel::Kind kind);

/// Monte Carlo estimate of <AB> over the source and lambda. Under Strict, if
/// any sampled pair is outside the valid region, throws ModelInvalid naming
/// the first offending (u, v, a, b) and the fraction of invalid draws.
CorrelationEstimate source_correlation(const SourceModel &source, const PoincareVector &a,
                                       const PoincareVector &b, std::uint64_t n, Rng &rng,
                                       IntervalPolicy policy = IntervalPolicy::Strict);

enum class Side { Alice, Bob };

/// Local average <A> or <B>. Bob's outcome depends on Alice's setting, so both
/// settings are required; Alice's side never looks at b. Bob's side follows
/// `policy` for invalid pairs.
CorrelationEstimate local_average(const SourceModel &source, Side side, const PoincareVector &a,
                                  const PoincareVector &b, std::uint64_t n, Rng &rng,
                                  IntervalPolicy policy = IntervalPolicy::Strict);

/// Settings and polarizations of one subensemble measurement.
struct Quadruple {
  PoincareVector a, b, u, v;
};

/// Independent uniform a, b, u, v, redrawn until model_valid holds.
Quadruple random_valid_quadruple(Rng &rng);

} // namespace leggett
