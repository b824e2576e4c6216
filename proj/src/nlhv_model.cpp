#include "leggett/nlhv_model.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "leggett/errors.hpp"

namespace leggett {
namespace {

std::string describe(const char *name, const PoincareVector &p) {
  std::ostringstream os;
  os << std::setprecision(6) << name << "=(" << p.x() << ", " << p.y() << ", " << p.z() << ")";
  return os.str();
}

std::string describe_quadruple(const PoincareVector &a, const PoincareVector &b,
                               const PoincareVector &u, const PoincareVector &v) {
  return describe("u", u) + " " + describe("v", v) + " " + describe("a", a) + " " + describe("b", b);
}

// Outcome rules with lambda_A and the interval already evaluated.
struct Subensemble {
  double lambda_a;
  BobInterval interval;

  int alice(double lambda) const { return lambda <= lambda_a ? 1 : -1; }
  int bob(double lambda) const { return interval.contains(lambda) ? 1 : -1; }
};

Subensemble prepare(const PoincareVector &a, const PoincareVector &b, const PoincareVector &u,
                    const PoincareVector &v, IntervalPolicy policy) {
  return {alice_threshold(a, u), policy_interval(a, b, u, v, policy)};
}

} // namespace

HiddenVariable::HiddenVariable(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("hidden variable lambda must lie in [0, 1]");
  }
}

double alice_threshold(const PoincareVector &a, const PoincareVector &u) {
  return 0.5 * (1.0 + dot(u, a));
}

Outcome alice_outcome(const PoincareVector &a, const PoincareVector &u, HiddenVariable lambda) {
  return lambda.value() <= alice_threshold(a, u) ? Outcome::Plus : Outcome::Minus;
}

BobInterval raw_bob_interval(const PoincareVector &a, const PoincareVector &b,
                             const PoincareVector &u, const PoincareVector &v) {
  const double ua = dot(u, a);
  const double vb = dot(v, b);
  const double ab = dot(a, b);
  return {0.25 * (1.0 + ua - vb + ab), 0.25 * (3.0 + ua + vb + ab)};
}

BobInterval bob_interval(const PoincareVector &a, const PoincareVector &b,
                         const PoincareVector &u, const PoincareVector &v) {
  const BobInterval in = raw_bob_interval(a, b, u, v);
  if (in.x1 < -kValidityTolerance || in.x2 > 1.0 + kValidityTolerance ||
      in.x1 > in.x2 + kValidityTolerance) {
    std::ostringstream os;
    os << std::setprecision(9) << "Bob interval [" << in.x1 << ", " << in.x2
       << "] leaves [0, 1]; model does not recover quantum correlations for "
       << describe_quadruple(a, b, u, v);
    throw ModelInvalid(os.str());
  }
  return in;
}

BobInterval shifted_bob_interval(const PoincareVector &a, const PoincareVector &b,
                                 const PoincareVector &u, const PoincareVector &v) {
  const BobInterval raw = raw_bob_interval(a, b, u, v);
  const double width = std::clamp(0.5 * (1.0 + dot(v, b)), 0.0, 1.0);
  const double x1 = std::clamp(raw.x1, 0.0, 1.0 - width);
  return {x1, x1 + width};
}

BobInterval policy_interval(const PoincareVector &a, const PoincareVector &b,
                            const PoincareVector &u, const PoincareVector &v, IntervalPolicy policy) {
  if (policy == IntervalPolicy::MalusPreserving) return shifted_bob_interval(a, b, u, v);
  if (!model_valid(a, b, u, v)) {
    throw ModelInvalid("validity condition |a.b +- u.a| <= 1 -+ v.b fails for " +
                       describe_quadruple(a, b, u, v));
  }
  return raw_bob_interval(a, b, u, v);
}

Outcome bob_outcome(const PoincareVector &a, const PoincareVector &b, const PoincareVector &u,
                    const PoincareVector &v, HiddenVariable lambda) {
  return bob_interval(a, b, u, v).contains(lambda.value()) ? Outcome::Plus : Outcome::Minus;
}

bool model_valid(const PoincareVector &a, const PoincareVector &b, const PoincareVector &u,
                 const PoincareVector &v) {
  const double ua = dot(u, a);
  const double vb = dot(v, b);
  const double ab = dot(a, b);
  return std::abs(ab + ua) <= 1.0 - vb + kValidityTolerance &&
         std::abs(ab - ua) <= 1.0 + vb + kValidityTolerance;
}

SubensembleAverages subensemble_averages(const PoincareVector &a, const PoincareVector &b,
                                         const PoincareVector &u, const PoincareVector &v) {
  if (!model_valid(a, b, u, v)) {
    throw ModelInvalid("subensemble averages requested outside the valid region for " +
                       describe_quadruple(a, b, u, v));
  }
  return {dot(u, a), dot(v, b), -dot(a, b)};
}

SubensembleAverages integrate_subensemble(const PoincareVector &a, const PoincareVector &b,
                                          const PoincareVector &u, const PoincareVector &v,
                                          IntervalPolicy policy) {
  const Subensemble s = prepare(a, b, u, v, policy);
  std::array<double, 5> cuts{0.0, 1.0, s.lambda_a, s.interval.x1, s.interval.x2};
  for (double &c : cuts) c = std::clamp(c, 0.0, 1.0);
  std::sort(cuts.begin(), cuts.end());

  SubensembleAverages out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const int alice = s.alice(mid);
    const int bob = s.bob(mid);
    out.mean_a += len * alice;
    out.mean_b += len * bob;
    out.mean_ab += len * alice * bob;
  }
  return out;
}

SubensembleEstimate sample_subensemble(const PoincareVector &a, const PoincareVector &b,
                                       const PoincareVector &u, const PoincareVector &v,
                                       std::uint64_t n, Rng &rng, IntervalPolicy policy) {
  if (n == 0) throw std::invalid_argument("sample count must be >= 1");
  const Subensemble s = prepare(a, b, u, v, policy);
  std::int64_t sum_a = 0, sum_b = 0, sum_ab = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double lambda = uniform01(rng);
    const int alice = s.alice(lambda);
    const int bob = s.bob(lambda);
    sum_a += alice;
    sum_b += bob;
    sum_ab += alice * bob;
  }
  return {estimate_from_sum(sum_a, n), estimate_from_sum(sum_b, n), estimate_from_sum(sum_ab, n)};
}

SourceModel::SourceModel(Kind kind, std::vector<WeightedPair> pairs)
    : kind_(kind), pairs_(std::move(pairs)) {
  double total = 0.0;
  for (const auto &p : pairs_) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) {
      throw std::invalid_argument("source weights must be finite and nonnegative");
    }
    total += p.weight;
  }
  if (kind_ != Kind::SingletTwoPoint && !(total > 0.0)) {
    throw std::invalid_argument("source weights must have a positive sum");
  }
  double running = 0.0;
  for (auto &p : pairs_) {
    p.weight /= total;
    running += p.weight;
    cumulative_.push_back(running);
  }
  if (!cumulative_.empty()) cumulative_.back() = 1.0;
}

SourceModel SourceModel::singlet_two_point() { return SourceModel(Kind::SingletTwoPoint, {}); }

SourceModel SourceModel::fixed_pair(const PoincareVector &u, const PoincareVector &v) {
  return SourceModel(Kind::FixedPair, {{{u, v}, 1.0}});
}

SourceModel SourceModel::weighted_list(std::vector<WeightedPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("weighted source needs at least one pair");
  return SourceModel(Kind::WeightedList, std::move(pairs));
}

SourceModel SourceModel::singlet_about(const PoincareVector &axis) {
  return weighted_list({{{axis, -axis}, 0.5}, {{-axis, axis}, 0.5}});
}

SubensemblePolarization SourceModel::sample(Rng &rng) const {
  switch (kind_) {
  case Kind::SingletTwoPoint: {
    const PoincareVector u = uniform_sphere_sample(rng);
    if (uniform01(rng) < 0.5) return {u, -u};
    return {-u, u};
  }
  case Kind::FixedPair:
    return pairs_.front().pair;
  case Kind::WeightedList: {
    const double r = uniform01(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    const auto idx = std::min<std::size_t>(it - cumulative_.begin(), pairs_.size() - 1);
    return pairs_[idx].pair;
  }
  }
  throw std::logic_error("unhandled source kind");
}

std::string to_string(SourceModel::Kind kind) {
  switch (kind) {
  case SourceModel::Kind::SingletTwoPoint: return "singlet_two_point";
  case SourceModel::Kind::FixedPair: return "fixed_pair";
  case SourceModel::Kind::WeightedList: return "weighted_list";
  }
  return "unknown";
}

CorrelationEstimate source_correlation(const SourceModel &source, const PoincareVector &a,
                                       const PoincareVector &b, std::uint64_t n, Rng &rng,
                                       IntervalPolicy policy) {
  if (n == 0) throw std::invalid_argument("sample count must be >= 1");

  // Discrete sources are validated and prepared once per pair.
  std::vector<Subensemble> prepared;
  std::vector<std::uint8_t> valid;
  for (const auto &wp : source.pairs()) {
    const bool ok = model_valid(a, b, wp.pair.u, wp.pair.v);
    valid.push_back(ok);
    prepared.push_back({alice_threshold(a, wp.pair.u),
                        ok ? raw_bob_interval(a, b, wp.pair.u, wp.pair.v)
                           : shifted_bob_interval(a, b, wp.pair.u, wp.pair.v)});
  }
  std::vector<double> cumulative;
  double running = 0.0;
  for (const auto &wp : source.pairs()) cumulative.push_back(running += wp.weight);
  if (!cumulative.empty()) cumulative.back() = 1.0;

  std::int64_t sum = 0;
  std::uint64_t invalid = 0;
  std::string first_offender;
  if (source.kind() == SourceModel::Kind::SingletTwoPoint) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const SubensemblePolarization p = source.sample(rng);
      const bool ok = model_valid(a, b, p.u, p.v);
      if (!ok) {
        if (first_offender.empty()) first_offender = describe_quadruple(a, b, p.u, p.v);
        ++invalid;
        if (policy == IntervalPolicy::Strict) continue;
      }
      const Subensemble s{alice_threshold(a, p.u),
                          ok ? raw_bob_interval(a, b, p.u, p.v) : shifted_bob_interval(a, b, p.u, p.v)};
      const double lambda = uniform01(rng);
      sum += s.alice(lambda) * s.bob(lambda);
    }
  } else if (prepared.size() == 1) {
    // Hot path for a single subensemble: no pair selection per draw.
    if (!valid[0]) {
      const auto &p = source.pairs()[0].pair;
      first_offender = describe_quadruple(a, b, p.u, p.v);
      invalid = n;
    }
    if (valid[0] || policy != IntervalPolicy::Strict) {
      // Count agreements without data-dependent branches; the outcomes are
      // coin flips, so branching on them mispredicts half the time.
      const Subensemble s = prepared[0];
      const double la = s.lambda_a, x1 = s.interval.x1, x2 = s.interval.x2;
      std::uint64_t agree = 0;
      for (std::uint64_t i = 0; i < n; ++i) {
        const double lambda = uniform01(rng);
        const bool alice_plus = lambda <= la;
        const bool bob_plus = (x1 <= lambda) & (lambda <= x2);
        agree += static_cast<std::uint64_t>(alice_plus == bob_plus);
      }
      sum = 2 * static_cast<std::int64_t>(agree) - static_cast<std::int64_t>(n);
    }
  } else {
    for (std::uint64_t i = 0; i < n; ++i) {
      const double r = uniform01(rng);
      const std::size_t idx =
          std::min<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin(),
                                cumulative.size() - 1);
      if (!valid[idx]) {
        if (first_offender.empty()) {
          const auto &p = source.pairs()[idx].pair;
          first_offender = describe_quadruple(a, b, p.u, p.v);
        }
        ++invalid;
        if (policy == IntervalPolicy::Strict) continue;
      }
      const Subensemble &s = prepared[idx];
      const double lambda = uniform01(rng);
      sum += s.alice(lambda) * s.bob(lambda);
    }
  }

  if (invalid > 0 && policy == IntervalPolicy::Strict) {
    const double fraction = static_cast<double>(invalid) / static_cast<double>(n);
    std::ostringstream os;
    os << "model invalid for " << invalid << " of " << n << " draws (fraction "
       << std::setprecision(6) << fraction << "); first offender " << first_offender;
    throw ModelInvalid(os.str(), fraction);
  }
  return estimate_from_sum(sum, n);
}

CorrelationEstimate local_average(const SourceModel &source, Side side, const PoincareVector &a,
                                  const PoincareVector &b, std::uint64_t n, Rng &rng,
                                  IntervalPolicy policy) {
  if (n == 0) throw std::invalid_argument("sample count must be >= 1");
  std::int64_t sum = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const SubensemblePolarization p = source.sample(rng);
    const double lambda = uniform01(rng);
    if (side == Side::Alice) {
      sum += lambda <= alice_threshold(a, p.u) ? 1 : -1;
    } else {
      sum += policy_interval(a, b, p.u, p.v, policy).contains(lambda) ? 1 : -1;
    }
  }
  return estimate_from_sum(sum, n);
}

Quadruple random_valid_quadruple(Rng &rng) {
  for (;;) {
    Quadruple q{uniform_sphere_sample(rng), uniform_sphere_sample(rng), uniform_sphere_sample(rng),
                uniform_sphere_sample(rng)};
    if (model_valid(q.a, q.b, q.u, q.v)) return q;
  }
}

} // namespace leggett
