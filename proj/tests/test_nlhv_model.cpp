#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "leggett/errors.hpp"
#include "leggett/nlhv_model.hpp"

using namespace leggett;

namespace {

const double kCos20 = std::cos(20.0 * std::numbers::pi / 180.0);

PoincareVector in_xz(double deg) {
  const double t = deg * std::numbers::pi / 180.0;
  return {std::sin(t), 0.0, std::cos(t)};
}

// <AB> from interval overlap: A = +1 on [0, la], B = +1 on [x1, x2], so
// P(A != B) is the measure of the symmetric difference.
double overlap_oracle(double la, double x1, double x2) {
  const double overlap = std::max(0.0, std::min(la, x2) - std::max(0.0, x1));
  return 1.0 - 2.0 * (la + (x2 - x1) - 2.0 * overlap);
}

PoincareVector random_unit(Rng &rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng)};
}

} // namespace

TEST(HiddenVariable, RangeChecked) {
  EXPECT_NO_THROW(HiddenVariable{0.0});
  EXPECT_NO_THROW(HiddenVariable{1.0});
  EXPECT_THROW(HiddenVariable{1.5}, std::invalid_argument);
  EXPECT_THROW(HiddenVariable{-0.1}, std::invalid_argument);
}

TEST(AliceOutcome, Examples) {
  const auto a = PoincareVector::unit_z();
  EXPECT_EQ(alice_outcome(a, a, HiddenVariable{0.999}), Outcome::Plus);
  EXPECT_EQ(alice_outcome(a, PoincareVector::unit_x(), HiddenVariable{0.6}), Outcome::Minus);
  const PoincareVector u = in_xz(60.0);
  const double la = alice_threshold(a, u);
  EXPECT_NEAR(la, 0.75, 1e-15);
  EXPECT_EQ(alice_outcome(a, u, HiddenVariable{la}), Outcome::Plus);
}

TEST(BobInterval, PerfectCorrelationBranches) {
  Rng rng{1};
  for (int i = 0; i < 100; ++i) {
    const PoincareVector a = uniform_sphere_sample(rng), u = uniform_sphere_sample(rng);
    const double la = 0.5 * (1.0 + dot(u, a));
    const BobInterval same = bob_interval(a, a, u, -u);
    EXPECT_NEAR(same.x1, la, 1e-15);
    EXPECT_NEAR(same.x2, 1.0, 1e-15);
    const BobInterval flipped = bob_interval(a, -a, u, -u);
    EXPECT_NEAR(flipped.x1, 0.0, 1e-15);
    EXPECT_NEAR(flipped.x2, la, 1e-15);
  }
}

TEST(BobInterval, TwentyDegreeExample) {
  const PoincareVector a = PoincareVector::unit_z(), b = in_xz(160.0), y = PoincareVector::unit_y();
  const BobInterval in = bob_interval(a, b, y, y);
  EXPECT_NEAR(in.x1, (1.0 - kCos20) / 4.0, 1e-15);
  EXPECT_NEAR(in.x2, (3.0 - kCos20) / 4.0, 1e-15);
  EXPECT_NEAR(in.x1, 0.0150768, 5e-8);
  EXPECT_NEAR(in.x2, 0.5150768, 5e-8);
  EXPECT_EQ(bob_outcome(a, b, y, y, HiddenVariable{0.3}), Outcome::Plus);
  EXPECT_EQ(bob_outcome(a, b, y, y, HiddenVariable{0.6}), Outcome::Minus);
}

TEST(BobInterval, ThrowsOutsideValidRegion) {
  const auto z = PoincareVector::unit_z();
  // u = a, v = b = a: x2 = (3 + 1 + 1 + 1)/4 > 1.
  EXPECT_FALSE(model_valid(z, z, z, z));
  EXPECT_THROW(bob_interval(z, z, z, z), ModelInvalid);
  EXPECT_THROW(subensemble_averages(z, z, z, z), ModelInvalid);
}

TEST(BobOutcome, PerfectCorrelationBranches) {
  Rng rng{2};
  for (int i = 0; i < 200; ++i) {
    const PoincareVector a = uniform_sphere_sample(rng), u = uniform_sphere_sample(rng);
    const double la = alice_threshold(a, u);
    const HiddenVariable below{la * 0.5};
    EXPECT_EQ(alice_outcome(a, u, below), Outcome::Plus);
    EXPECT_EQ(bob_outcome(a, a, u, -u, below), Outcome::Minus);
    EXPECT_EQ(bob_outcome(a, -a, u, -u, below), Outcome::Plus);
  }
}

TEST(ModelValid, Examples) {
  Rng rng{3};
  const PoincareVector a = PoincareVector::unit_z(), y = PoincareVector::unit_y();
  for (int k = 0; k <= 180; ++k) EXPECT_TRUE(model_valid(a, in_xz(k), y, y));
  for (int i = 0; i < 100; ++i) {
    const PoincareVector s = uniform_sphere_sample(rng), u = uniform_sphere_sample(rng);
    EXPECT_TRUE(model_valid(s, -s, u, -u));
  }
  // Both branches hold with equality.
  const PoincareVector b = in_xz(std::acos(0.9) * 180.0 / std::numbers::pi);
  EXPECT_TRUE(model_valid(a, b, a, -a));
}

TEST(SubensembleAverages, MalusAndCorrelation) {
  const PoincareVector a = PoincareVector::unit_z(), y = PoincareVector::unit_y();
  const PoincareVector b = in_xz(std::acos(0.3) * 180.0 / std::numbers::pi);
  const SubensembleAverages avg = subensemble_averages(a, b, y, y);
  EXPECT_NEAR(avg.mean_ab, -0.3, 1e-15);
  // Midpoint grid of 10^6 lambda values.
  constexpr int n = 1000000;
  long long sum = 0;
  for (int i = 0; i < n; ++i) {
    const HiddenVariable l{(i + 0.5) / n};
    sum += value(alice_outcome(a, y, l)) * value(bob_outcome(a, b, y, y, l));
  }
  EXPECT_NEAR(static_cast<double>(sum) / n, -0.3, 2e-6);
}

TEST(SubensembleAverages, ClosedFormForValidQuadruples) {
  Rng rng{4};
  for (int i = 0; i < 1000; ++i) {
    const Quadruple q = random_valid_quadruple(rng);
    const SubensembleAverages avg = subensemble_averages(q.a, q.b, q.u, q.v);
    EXPECT_NEAR(avg.mean_a, dot(q.u, q.a), 1e-15);
    EXPECT_NEAR(avg.mean_b, dot(q.v, q.b), 1e-15);
    EXPECT_NEAR(avg.mean_ab, -dot(q.a, q.b), 1e-15);
  }
}

TEST(ModelProperties, IntervalWidth) {
  Rng rng{5};
  for (int i = 0; i < 100000; ++i) {
    const PoincareVector a = random_unit(rng), b = random_unit(rng), u = random_unit(rng), v = random_unit(rng);
    ASSERT_NEAR(raw_bob_interval(a, b, u, v).width(), 0.5 * (1.0 + dot(v, b)), 1e-12);
  }
}

TEST(ModelProperties, ValidityEquivalence) {
  Rng rng{6};
  int valid = 0;
  for (int i = 0; i < 100000; ++i) {
    const PoincareVector a = random_unit(rng), b = random_unit(rng), u = random_unit(rng), v = random_unit(rng);
    const double ua = dot(u, a), vb = dot(v, b), ab = dot(a, b);
    const double x1 = (1.0 + ua - vb + ab) / 4.0, x2 = (3.0 + ua + vb + ab) / 4.0, la = (1.0 + ua) / 2.0;
    const bool ordered = 0.0 <= x1 && x2 <= 1.0 && x1 <= la && la <= x2;
    ASSERT_EQ(model_valid(a, b, u, v), ordered);
    valid += ordered;
  }
  // Both outcomes must actually occur for the check to mean anything.
  EXPECT_GT(valid, 1000);
  EXPECT_LT(valid, 99000);
}

TEST(ModelProperties, QuantumAgreementExact) {
  Rng rng{7};
  for (int i = 0; i < 10000; ++i) {
    const Quadruple q = random_valid_quadruple(rng);
    const double ua = dot(q.u, q.a), vb = dot(q.v, q.b), ab = dot(q.a, q.b);
    const double oracle = overlap_oracle((1.0 + ua) / 2.0, (1.0 + ua - vb + ab) / 4.0, (3.0 + ua + vb + ab) / 4.0);
    ASSERT_NEAR(oracle, -ab, 1e-12);
    const SubensembleAverages integrated = integrate_subensemble(q.a, q.b, q.u, q.v, IntervalPolicy::Strict);
    ASSERT_NEAR(integrated.mean_ab, -ab, 1e-9);
    ASSERT_NEAR(integrated.mean_a, ua, 1e-9);
    ASSERT_NEAR(integrated.mean_b, vb, 1e-9);
  }
}

TEST(ModelProperties, MalusRecovery) {
  Rng rng{8};
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const Quadruple q = random_valid_quadruple(rng);
    const SubensembleEstimate e = sample_subensemble(q.a, q.b, q.u, q.v, 100000, rng);
    failures += std::abs(e.mean_a.value - dot(q.u, q.a)) > 4.0 * e.mean_a.std_error + 1e-12;
    failures += std::abs(e.mean_b.value - dot(q.v, q.b)) > 4.0 * e.mean_b.std_error + 1e-12;
  }
  // 2 * 10^4 tests at 4 sigma: expected 1.3 exceedances.
  EXPECT_LE(failures, 6);
}

TEST(ExtendedPolicy, ShiftedIntervalKeepsMalusWidth) {
  Rng rng{9};
  for (int i = 0; i < 10000; ++i) {
    const PoincareVector a = random_unit(rng), b = random_unit(rng), u = random_unit(rng), v = random_unit(rng);
    const BobInterval s = shifted_bob_interval(a, b, u, v);
    ASSERT_GE(s.x1, -1e-15);
    ASSERT_LE(s.x2, 1.0 + 1e-15);
    ASSERT_NEAR(s.width(), 0.5 * (1.0 + dot(v, b)), 1e-12);
    const SubensembleAverages avg = integrate_subensemble(a, b, u, v, IntervalPolicy::MalusPreserving);
    ASSERT_NEAR(avg.mean_a, dot(u, a), 1e-9);
    ASSERT_NEAR(avg.mean_b, dot(v, b), 1e-9);
    if (model_valid(a, b, u, v)) ASSERT_NEAR(avg.mean_ab, -dot(a, b), 1e-9);
  }
}

TEST(SourceCorrelation, SingletInPlaneOrthogonalToPolarizations) {
  Rng rng = make_stream(10, 0);
  const SourceModel source = SourceModel::singlet_about(PoincareVector::unit_y());
  const auto e = source_correlation(source, PoincareVector::unit_z(), in_xz(20.0), 1000000, rng);
  EXPECT_NEAR(e.value, -0.9397, 3.0 * e.std_error + 5e-5);
  EXPECT_NEAR(e.value, -kCos20, 3.0 * e.std_error);
}

TEST(SourceCorrelation, PerfectCorrelationsAreExact) {
  Rng rng{11};
  for (int i = 0; i < 20; ++i) {
    const PoincareVector u = uniform_sphere_sample(rng), a = uniform_sphere_sample(rng);
    const SourceModel pair = SourceModel::fixed_pair(u, -u);
    EXPECT_EQ(source_correlation(pair, a, a, 1000, rng).value, -1.0);
    EXPECT_EQ(source_correlation(pair, a, -a, 1000, rng).value, 1.0);
    EXPECT_EQ(source_correlation(SourceModel::singlet_two_point(), a, a, 1000, rng).value, -1.0);
  }
}

TEST(SourceCorrelation, StrictPolicyReportsInvalidFraction) {
  Rng rng{12};
  const auto z = PoincareVector::unit_z(), y = PoincareVector::unit_y();
  const SourceModel mixed = SourceModel::weighted_list({{{z, z}, 1.0}, {{y, y}, 1.0}});
  try {
    source_correlation(mixed, z, z, 100000, rng);
    FAIL() << "expected ModelInvalid";
  } catch (const ModelInvalid &e) {
    EXPECT_NEAR(e.invalid_fraction(), 0.5, 0.01);
    EXPECT_NE(std::string(e.what()).find("u="), std::string::npos);
  }
  EXPECT_NO_THROW(source_correlation(mixed, z, z, 1000, rng, IntervalPolicy::MalusPreserving));
}

TEST(LocalAverage, MalusOnBothSides) {
  Rng rng = make_stream(13, 0);
  const Quadruple q = random_valid_quadruple(rng);
  const PoincareVector &a = q.a, &b = q.b, &u = q.u, &v = q.v, y = random_perpendicular(a, rng);
  const SourceModel fixed = SourceModel::fixed_pair(u, v);
  const auto alice = local_average(fixed, Side::Alice, a, b, 1000000, rng);
  EXPECT_NEAR(alice.value, dot(u, a), 3.0 * alice.std_error);
  const auto bob = local_average(fixed, Side::Bob, a, b, 1000000, rng);
  EXPECT_NEAR(bob.value, dot(v, b), 3.0 * bob.std_error);
  const auto singlet = local_average(SourceModel::singlet_two_point(), Side::Alice, a, y, 1000000, rng);
  EXPECT_NEAR(singlet.value, 0.0, 3.0 * singlet.std_error);
}

TEST(LocalAverage, AliceIgnoresBobSetting) {
  Rng rng = make_stream(14, 0);
  const Quadruple q = random_valid_quadruple(rng);
  const SourceModel fixed = SourceModel::fixed_pair(q.u, q.v);
  std::vector<CorrelationEstimate> est;
  for (int k = 0; k < 10; ++k) {
    est.push_back(local_average(fixed, Side::Alice, q.a, uniform_sphere_sample(rng), 200000, rng,
                                IntervalPolicy::MalusPreserving));
  }
  for (std::size_t i = 0; i < est.size(); ++i)
    for (std::size_t j = i + 1; j < est.size(); ++j)
      EXPECT_LE(std::abs(est[i].value - est[j].value), 4.0 * std::hypot(est[i].std_error, est[j].std_error));
}

TEST(ModelChsh, ReachesTsirelsonInPlaneOrthogonalToPolarization) {
  Rng rng = make_stream(15, 0);
  const SourceModel source = SourceModel::singlet_about(PoincareVector::unit_y());
  const PoincareVector a1 = in_xz(0.0), a2 = in_xz(-90.0), b1 = in_xz(45.0), b2 = in_xz(-45.0);
  constexpr std::uint64_t n = 1000000;
  const auto e11 = source_correlation(source, a1, b1, n, rng), e12 = source_correlation(source, a1, b2, n, rng);
  const auto e21 = source_correlation(source, a2, b1, n, rng), e22 = source_correlation(source, a2, b2, n, rng);
  const double s = std::abs(e11.value + e12.value - e21.value + e22.value);
  const double err = std::sqrt(e11.std_error * e11.std_error + e12.std_error * e12.std_error +
                               e21.std_error * e21.std_error + e22.std_error * e22.std_error);
  EXPECT_NEAR(s, 2.0 * std::numbers::sqrt2, 4.0 * err);
}

TEST(SourceModel, WeightsAreNormalizedAndValidated) {
  const auto z = PoincareVector::unit_z();
  const SourceModel s = SourceModel::weighted_list({{{z, -z}, 3.0}, {{-z, z}, 1.0}});
  ASSERT_EQ(s.pairs().size(), 2u);
  EXPECT_DOUBLE_EQ(s.pairs()[0].weight, 0.75);
  EXPECT_THROW(SourceModel::weighted_list({{{z, -z}, -1.0}}), std::invalid_argument);
  EXPECT_THROW(SourceModel::weighted_list({{{z, -z}, 0.0}}), std::invalid_argument);
  EXPECT_THROW(SourceModel::weighted_list({}), std::invalid_argument);
  EXPECT_EQ(to_string(SourceModel::Kind::FixedPair), "fixed_pair");
}

TEST(SourceModel, SingletTwoPointSamplesAntipodalIsotropicPairs) {
  Rng rng{16};
  const SourceModel s = SourceModel::singlet_two_point();
  double mean_z = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const SubensemblePolarization p = s.sample(rng);
    ASSERT_NEAR(dot(p.u, p.v), -1.0, 1e-12);
    mean_z += p.u.z();
  }
  EXPECT_LT(std::abs(mean_z / 100000), 4.0 * std::sqrt(1.0 / 3.0 / 100000));
}
