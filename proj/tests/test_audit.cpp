#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "leggett/audit.hpp"
#include "leggett/errors.hpp"
#include "leggett/inequalities.hpp"

using namespace leggett;

namespace {

constexpr double kPi = std::numbers::pi;

// Plain midpoint rule on a fine grid; slower but independent of the
// kink-aware Simpson rule in the library.
double midpoint_abs_cos(double offset) {
  constexpr int n = 2000000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::abs(std::cos(2.0 * kPi * (i + 0.5) / n + offset));
  return s / n;
}

MeasurementPlane xz_plane() { return MeasurementPlane::spanned_by(PoincareVector::unit_z(), PoincareVector::unit_x()); }

} // namespace

TEST(DichotomicIdentity, Exhaustive) {
  for (int a : {1, -1})
    for (int b : {1, -1}) EXPECT_TRUE(check_dichotomic_identity(a, b));
  EXPECT_THROW(check_dichotomic_identity(0, 1), std::invalid_argument);
}

TEST(ModulusBound, Examples) {
  EXPECT_TRUE(check_modulus_bound({1.0, 0.0, 0.0, 0.0}));
  EXPECT_TRUE(check_modulus_bound({0.25, 0.25, 0.25, 0.25}));
  EXPECT_TRUE(check_modulus_bound({0.0, 0.5, 0.5, 0.0}));
  EXPECT_THROW(check_modulus_bound({0.5, 0.5, 0.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(check_modulus_bound({1.5, -0.5, 0.0, 0.0}), std::invalid_argument);
}

TEST(XiAverage, IsTwoOverPi) {
  for (double offset : {0.0, 1.234, kPi / 2.0}) {
    EXPECT_NEAR(xi_average_abs_cos(offset), 2.0 / kPi, 1e-9) << offset;
    EXPECT_NEAR(xi_average_abs_cos(offset), 0.63662, 5e-6);
  }
  EXPECT_NEAR(midpoint_abs_cos(1.234), 2.0 / kPi, 1e-9);
  Rng rng{61};
  for (int i = 0; i < 100; ++i) {
    ASSERT_NEAR(xi_average_abs_cos(-10.0 + 20.0 * uniform01(rng)), 2.0 / kPi, 1e-9);
  }
}

TEST(SineDifferenceBounds, Examples) {
  EXPECT_TRUE(check_sine_difference_bounds(0.7, 0.7, -2.0));
  // Equality case: phi - phi' = pi with chi = phi'.
  EXPECT_TRUE(check_sine_difference_bounds(1.0 + kPi, 1.0, 1.0));
  const double lhs = std::abs(std::sin((1.0 + kPi - 1.0) / 2.0)) + std::abs(std::sin(0.0));
  EXPECT_NEAR(lhs, 1.0, 1e-15);
}

TEST(TriangleInequality, Samples) {
  EXPECT_TRUE(check_triangle_inequality({1.0, 0.0}, {2.0, 0.0}));
  EXPECT_TRUE(check_triangle_inequality({1.0, 0.0}, {-1.0, 0.0}));
}

TEST(ProjectionBound, Examples) {
  const auto x = PoincareVector::unit_x(), y = PoincareVector::unit_y(), z = PoincareVector::unit_z();
  const PlanePair planes{x, z, y, z};
  EXPECT_TRUE(check_projection_bound(z, z, planes));
  EXPECT_TRUE(check_projection_bound(y, -y, planes));
  const MeasurementPlane p1 = MeasurementPlane::spanned_by(x, z), p2 = MeasurementPlane::spanned_by(y, z);
  EXPECT_NEAR(p1.projection_length(z) , 1.0, 1e-15);
  EXPECT_NEAR(p1.projection_length(y), 0.0, 1e-15);
  EXPECT_NEAR(p1.projection_length(y) * p1.projection_length(y) + p2.projection_length(y) * p2.projection_length(y), 1.0, 1e-15);
  EXPECT_THROW(check_projection_bound(z, z, {x, z, PoincareVector{1.0, 0.0, 1.0}, z}), GeometryError);
}

TEST(HarmonicDecomposition, RandomInPlaneSettings) {
  Rng rng{62};
  for (int i = 0; i < 10000; ++i) {
    const Frame f = random_frame(rng);
    const MeasurementPlane plane{f.e1, f.e2};
    const PoincareVector a = plane.direction(2.0 * kPi * uniform01(rng));
    const PoincareVector b = plane.direction(2.0 * kPi * uniform01(rng));
    ASSERT_TRUE(check_harmonic_decomposition(uniform_sphere_sample(rng), uniform_sphere_sample(rng), a, b, plane));
  }
}

TEST(MalusProductBound, HoldsUnderBothPolicies) {
  Rng rng{63};
  for (int i = 0; i < 10000; ++i) {
    const Quadruple q = random_valid_quadruple(rng);
    ASSERT_TRUE(check_malus_product_bound(q.a, q.b, q.u, q.v, IntervalPolicy::Strict));
    ASSERT_TRUE(check_malus_product_bound(uniform_sphere_sample(rng), uniform_sphere_sample(rng),
                                          uniform_sphere_sample(rng), uniform_sphere_sample(rng),
                                          IntervalPolicy::MalusPreserving));
  }
}

TEST(LemmaChecks, DefaultSizesAllPass) {
  Rng rng = make_stream(64, 0);
  const auto tallies = run_lemma_checks(LemmaSizes{}, rng);
  ASSERT_EQ(tallies.size(), 8u);
  for (const auto &t : tallies) {
    EXPECT_EQ(t.failures, 0u) << t.name;
    EXPECT_GT(t.checks, 0u) << t.name;
  }
  EXPECT_EQ(tallies[0].checks, 4u);
  EXPECT_EQ(tallies[1].checks, 100000u);
  EXPECT_EQ(tallies[3].checks, 1000000u);
}

TEST(RotationAveragedCorrelation, SingletOrthogonalToPlane) {
  Rng rng = make_stream(65, 0);
  const SourceModel source = SourceModel::singlet_about(PoincareVector::unit_y());
  for (double phi : {0.3, 1.1, 2.5}) {
    const auto e = rotation_averaged_correlation(source, xz_plane(), phi, 360, 2000, rng);
    EXPECT_NEAR(e.value, -std::cos(phi), 4.0 * e.std_error + 1e-12) << phi;
  }
}

TEST(RotationAveragedCorrelation, PerfectCorrelationAtZero) {
  Rng rng{66};
  const PoincareVector u = xz_plane().direction(0.4);
  const auto e = rotation_averaged_correlation(SourceModel::fixed_pair(u, -u), xz_plane(), 0.0, 360, 50, rng);
  EXPECT_EQ(e.value, -1.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(RotationAveragedCorrelation, GridRefinementAgrees) {
  Rng rng = make_stream(67, 0);
  Rng other = make_stream(67, 1);
  const SourceModel source = SourceModel::singlet_two_point();
  const auto coarse = rotation_averaged_correlation(source, xz_plane(), 0.8, 360, 400, rng, IntervalPolicy::MalusPreserving);
  const auto fine = rotation_averaged_correlation(source, xz_plane(), 0.8, 1440, 100, other, IntervalPolicy::MalusPreserving);
  EXPECT_LE(std::abs(coarse.value - fine.value), 2.0 * std::hypot(coarse.std_error, fine.std_error));
}

TEST(RotationAveragedCorrelation, StrictPolicyRaisesForInvalidSource) {
  Rng rng{68};
  const auto z = PoincareVector::unit_z();
  EXPECT_THROW(rotation_averaged_correlation(SourceModel::fixed_pair(z, z), xz_plane(), 0.5, 36, 10, rng),
               ModelInvalid);
}

TEST(AuditFullChain, HundredTrialsPass) {
  AuditOptions options;
  options.trials = 100;
  const AuditReport r = audit_full_chain(options, 7);
  EXPECT_EQ(r.passes, 100u);
  EXPECT_EQ(r.failures, 0u);
  EXPECT_EQ(r.excluded_invalid, 0u);
  EXPECT_EQ(r.records.size(), 100u);
  for (const auto &t : r.records) {
    EXPECT_LE(t.lhs, t.bound + 4.0 * t.std_error);
    EXPECT_GE(t.phi, 0.0);
    EXPECT_LE(t.phi, kPi);
  }
}

TEST(AuditFullChain, DeterministicAndStrictExcludes) {
  AuditOptions options;
  options.trials = 20;
  options.n_xi = 90;
  const AuditReport a = audit_full_chain(options, 9), b = audit_full_chain(options, 9);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].lhs, b.records[i].lhs);
  options.policy = IntervalPolicy::Strict;
  const AuditReport strict = audit_full_chain(options, 9);
  EXPECT_EQ(strict.passes + strict.failures + strict.excluded_invalid, 20u);
  EXPECT_EQ(strict.failures, 0u);
  options.trials = 0;
  EXPECT_THROW(audit_full_chain(options, 9), std::invalid_argument);
}

TEST(AuditTrial, ZeroAngleAndSingletAtOptimum) {
  Rng rng = make_stream(69, 0);
  AuditOptions options;
  const Frame frame = random_frame(rng);
  const AuditTrial zero = audit_trial(SourceModel::singlet_two_point(), frame, 0.0, options, rng);
  EXPECT_DOUBLE_EQ(zero.bound, 4.0);
  EXPECT_LE(zero.lhs, 4.0 + 1e-12);

  options.n_mc = 1000;
  const double phi = 18.8 * kPi / 180.0;
  const AuditTrial t = audit_trial(SourceModel::singlet_two_point(), frame, phi, options, rng);
  EXPECT_NEAR(t.bound, 3.792, 5e-4);
  EXPECT_LE(t.lhs, t.bound + 4.0 * t.std_error);
  EXPECT_LT(t.lhs, quantum_leggett_lhs(phi, Visibility{1.0}) - 4.0 * t.std_error);
}
