#include "leggett/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "leggett/errors.hpp"
#include "leggett/inequalities.hpp"

namespace leggett {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double composite_simpson(double lo, double hi, std::size_t intervals, double offset) {
  if (intervals % 2 == 1) ++intervals;
  const double h = (hi - lo) / static_cast<double>(intervals);
  const auto f = [offset](double x) { return std::abs(std::cos(x + offset)); };
  double sum = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
  }
  return sum * h / 3.0;
}

double uniform(Rng &rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

SourceModel random_source(Rng &rng) {
  if (uniform01(rng) < 0.2) return SourceModel::singlet_two_point();
  const std::size_t k = 1 + static_cast<std::size_t>(uniform01(rng) * 4.0);
  std::vector<WeightedPair> pairs;
  for (std::size_t i = 0; i < k; ++i) {
    const PoincareVector u = uniform_sphere_sample(rng);
    const PoincareVector v = uniform01(rng) < 0.5 ? -u : uniform_sphere_sample(rng);
    pairs.push_back({{u, v}, 0.05 + uniform01(rng)});
  }
  return SourceModel::weighted_list(std::move(pairs));
}

} // namespace

bool check_dichotomic_identity(int a, int b) {
  if ((a != 1 && a != -1) || (b != 1 && b != -1)) {
    throw std::invalid_argument("dichotomic identity needs A, B in {-1, +1}");
  }
  const int product = a * b;
  return -1 + std::abs(a + b) == product && product == 1 - std::abs(a - b);
}

bool check_modulus_bound(const OutcomeDistribution &dist) {
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw std::invalid_argument("probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
  const auto [pp, pm, mp, mm] = dist;
  const double mean_a = pp + pm - mp - mm;
  const double mean_b = pp - pm + mp - mm;
  const double mean_ab = pp - pm - mp + mm;
  return -1.0 + std::abs(mean_a + mean_b) <= mean_ab + kAuditTolerance &&
         mean_ab <= 1.0 - std::abs(mean_a - mean_b) + kAuditTolerance;
}

double xi_average_abs_cos(double offset) {
  constexpr std::size_t kNodes = 100000;
  // Kinks where xi + offset = pi/2 + k pi.
  double first = std::fmod(kPi / 2.0 - offset, kPi);
  if (first < 0.0) first += kPi;
  const std::array<double, 4> cuts{0.0, first, first + kPi, kTwoPi};
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const auto intervals = std::max<std::size_t>(2, static_cast<std::size_t>(kNodes * len / kTwoPi));
    integral += composite_simpson(cuts[i], cuts[i + 1], intervals, offset);
  }
  return integral / kTwoPi;
}

bool check_sine_difference_bounds(double phi, double phi_prime, double chi) {
  const double p = 0.5 * (phi - chi);
  const double q = 0.5 * (phi_prime - chi);
  const double rhs = std::abs(std::sin(0.5 * (phi - phi_prime)));
  const bool cosines = std::abs(std::cos(p)) + std::abs(std::cos(q)) >= rhs - kAuditTolerance;
  const bool sines = std::abs(std::sin(p)) + std::abs(std::sin(q)) >= rhs - kAuditTolerance;
  return cosines && sines;
}

bool check_triangle_inequality(const std::array<double, 2> &x, const std::array<double, 2> &y) {
  const double sum = std::hypot(x[0] + y[0], x[1] + y[1]);
  const double parts = std::hypot(x[0], x[1]) + std::hypot(y[0], y[1]);
  return sum <= parts + kAuditTolerance * std::max(1.0, parts);
}

MeasurementPlane MeasurementPlane::spanned_by(const PoincareVector &a, const PoincareVector &b) {
  const Vec3 n = plane_normal(a, b);
  if (norm(n) == 0.0) throw DegeneratePlane("settings are collinear and do not span a plane");
  return {a, PoincareVector{cross(n, a.vec())}};
}

PoincareVector MeasurementPlane::direction(double t) const {
  return PoincareVector{e1.vec() * std::cos(t) + e2.vec() * std::sin(t)};
}

double MeasurementPlane::angle_of(const Vec3 &w) const { return std::atan2(dot(w, e2.vec()), dot(w, e1.vec())); }

double MeasurementPlane::projection_length(const Vec3 &w) const {
  return std::hypot(dot(w, e1.vec()), dot(w, e2.vec()));
}

PlaneAngles plane_angles(const PoincareVector &u, const PoincareVector &v, const PoincareVector &a,
                         const PoincareVector &b, const MeasurementPlane &plane) {
  const double phi_a = plane.angle_of(a), phi_b = plane.angle_of(b);
  const double phi_u = plane.angle_of(u), phi_v = plane.angle_of(v);
  PlaneAngles out;
  out.xi = 0.5 * (phi_a + phi_b);
  out.phi = phi_a - phi_b;
  out.psi = 0.5 * (phi_u + phi_v);
  out.chi = phi_u - phi_v;
  out.u_len = plane.projection_length(u);
  out.v_len = plane.projection_length(v);
  out.n1 = 0.5 * (out.u_len + out.v_len);
  out.n2 = 0.5 * (out.u_len - out.v_len);
  return out;
}

bool check_harmonic_decomposition(const PoincareVector &u, const PoincareVector &v,
                                  const PoincareVector &a, const PoincareVector &b,
                                  const MeasurementPlane &plane) {
  const PlaneAngles g = plane_angles(u, v, a, b, plane);
  const double half = 0.5 * (g.phi - g.chi);
  const double rhs = 2.0 * (g.n2 * std::cos(half) * std::cos(g.xi - g.psi) -
                            g.n1 * std::sin(half) * std::sin(g.xi - g.psi));
  return std::abs(dot(u, a) - dot(v, b) - rhs) <= 1e-11;
}

bool check_projection_bound(const PoincareVector &u, const PoincareVector &v, const PlanePair &planes) {
  const Vec3 n1 = plane_normal(planes.first_a, planes.first_b);
  const Vec3 n2 = plane_normal(planes.second_a, planes.second_b);
  if (norm(n1) == 0.0 || norm(n2) == 0.0) {
    throw GeometryError("projection bound needs two non-collinear setting pairs");
  }
  if (std::abs(dot(n1, n2)) > kPlaneTolerance) {
    throw GeometryError("projection bound requires orthogonal planes");
  }
  const auto in_plane_sq = [](const Vec3 &n, const PoincareVector &w) {
    const double c = dot(n, w.vec());
    return std::max(0.0, 1.0 - c * c);
  };
  const double u1 = in_plane_sq(n1, u), u2 = in_plane_sq(n2, u);
  const double v1 = in_plane_sq(n1, v), v2 = in_plane_sq(n2, v);
  const bool per_vector = u1 + u2 >= 1.0 - kAuditTolerance && v1 + v2 >= 1.0 - kAuditTolerance;
  const bool combined = std::sqrt(u1 + v1) + std::sqrt(u2 + v2) >= std::numbers::sqrt2 - kAuditTolerance;
  return per_vector && combined;
}

bool check_malus_product_bound(const PoincareVector &a, const PoincareVector &b,
                               const PoincareVector &u, const PoincareVector &v, IntervalPolicy policy) {
  const SubensembleAverages avg = integrate_subensemble(a, b, u, v, policy);
  const double ua = dot(u, a), vb = dot(v, b);
  return -1.0 + std::abs(ua + vb) <= avg.mean_ab + 1e-9 && avg.mean_ab <= 1.0 - std::abs(ua - vb) + 1e-9;
}

CorrelationEstimate rotation_averaged_correlation(const SourceModel &source, const MeasurementPlane &plane,
                                                  double phi, std::size_t n_xi, std::uint64_t n_mc,
                                                  Rng &rng, IntervalPolicy policy) {
  if (n_xi == 0 || n_mc == 0) throw std::invalid_argument("grid size and sample count must be >= 1");
  double sum = 0.0;
  double var = 0.0;
  for (std::size_t j = 0; j < n_xi; ++j) {
    const double xi = kTwoPi * static_cast<double>(j) / static_cast<double>(n_xi);
    const PoincareVector a = plane.direction(xi + 0.5 * phi);
    const PoincareVector b = plane.direction(xi - 0.5 * phi);
    const CorrelationEstimate e = source_correlation(source, a, b, n_mc, rng, policy);
    sum += e.value;
    var += e.std_error * e.std_error;
  }
  const auto n = static_cast<double>(n_xi);
  return {sum / n, std::sqrt(var) / n, static_cast<std::uint64_t>(n_xi) * n_mc};
}

std::vector<LemmaTally> run_lemma_checks(const LemmaSizes &sizes, Rng &rng) {
  std::vector<LemmaTally> out;
  const auto tally = [&out](std::string name, std::uint64_t checks, std::uint64_t failures) {
    out.push_back({std::move(name), checks, failures});
  };

  {
    std::uint64_t failures = 0;
    for (int a : {1, -1})
      for (int b : {1, -1}) failures += !check_dichotomic_identity(a, b);
    tally("dichotomic_identity", 4, failures);
  }
  {
    std::uint64_t failures = 0;
    std::exponential_distribution<double> expo{1.0};
    for (std::uint64_t i = 0; i < sizes.modulus; ++i) {
      OutcomeDistribution d{expo(rng), expo(rng), expo(rng), expo(rng)};
      const double total = d[0] + d[1] + d[2] + d[3];
      for (double &p : d) p /= total;
      failures += !check_modulus_bound(d);
    }
    tally("modulus_bound", sizes.modulus, failures);
  }
  {
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < sizes.xi_offsets; ++i) {
      failures += std::abs(xi_average_abs_cos(uniform(rng, -10.0, 10.0)) - 2.0 / kPi) >= 1e-9;
    }
    tally("xi_average_abs_cos", sizes.xi_offsets, failures);
  }
  {
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < sizes.sine_difference; ++i) {
      const double phi = uniform(rng, 0.0, kTwoPi);
      const double phi_prime = uniform(rng, 0.0, kTwoPi);
      const double chi = uniform(rng, -kTwoPi, kTwoPi);
      failures += !check_sine_difference_bounds(phi, phi_prime, chi);
    }
    tally("sine_difference_bounds", sizes.sine_difference, failures);
  }
  {
    std::uint64_t failures = 0;
    std::normal_distribution<double> normal{0.0, 1.0};
    for (std::uint64_t i = 0; i < sizes.triangle; ++i) {
      failures += !check_triangle_inequality({normal(rng), normal(rng)}, {normal(rng), normal(rng)});
    }
    tally("triangle_inequality", sizes.triangle, failures);
  }
  {
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < sizes.projection; ++i) {
      const Frame f = random_frame(rng);
      const MeasurementPlane p1{f.e1, f.e2}, p2{f.e1, f.e3};
      const double t1 = uniform(rng, 0.0, kTwoPi), t2 = uniform(rng, 0.0, kTwoPi);
      const double d1 = uniform(rng, 0.1, kPi - 0.1), d2 = uniform(rng, 0.1, kPi - 0.1);
      const PlanePair planes{p1.direction(t1), p1.direction(t1 + d1), p2.direction(t2), p2.direction(t2 + d2)};
      failures += !check_projection_bound(uniform_sphere_sample(rng), uniform_sphere_sample(rng), planes);
    }
    tally("projection_bound", sizes.projection, failures);
  }
  {
    // Polarization angles drawn through (psi, chi) with chi in [-2pi, 2pi]
    // and psi in [|chi|/2, 2pi - |chi|/2].
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < sizes.harmonic; ++i) {
      const Frame f = random_frame(rng);
      const MeasurementPlane plane{f.e1, f.e2};
      const double chi = uniform(rng, -kTwoPi, kTwoPi);
      const double psi = uniform(rng, 0.5 * std::abs(chi), kTwoPi - 0.5 * std::abs(chi));
      const double zu = uniform(rng, -1.0, 1.0), zv = uniform(rng, -1.0, 1.0);
      const auto polarization = [&](double angle, double z) {
        return PoincareVector{plane.direction(angle).vec() * std::sqrt(1.0 - z * z) + f.e3.vec() * z};
      };
      const PoincareVector u = polarization(psi + 0.5 * chi, zu);
      const PoincareVector v = polarization(psi - 0.5 * chi, zv);
      const PoincareVector a = plane.direction(uniform(rng, -kPi, kPi));
      const PoincareVector b = plane.direction(uniform(rng, -kPi, kPi));
      failures += !check_harmonic_decomposition(u, v, a, b, plane);
    }
    tally("harmonic_decomposition", sizes.harmonic, failures);
  }
  {
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < sizes.malus_product; ++i) {
      failures += !check_malus_product_bound(uniform_sphere_sample(rng), uniform_sphere_sample(rng),
                                             uniform_sphere_sample(rng), uniform_sphere_sample(rng),
                                             IntervalPolicy::MalusPreserving);
    }
    tally("malus_product_bound", sizes.malus_product, failures);
  }
  return out;
}

AuditTrial audit_trial(const SourceModel &source, const Frame &frame, double phi,
                       const AuditOptions &options, Rng &rng) {
  const MeasurementPlane first{frame.e1, frame.e2};
  const MeasurementPlane second{frame.e1, frame.e3};
  const auto rac = [&](const MeasurementPlane &plane, double angle) {
    return rotation_averaged_correlation(source, plane, angle, options.n_xi, options.n_mc, rng, options.policy);
  };
  const CorrelationEstimate e1_phi = rac(first, phi), e1_zero = rac(first, 0.0);
  const CorrelationEstimate e2_phi = rac(second, phi), e2_zero = rac(second, 0.0);

  AuditTrial t;
  t.phi = phi;
  t.source_kind = to_string(source.kind());
  t.source_pairs = source.pairs().size();
  t.lhs = std::abs(e1_phi.value + e1_zero.value) + std::abs(e2_phi.value + e2_zero.value);
  t.std_error = std::sqrt(e1_phi.std_error * e1_phi.std_error + e1_zero.std_error * e1_zero.std_error +
                          e2_phi.std_error * e2_phi.std_error + e2_zero.std_error * e2_zero.std_error);
  t.bound = leggett_bound(phi);
  t.passed = t.lhs <= t.bound + options.sigma_threshold * t.std_error + kAuditTolerance;
  return t;
}

AuditReport audit_full_chain(const AuditOptions &options, std::uint64_t seed) {
  if (options.trials == 0) throw std::invalid_argument("audit needs at least one trial");
  AuditReport report;
  report.trials = options.trials;
  for (std::uint64_t i = 0; i < options.trials; ++i) {
    Rng rng = make_stream(seed, i);
    const Frame frame = random_frame(rng);
    const double phi = uniform(rng, 0.0, kPi);
    const SourceModel source = random_source(rng);
    try {
      const AuditTrial t = audit_trial(source, frame, phi, options, rng);
      (t.passed ? report.passes : report.failures) += 1;
      report.worst_margin = std::max(report.worst_margin, t.lhs - t.bound);
      if (t.std_error > 0.0) report.worst_sigma = std::max(report.worst_sigma, (t.lhs - t.bound) / t.std_error);
      report.records.push_back(t);
    } catch (const ModelInvalid &) {
      ++report.excluded_invalid;
    }
  }
  return report;
}

} // namespace leggett
