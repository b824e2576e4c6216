#include "leggett/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "leggett/errors.hpp"

namespace leggett {
namespace {

constexpr double kGeometryTolerance = 1e-9;

// Great circle swept by a polarizer setting, as a unit normal.
Vec3 nominal_normal(SettingPlane plane) {
  return plane == SettingPlane::Linear ? Vec3{0.0, 1.0, 0.0} : Vec3{1.0, 0.0, 0.0};
}

double combine_nlhv_error(double s11, double s22, double s23, double sign_sum, ErrorPropagation mode) {
  if (mode == ErrorPropagation::Termwise) {
    return std::sqrt(s11 * s11 + s22 * s22 + 2.0 * s23 * s23);
  }
  return std::sqrt(s11 * s11 + s22 * s22 + sign_sum * sign_sum * s23 * s23);
}

double sign_at(double x, const char *what, std::vector<std::string> &warnings) {
  if (x == 0.0) {
    warnings.push_back(std::string("argument of |") + what +
                       "| is exactly zero; derivative taken as +1");
    return 1.0;
  }
  return x > 0.0 ? 1.0 : -1.0;
}

} // namespace

CorrelationEstimate correlation_from_counts(const CountTable &counts) {
  const std::uint64_t n = counts.total();
  if (n == 0) throw EmptyTable("correlation requested from an empty count table");
  const double same = static_cast<double>(counts.n_pp + counts.n_mm);
  const double different = static_cast<double>(counts.n_pm + counts.n_mp);
  return {(same - different) / static_cast<double>(n), poisson_correlation_error(same, different), n};
}

double poisson_correlation_error(double same, double different) {
  const double n = same + different;
  if (!(n > 0.0)) throw EmptyTable("Poisson error of an empty table");
  return std::sqrt(4.0 * same * different / (n * n * n));
}

CountTable simulate_counts(const PoincareVector &a, const PoincareVector &b, Visibility vis,
                           double mean_pairs, Rng &rng) {
  if (!(mean_pairs > 0.0) || !std::isfinite(mean_pairs)) {
    throw std::invalid_argument("mean pair count must be finite and > 0");
  }
  const auto draw = [&](int i, int j) -> std::uint64_t {
    const double p = joint_probability(i, j, a, b, vis);
    if (p < 1e-15) return 0;
    return static_cast<std::uint64_t>(std::poisson_distribution<long long>{mean_pairs * p}(rng));
  };
  CountTable t;
  t.n_pp = draw(1, 1);
  t.n_pm = draw(1, -1);
  t.n_mp = draw(-1, 1);
  t.n_mm = draw(-1, -1);
  return t;
}

Visibility VisibilityModel::for_pair(const PoincareVector &a, const PoincareVector &b) const {
  const Vec3 n = plane_normal(a, b);
  if (norm(n) == 0.0) return scalar;
  if (linear && std::abs(n.y) >= 1.0 - kGeometryTolerance) return *linear;
  if (circular && std::abs(n.x) >= 1.0 - kGeometryTolerance) return *circular;
  return scalar;
}

std::string to_string(ErrorPropagation mode) {
  return mode == ErrorPropagation::Termwise ? "termwise" : "gradient";
}

ErrorPropagation parse_error_propagation(const std::string &name) {
  if (name == "termwise") return ErrorPropagation::Termwise;
  if (name == "gradient") return ErrorPropagation::Gradient;
  throw ConfigError("unknown error propagation '" + name + "' (expected termwise|gradient)");
}

ProtocolGeometry resolve_geometry(const ProtocolSettings &s) {
  ProtocolGeometry g{polarizer_to_poincare(s.alpha1), polarizer_to_poincare(s.alpha2),
                     polarizer_to_poincare(s.beta1),  polarizer_to_poincare(s.beta2),
                     polarizer_to_poincare(s.beta3),  0.0};

  bool orthogonal = false;
  try {
    orthogonal = planes_orthogonal({g.a1, g.b1, g.a2, g.b2});
  } catch (const DegeneratePlane &) {
    // phi = 0: both pairs collinear, fall back to the polarizer great circles.
    const Vec3 n1 = nominal_normal(s.beta1.plane);
    const Vec3 n2 = nominal_normal(s.beta2.plane);
    orthogonal = std::abs(dot(n1, n2)) <= kGeometryTolerance &&
                 std::abs(dot(g.a1.vec(), n1)) <= kGeometryTolerance &&
                 std::abs(dot(g.a2.vec(), n2)) <= kGeometryTolerance;
  }
  if (!orthogonal) {
    throw GeometryError("plane(a1, b1) is not orthogonal to plane(a2, b2)");
  }
  if (norm(g.b3.vec() - g.a2.vec()) > kGeometryTolerance) {
    throw GeometryError("perfect-correlation setting b3 must coincide with a2");
  }
  const double phi1 = sphere_angle(g.a1, g.b1);
  const double phi2 = sphere_angle(g.a2, g.b2);
  if (std::abs(phi1 - phi2) > kGeometryTolerance) {
    throw GeometryError("relative angles differ between planes: " + std::to_string(rad_to_deg(phi1)) +
                        " vs " + std::to_string(rad_to_deg(phi2)) + " deg");
  }
  g.phi = 0.5 * (phi1 + phi2);
  return g;
}

ProtocolSettings settings_for_phi(const ProtocolSettings &base, double phi_deg) {
  ProtocolSettings s = base;
  s.beta1 = {base.alpha1.angle_deg + 0.5 * phi_deg, base.alpha1.plane};
  s.beta2 = {base.alpha2.angle_deg + 0.5 * phi_deg, SettingPlane::Rotated};
  s.beta3 = base.alpha2;
  return s;
}

InequalityEvaluation evaluate_inequalities(const ProtocolCorrelations &c, double phi, ErrorPropagation mode) {
  InequalityEvaluation out;
  const double lhs = leggett_lhs({c.e11.value, c.e22.value, c.e23.value, phi});
  double sign_sum = 0.0;
  if (mode == ErrorPropagation::Gradient) {
    sign_sum = sign_at(c.e11.value + c.e23.value, "E11 + E23", out.warnings) +
               sign_at(c.e22.value + c.e23.value, "E22 + E23", out.warnings);
  }
  out.nlhv = make_report(lhs, leggett_bound(phi),
                         combine_nlhv_error(c.e11.std_error, c.e22.std_error, c.e23.std_error, sign_sum, mode));

  // Every coefficient of the CHSH combination is +-1, so the sign at the
  // estimate does not change the propagated error.
  const double chsh = chsh_value(c.e11.value, c.e12.value, c.e21.value, c.e22.value);
  const double chsh_err = std::sqrt(c.e11.std_error * c.e11.std_error + c.e12.std_error * c.e12.std_error +
                                    c.e21.std_error * c.e21.std_error + c.e22.std_error * c.e22.std_error);
  out.chsh = make_report(chsh, kChshBound, chsh_err);
  return out;
}

AnalyticValues analytic_values(const ProtocolGeometry &g, const VisibilityModel &vis) {
  const auto e = [&](const PoincareVector &a, const PoincareVector &b) {
    return visibility_correlation(a, b, vis.for_pair(a, b));
  };
  const double e11 = e(g.a1, g.b1), e22 = e(g.a2, g.b2), e23 = e(g.a2, g.b3);
  const double e21 = e(g.a2, g.b1), e12 = e(g.a1, g.b2);
  return {std::abs(e11 + e23) + std::abs(e22 + e23), chsh_value(e11, e12, e21, e22)};
}

ProtocolReport run_protocol(const ExperimentConfig &cfg, Rng &rng) {
  ProtocolReport r;
  r.geometry = resolve_geometry(cfg.settings);
  const ProtocolGeometry &g = r.geometry;

  const std::array<std::pair<const PoincareVector *, const PoincareVector *>, 5> pairs{{
      {&g.a1, &g.b1}, {&g.a2, &g.b2}, {&g.a2, &g.b3}, {&g.a2, &g.b1}, {&g.a1, &g.b2}}};
  std::array<CorrelationEstimate, 5> est;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto &[a, b] = pairs[k];
    r.counts[k] = simulate_counts(*a, *b, cfg.visibility.for_pair(*a, *b), cfg.mean_pairs, rng);
    est[k] = correlation_from_counts(r.counts[k]);
  }
  r.correlations = {est[0], est[1], est[2], est[3], est[4]};
  r.inequalities = evaluate_inequalities(r.correlations, g.phi, cfg.propagation);
  const AnalyticValues analytic = analytic_values(g, cfg.visibility);
  r.nlhv_analytic = analytic.nlhv;
  r.chsh_analytic = analytic.chsh;
  return r;
}

ProtocolReport run_protocol(const ExperimentConfig &cfg) {
  Rng rng{cfg.seed};
  return run_protocol(cfg, rng);
}

double tune_mean_pairs(const ExperimentConfig &cfg, double target_error) {
  if (!(target_error > 0.0)) throw std::invalid_argument("target error must be > 0");
  const ProtocolGeometry g = resolve_geometry(cfg.settings);
  const auto unit_error = [&](const PoincareVector &a, const PoincareVector &b) {
    const double e = visibility_correlation(a, b, cfg.visibility.for_pair(a, b));
    return std::sqrt(std::max(0.0, 1.0 - e * e));
  };
  const double s11 = unit_error(g.a1, g.b1);
  const double s22 = unit_error(g.a2, g.b2);
  const double s23 = unit_error(g.a2, g.b3);
  const auto analytic = [&](const PoincareVector &a, const PoincareVector &b) {
    return visibility_correlation(a, b, cfg.visibility.for_pair(a, b));
  };
  const double e23 = analytic(g.a2, g.b3);
  const double sign_sum = (analytic(g.a1, g.b1) + e23 >= 0.0 ? 1.0 : -1.0) +
                          (analytic(g.a2, g.b2) + e23 >= 0.0 ? 1.0 : -1.0);
  const double unit = combine_nlhv_error(s11, s22, s23, sign_sum, cfg.propagation);
  return (unit / target_error) * (unit / target_error);
}

std::vector<SweepRow> sweep_phi(const ExperimentConfig &cfg) {
  if (cfg.phi_grid_deg.empty()) throw std::invalid_argument("phi grid must not be empty");
  std::vector<SweepRow> rows;
  rows.reserve(cfg.phi_grid_deg.size());
  for (std::size_t i = 0; i < cfg.phi_grid_deg.size(); ++i) {
    ExperimentConfig row_cfg = cfg;
    row_cfg.settings = settings_for_phi(cfg.settings, cfg.phi_grid_deg[i]);
    Rng rng = make_stream(cfg.seed, i);
    const ProtocolReport r = run_protocol(row_cfg, rng);
    rows.push_back({cfg.phi_grid_deg[i], r.nlhv_analytic, r.inequalities.nlhv.lhs,
                    r.inequalities.nlhv.std_error, r.inequalities.nlhv.bound, r.chsh_analytic,
                    r.inequalities.chsh.lhs, r.inequalities.chsh.std_error, kChshBound});
  }
  return rows;
}

} // namespace leggett
