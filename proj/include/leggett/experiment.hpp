#pragma once

// Simulated coincidence-counting experiment for the orthogonal-plane
// Leggett test and the accompanying CHSH test.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leggett/estimate.hpp"
#include "leggett/geometry.hpp"
#include "leggett/inequalities.hpp"
#include "leggett/quantum.hpp"
#include "leggett/random.hpp"

namespace leggett {

/// Coincidences for outcome pairs (Alice, Bob) = ++, +-, -+, --.
struct CountTable {
  std::uint64_t n_pp{0}, n_pm{0}, n_mp{0}, n_mm{0};
  std::uint64_t total() const { return n_pp + n_pm + n_mp + n_mm; }
  bool operator==(const CountTable &) const = default;
};

/// E = (N++ + N-- - N+- - N-+) / N with first-order Poisson error
/// sqrt(4 S D / N^3), S = N++ + N--, D = N+- + N-+. Throws EmptyTable.
CorrelationEstimate correlation_from_counts(const CountTable &counts);

/// sqrt(4 S D / (S + D)^3) for real-valued (expected) count sums.
double poisson_correlation_error(double same, double different);

/// Each cell is an independent Poisson variate with mean
/// mean_pairs * joint_probability(i, j, a, b, V). Throws
/// std::invalid_argument unless mean_pairs is finite and > 0.
CountTable simulate_counts(const PoincareVector &a, const PoincareVector &b, Visibility vis,
                           double mean_pairs, Rng &rng);

/// Scalar visibility with optional per-plane overrides. Pairs spanning the
/// x-z (linear) plane use `linear`, pairs spanning the y-z plane use
/// `circular`; everything else, including collinear pairs such as the
/// perfect-correlation check, uses `scalar`.
struct VisibilityModel {
  Visibility scalar{1.0};
  std::optional<Visibility> linear;
  std::optional<Visibility> circular;

  Visibility for_pair(const PoincareVector &a, const PoincareVector &b) const;
};

/// How the error on S_NLHV is propagated from the five correlation errors.
enum class ErrorPropagation {
  /// Each absolute-value term gets sqrt(s_x^2 + s_23^2); the terms are added
  /// in quadrature. E23 is treated as measured separately for each plane.
  Termwise,
  /// First-order gradient with the sign taken at the estimate; E23 enters
  /// once with coefficient (s1 + s2).
  Gradient,
};

std::string to_string(ErrorPropagation mode);
/// "termwise" | "gradient"; throws ConfigError.
ErrorPropagation parse_error_propagation(const std::string &name);

/// Polarizer settings {alpha1, alpha2, beta1, beta2, beta3}.
struct ProtocolSettings {
  PolarizerSetting alpha1{45.0, SettingPlane::Linear};
  PolarizerSetting alpha2{0.0, SettingPlane::Linear};
  PolarizerSetting beta1{55.0, SettingPlane::Linear};
  PolarizerSetting beta2{10.0, SettingPlane::Rotated};
  PolarizerSetting beta3{0.0, SettingPlane::Linear};
};

struct ExperimentConfig {
  ProtocolSettings settings;
  VisibilityModel visibility;
  double mean_pairs{1e6};
  std::uint64_t seed{42};
  std::vector<double> phi_grid_deg;
  ErrorPropagation propagation{ErrorPropagation::Termwise};
};

/// Sphere vectors of the five settings and the common relative angle.
struct ProtocolGeometry {
  PoincareVector a1, a2, b1, b2, b3;
  double phi{0.0}; ///< radians
};

/// Checks that plane(a1, b1) is orthogonal to plane(a2, b2), that b3 = a2 and
/// that both planes share the same relative angle; throws GeometryError.
ProtocolGeometry resolve_geometry(const ProtocolSettings &settings);

/// Settings for relative angle phi: keeps alpha1, alpha2, puts beta1 at
/// alpha1 + phi/2 in alpha1's plane, beta2 at alpha2 + phi/2 behind the
/// quarter-wave plate, and beta3 = alpha2.
ProtocolSettings settings_for_phi(const ProtocolSettings &base, double phi_deg);

struct ProtocolCorrelations {
  CorrelationEstimate e11; ///< E(a1, b1), plane 1 at phi
  CorrelationEstimate e22; ///< E(a2, b2), plane 2 at phi
  CorrelationEstimate e23; ///< E(a2, b3), perfect-correlation setting
  CorrelationEstimate e21; ///< E(a2, b1), CHSH only
  CorrelationEstimate e12; ///< E(a1, b2), CHSH only
};

struct InequalityEvaluation {
  InequalityReport nlhv;
  InequalityReport chsh;
  std::vector<std::string> warnings;
};

/// S_NLHV and S_CHSH with propagated errors from five measured correlations.
InequalityEvaluation evaluate_inequalities(const ProtocolCorrelations &c, double phi,
                                           ErrorPropagation mode = ErrorPropagation::Termwise);

struct ProtocolReport {
  ProtocolGeometry geometry;
  std::array<CountTable, 5> counts; ///< order e11, e22, e23, e21, e12
  ProtocolCorrelations correlations;
  InequalityEvaluation inequalities;
  double nlhv_analytic{0.0};
  double chsh_analytic{0.0};
};

/// Simulates the five count tables, estimates correlations and evaluates
/// both inequalities. Throws GeometryError for an invalid geometry.
ProtocolReport run_protocol(const ExperimentConfig &cfg);

/// Same as run_protocol, drawing from the given stream.
ProtocolReport run_protocol(const ExperimentConfig &cfg, Rng &rng);

/// Expected S_NLHV and S_CHSH for the geometry and visibility model.
struct AnalyticValues {
  double nlhv{0.0};
  double chsh{0.0};
};
AnalyticValues analytic_values(const ProtocolGeometry &g, const VisibilityModel &vis);

/// Mean pair count per setting for which the expected propagated error on
/// S_NLHV equals target_error.
double tune_mean_pairs(const ExperimentConfig &cfg, double target_error);

struct SweepRow {
  double phi_deg{0.0};
  double s_nlhv_analytic{0.0};
  double s_nlhv_mc{0.0};
  double s_nlhv_mc_err{0.0};
  double leggett_bound{0.0};
  double s_chsh_analytic{0.0};
  double s_chsh_mc{0.0};
  double s_chsh_mc_err{0.0};
  double chsh_bound{kChshBound};
};

/// One row per grid angle; row i draws from make_stream(cfg.seed, i).
/// Throws std::invalid_argument for an empty grid.
std::vector<SweepRow> sweep_phi(const ExperimentConfig &cfg);

} // namespace leggett
