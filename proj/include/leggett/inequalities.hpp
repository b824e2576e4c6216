#pragma once

#include <functional>

#include "leggett/quantum.hpp"

namespace leggett {

/// Correlations entering the Leggett-type inequality: two at relative angle
/// phi in orthogonal planes, and the perfect-correlation setting shared by
/// both planes.
struct LeggettInputs {
  double e11_phi{0.0};
  double e22_phi{0.0};
  double e23_zero{0.0};
  double phi{0.0}; ///< radians, in [0, pi]
};

struct InequalityReport {
  double lhs{0.0};
  double bound{0.0};
  double margin{0.0};       ///< lhs - bound; positive means violated
  double std_error{0.0};    ///< propagated error on lhs (0 if none)
  double sigma_margin{0.0}; ///< margin / std_error, 0 when std_error is 0
};

InequalityReport make_report(double lhs, double bound, double std_error = 0.0);

inline constexpr double kChshBound = 2.0;

/// |E11(phi) + E23(0)| + |E22(phi) + E23(0)|. Throws std::invalid_argument if
/// a correlation leaves [-1, 1] or phi leaves [0, pi].
double leggett_lhs(const LeggettInputs &in);

/// 4 - (4/pi)|sin(phi/2)|
double leggett_bound(double phi);

/// |E11 + E12 - E21 + E22|
double chsh_value(double e11, double e12, double e21, double e22);

/// 2 V (1 + cos phi)
double quantum_leggett_lhs(double phi, Visibility vis);

/// V (2 cos phi + sin phi): the CHSH combination of the Leggett settings,
/// where E11 = E22 = -V cos phi, E12 = 0 and E21 = V sin phi.
double quantum_chsh_at_settings(double phi, Visibility vis);

/// leggett_bound(phi) / (2 (1 + cos phi)); DegenerateAngle at phi = pi.
double critical_visibility_nlhv(double phi);

/// 2 / (2 cos phi + sin phi) for the Leggett settings, 1 at phi = 0.
double critical_visibility_chsh(double phi);

struct ChshCriticalVisibilities {
  double at_phi_max{0.0}; ///< Leggett-optimal settings
  double standard{0.0};   ///< single-plane CHSH optimum, 1/sqrt(2)
};
ChshCriticalVisibilities critical_visibility_chsh_here();

/// quantum_leggett_lhs(phi, V) - leggett_bound(phi)
double leggett_margin(double phi, Visibility vis = Visibility{1.0});

/// Angle of strongest relative violation: maximizes
/// quantum_leggett_lhs(phi, 1) / leggett_bound(phi) on (0, pi/2), which is
/// the angle with the lowest critical visibility (about 18.8 deg).
double find_phi_max();

/// Angle of largest absolute margin quantum - bound at V = 1 (about 18.3 deg).
double find_phi_max_margin();

struct ViolationWindow {
  double phi_low{0.0};
  double phi_high{0.0};
};

/// Roots of quantum_leggett_lhs(phi, V) = leggett_bound(phi) bracketing
/// find_phi_max(). Throws NoViolation below the critical visibility.
ViolationWindow violation_window(Visibility vis);

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
double golden_section_maximize(const std::function<double(double)> &f, double lo, double hi, double tol);

/// Bisection for a sign change of f on [lo, hi]; requires f(lo) f(hi) <= 0.
double bisect_root(const std::function<double(double)> &f, double lo, double hi, double tol);

} // namespace leggett
