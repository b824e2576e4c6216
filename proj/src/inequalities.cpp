#include "leggett/inequalities.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "leggett/errors.hpp"

namespace leggett {
namespace {

constexpr double kPi = std::numbers::pi;

void require_correlation(double e, const char *name) {
  if (!(e >= -1.0 && e <= 1.0)) {
    throw std::invalid_argument(std::string("correlation ") + name + " must lie in [-1, 1]");
  }
}

} // namespace

InequalityReport make_report(double lhs, double bound, double std_error) {
  const double margin = lhs - bound;
  return {lhs, bound, margin, std_error, std_error > 0.0 ? margin / std_error : 0.0};
}

double leggett_lhs(const LeggettInputs &in) {
  require_correlation(in.e11_phi, "E11");
  require_correlation(in.e22_phi, "E22");
  require_correlation(in.e23_zero, "E23");
  if (!(in.phi >= 0.0 && in.phi <= kPi)) throw std::invalid_argument("phi must lie in [0, pi]");
  return std::abs(in.e11_phi + in.e23_zero) + std::abs(in.e22_phi + in.e23_zero);
}

double leggett_bound(double phi) { return 4.0 - (4.0 / kPi) * std::abs(std::sin(0.5 * phi)); }

double chsh_value(double e11, double e12, double e21, double e22) {
  return std::abs(e11 + e12 - e21 + e22);
}

double quantum_leggett_lhs(double phi, Visibility vis) {
  return 2.0 * vis.value() * (1.0 + std::cos(phi));
}

double quantum_chsh_at_settings(double phi, Visibility vis) {
  return vis.value() * (2.0 * std::cos(phi) + std::sin(phi));
}

double critical_visibility_nlhv(double phi) {
  const double quantum = quantum_leggett_lhs(phi, Visibility{1.0});
  if (quantum <= 1e-12) throw DegenerateAngle("critical visibility undefined at phi = pi");
  return leggett_bound(phi) / quantum;
}

double critical_visibility_chsh(double phi) {
  return kChshBound / quantum_chsh_at_settings(phi, Visibility{1.0});
}

ChshCriticalVisibilities critical_visibility_chsh_here() {
  return {critical_visibility_chsh(find_phi_max()), 1.0 / std::numbers::sqrt2};
}

double leggett_margin(double phi, Visibility vis) {
  return quantum_leggett_lhs(phi, vis) - leggett_bound(phi);
}

double golden_section_maximize(const std::function<double(double)> &f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_root(const std::function<double(double)> &f, double lo, double hi, double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::invalid_argument("bisect_root: no sign change on bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double find_phi_max() {
  const auto ratio = [](double phi) {
    return quantum_leggett_lhs(phi, Visibility{1.0}) / leggett_bound(phi);
  };
  return golden_section_maximize(ratio, 0.0, kPi / 2.0, 1e-8);
}

double find_phi_max_margin() {
  return golden_section_maximize([](double phi) { return leggett_margin(phi); }, 0.0, kPi / 2.0, 1e-8);
}

ViolationWindow violation_window(Visibility vis) {
  const double phi_max = find_phi_max();
  const double critical = critical_visibility_nlhv(phi_max);
  if (vis.value() < critical - 1e-12) {
    throw NoViolation("visibility " + std::to_string(vis.value()) + " is below the critical value " +
                      std::to_string(critical));
  }
  const auto f = [vis](double phi) { return leggett_margin(phi, vis); };
  if (f(phi_max) <= 0.0) return {phi_max, phi_max};

  constexpr double tol = 1e-12;
  const double low = f(0.0) >= 0.0 ? 0.0 : bisect_root(f, 0.0, phi_max, tol);
  const double high = bisect_root(f, phi_max, kPi, tol);
  return {low, high};
}

} // namespace leggett
