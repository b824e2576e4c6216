#include "leggett/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "leggett/errors.hpp"

namespace leggett {

PoincareVector::PoincareVector(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("PoincareVector: cannot normalize a zero or non-finite vector");
  }
  v_ = {x / n, y / n, z / n};
}

std::string_view to_string(SettingPlane plane) {
  return plane == SettingPlane::Linear ? "linear" : "rotated";
}

SettingPlane parse_setting_plane(std::string_view name) {
  if (name == "linear" || name == "xz") return SettingPlane::Linear;
  if (name == "rotated" || name == "yz") return SettingPlane::Rotated;
  throw ConfigError("unknown setting plane '" + std::string(name) + "' (expected linear|rotated)");
}

PoincareVector polarizer_to_poincare(const PolarizerSetting &setting) {
  if (!std::isfinite(setting.angle_deg)) {
    throw std::invalid_argument("polarizer angle must be finite");
  }
  double theta = std::fmod(setting.angle_deg, 180.0);
  if (theta < 0.0) theta += 180.0;
  const double sphere = deg_to_rad(2.0 * theta);
  const double s = std::sin(sphere);
  const double c = std::cos(sphere);
  if (setting.plane == SettingPlane::Linear) return {s, 0.0, c};
  return {0.0, s, c};
}

double sphere_angle(const PoincareVector &a, const PoincareVector &b) {
  // atan2 keeps full precision near 0 and pi, where acos of the dot
  // product loses about half the digits.
  return std::atan2(norm(cross(a.vec(), b.vec())), dot(a, b));
}

Vec3 plane_normal(const Vec3 &a, const Vec3 &b) {
  const Vec3 n = cross(a, b);
  const double len = norm(n);
  if (len <= kPlaneTolerance) return {};
  return n * (1.0 / len);
}

bool planes_orthogonal(const PlanePair &planes) {
  const Vec3 n1 = plane_normal(planes.first_a, planes.first_b);
  const Vec3 n2 = plane_normal(planes.second_a, planes.second_b);
  const bool first_collinear = norm(n1) == 0.0;
  const bool second_collinear = norm(n2) == 0.0;
  if (first_collinear && second_collinear) {
    throw DegeneratePlane("both setting pairs are collinear; no plane to test");
  }
  if (first_collinear) return std::abs(dot(planes.first_a.vec(), n2)) <= kPlaneTolerance;
  if (second_collinear) return std::abs(dot(planes.second_a.vec(), n1)) <= kPlaneTolerance;
  return std::abs(dot(n1, n2)) <= kPlaneTolerance;
}

PoincareVector uniform_sphere_sample(Rng &rng) {
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

PoincareVector random_perpendicular(const PoincareVector &v, Rng &rng) {
  // Any helper axis not parallel to v gives a basis of the orthogonal circle.
  const Vec3 helper = std::abs(v.x()) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  const Vec3 p = cross(v.vec(), helper);
  const Vec3 e1 = p * (1.0 / norm(p));
  const Vec3 e2 = cross(v.vec(), e1);
  const double t = 2.0 * std::numbers::pi * uniform01(rng);
  return PoincareVector{e1 * std::cos(t) + e2 * std::sin(t)};
}

Frame random_frame(Rng &rng) {
  const PoincareVector e1 = uniform_sphere_sample(rng);
  const PoincareVector e2 = random_perpendicular(e1, rng);
  const PoincareVector e3{cross(e1.vec(), e2.vec())};
  return {e1, e2, e3};
}

} // namespace leggett
