#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "leggett/random.hpp"

namespace leggett {

/// Plain 3-vector. Used for intermediate quantities such as plane normals;
/// anything that represents a polarization or setting is a PoincareVector.
struct Vec3 {
  double x{0.0}, y{0.0}, z{0.0};

  constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  friend constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }
};

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3 &v) { return std::sqrt(dot(v, v)); }

/// Unit vector on the Poincare sphere.
///
/// Axis convention: +z is horizontal linear polarization (H), -z vertical,
/// +x/-x are +45/-45 degree linear, +y/-y are right/left circular. The norm is
/// 1 to within 1e-12 after construction.
class PoincareVector {
public:
  /// +z (horizontal polarization).
  PoincareVector() = default;

  /// Normalizes (x, y, z); throws std::invalid_argument for a zero or
  /// non-finite input.
  PoincareVector(double x, double y, double z);
  explicit PoincareVector(const Vec3 &v) : PoincareVector(v.x, v.y, v.z) {}

  double x() const noexcept { return v_.x; }
  double y() const noexcept { return v_.y; }
  double z() const noexcept { return v_.z; }
  const Vec3 &vec() const noexcept { return v_; }
  operator const Vec3 &() const noexcept { return v_; }

  PoincareVector operator-() const { return PoincareVector{-v_, Unchecked{}}; }

  static PoincareVector unit_x() { return {1.0, 0.0, 0.0}; }
  static PoincareVector unit_y() { return {0.0, 1.0, 0.0}; }
  static PoincareVector unit_z() { return {0.0, 0.0, 1.0}; }

private:
  struct Unchecked {};
  PoincareVector(const Vec3 &v, Unchecked) : v_(v) {}

  Vec3 v_{0.0, 0.0, 1.0};
};

inline double dot(const PoincareVector &a, const PoincareVector &b) { return dot(a.vec(), b.vec()); }

/// Polarizer plane on the sphere. Linear settings sweep the x-z great circle;
/// Rotated settings have a quarter-wave plate (fast axis at 0 deg) in front
/// of the polarizer, which moves them onto the y-z great circle.
enum class SettingPlane { Linear, Rotated };

std::string_view to_string(SettingPlane plane);
/// Accepts "linear" / "rotated" (also "xz" / "yz"); throws ConfigError.
SettingPlane parse_setting_plane(std::string_view name);

/// Laboratory polarizer orientation in degrees.
struct PolarizerSetting {
  double angle_deg{0.0};
  SettingPlane plane{SettingPlane::Linear};
};

/// Laboratory angle theta maps to sphere angle 2*theta:
/// Linear -> (sin 2t, 0, cos 2t), Rotated -> (0, sin 2t, cos 2t).
/// The angle is reduced mod 180 deg first. Throws std::invalid_argument for
/// a non-finite angle.
PoincareVector polarizer_to_poincare(const PolarizerSetting &setting);

/// Great-circle angle in [0, pi].
double sphere_angle(const PoincareVector &a, const PoincareVector &b);

/// Two setting pairs, (a, b) spanning the first plane and (a', b') the second.
struct PlanePair {
  PoincareVector first_a, first_b;
  PoincareVector second_a, second_b;
};

inline constexpr double kPlaneTolerance = 1e-9;

/// True iff the planes spanned by the two pairs are orthogonal (normals
/// orthogonal to within 1e-9). A collinear pair has no unique plane; it is
/// accepted iff its direction lies in the other pair's plane, i.e. the pair
/// sits on the intersection line of two orthogonal planes. Throws
/// DegeneratePlane when both pairs are collinear.
bool planes_orthogonal(const PlanePair &planes);

/// Unit normal of span(a, b), or nothing (zero vector) when a and b are
/// collinear to within kPlaneTolerance.
Vec3 plane_normal(const Vec3 &a, const Vec3 &b);

/// Uniform point on S^2 (z uniform in [-1, 1], azimuth uniform).
PoincareVector uniform_sphere_sample(Rng &rng);

/// Right-handed orthonormal frame drawn uniformly (Haar) from SO(3).
struct Frame {
  PoincareVector e1, e2, e3;
};
Frame random_frame(Rng &rng);

/// Unit vector perpendicular to v, drawn uniformly from the great circle
/// orthogonal to v.
PoincareVector random_perpendicular(const PoincareVector &v, Rng &rng);

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

} // namespace leggett
