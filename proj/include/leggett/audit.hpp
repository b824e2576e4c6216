#pragma once

// Numerical audit of the derivation of the Leggett-type bound: each lemma is
// checked pointwise on sampled inputs, and the final inequality is checked
// end to end on the hidden-variable model with random sources and
// random orthogonal-plane geometries.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "leggett/estimate.hpp"
#include "leggett/geometry.hpp"
#include "leggett/nlhv_model.hpp"
#include "leggett/random.hpp"

namespace leggett {

inline constexpr double kAuditTolerance = 1e-12;

/// -1 + |A + B| == AB == 1 - |A - B| for A, B in {-1, +1}.
/// Throws std::invalid_argument for other inputs.
bool check_dichotomic_identity(int a, int b);

/// Probabilities of (A, B) = (+,+), (+,-), (-,+), (-,-).
using OutcomeDistribution = std::array<double, 4>;

/// -1 + |<A> + <B>| <= <AB> <= 1 - |<A> - <B>|. Throws std::invalid_argument
/// unless the probabilities are nonnegative and sum to 1 (within 1e-9).
bool check_modulus_bound(const OutcomeDistribution &dist);

/// (1/2pi) * integral over [0, 2pi) of |cos(xi + offset)|, by composite
/// Simpson on the pieces between the kinks (1e5 nodes in total).
double xi_average_abs_cos(double offset);

/// |cos((phi - chi)/2)| + |cos((phi' - chi)/2)| >= |sin((phi - phi')/2)| and
/// the same with sines on the left.
bool check_sine_difference_bounds(double phi, double phi_prime, double chi);

/// ||x + y|| <= ||x|| + ||y|| in the plane.
bool check_triangle_inequality(const std::array<double, 2> &x, const std::array<double, 2> &y);

/// Plane of measurement settings with an orthonormal in-plane basis.
struct MeasurementPlane {
  PoincareVector e1, e2;

  /// Basis from two non-collinear vectors; throws DegeneratePlane otherwise.
  static MeasurementPlane spanned_by(const PoincareVector &a, const PoincareVector &b);
  Vec3 normal() const { return cross(e1.vec(), e2.vec()); }
  /// Unit vector at in-plane angle t from e1 toward e2.
  PoincareVector direction(double t) const;
  /// Angle of the projection of w, in (-pi, pi].
  double angle_of(const Vec3 &w) const;
  /// Length of the projection of w onto the plane.
  double projection_length(const Vec3 &w) const;
};

/// Angles of one setting pair (a, b) and one polarization pair (u, v) in a
/// plane, plus the decomposition u_kl = n1 + n2, v_kl = n1 - n2 of the
/// projection lengths.
struct PlaneAngles {
  double xi{0.0};  ///< (phi_a + phi_b)/2
  double phi{0.0}; ///< phi_a - phi_b
  double psi{0.0}; ///< (phi_u + phi_v)/2
  double chi{0.0}; ///< phi_u - phi_v
  double n1{0.0};
  double n2{0.0};
  double u_len{0.0};
  double v_len{0.0};
};

PlaneAngles plane_angles(const PoincareVector &u, const PoincareVector &v, const PoincareVector &a,
                         const PoincareVector &b, const MeasurementPlane &plane);

/// u.a - v.b == 2 [n2 cos((phi - chi)/2) cos(xi - psi) - n1 sin((phi - chi)/2) sin(xi - psi)]
/// for settings a, b lying in the plane.
bool check_harmonic_decomposition(const PoincareVector &u, const PoincareVector &v,
                                  const PoincareVector &a, const PoincareVector &b,
                                  const MeasurementPlane &plane);

/// u_kl^2 + u_pq^2 >= 1 (and for v) and
/// sqrt(u_kl^2 + v_kl^2) + sqrt(u_pq^2 + v_pq^2) >= sqrt(2) for orthogonal
/// planes. Throws GeometryError if the planes are not orthogonal or a pair is
/// collinear.
bool check_projection_bound(const PoincareVector &u, const PoincareVector &v, const PlanePair &planes);

/// Model subensemble satisfies -1 + |u.a + v.b| <= <AB> <= 1 - |u.a - v.b|.
bool check_malus_product_bound(const PoincareVector &a, const PoincareVector &b,
                               const PoincareVector &u, const PoincareVector &v, IntervalPolicy policy);

/// Model correlation averaged over a uniform grid of n_xi mean angles
/// xi_j = 2 pi j / n_xi, with a(xi) at xi + phi/2 and b(xi) at xi - phi/2 in
/// the plane; n_mc source-and-lambda samples per grid point.
CorrelationEstimate rotation_averaged_correlation(const SourceModel &source, const MeasurementPlane &plane,
                                                  double phi, std::size_t n_xi, std::uint64_t n_mc,
                                                  Rng &rng, IntervalPolicy policy = IntervalPolicy::Strict);

struct LemmaTally {
  std::string name;
  std::uint64_t checks{0};
  std::uint64_t failures{0};
};

struct LemmaSizes {
  std::uint64_t modulus{100000};
  std::uint64_t xi_offsets{100};
  std::uint64_t sine_difference{1000000};
  std::uint64_t projection{1000000};
  std::uint64_t triangle{1000000};
  std::uint64_t harmonic{100000};
  std::uint64_t malus_product{100000};
};

/// Runs every lemma check on sampled inputs (identity exhaustively).
std::vector<LemmaTally> run_lemma_checks(const LemmaSizes &sizes, Rng &rng);

struct AuditOptions {
  std::uint64_t trials{100};
  std::size_t n_xi{360};
  std::uint64_t n_mc{64};
  double sigma_threshold{4.0};
  /// MalusPreserving keeps every source usable. Strict excludes trials whose
  /// sources leave the valid region (counted separately).
  IntervalPolicy policy{IntervalPolicy::MalusPreserving};
};

struct AuditTrial {
  double phi{0.0};
  std::string source_kind;
  std::size_t source_pairs{0};
  double lhs{0.0};
  double std_error{0.0};
  double bound{0.0};
  bool passed{true};
};

struct AuditReport {
  std::uint64_t trials{0};
  std::uint64_t passes{0};
  std::uint64_t failures{0};
  std::uint64_t excluded_invalid{0};
  double worst_margin{-1e300};    ///< max over trials of lhs - bound
  double worst_sigma{-1e300};     ///< max of (lhs - bound)/std_error
  std::vector<AuditTrial> records;
};

/// One end-to-end trial of the final inequality for a given source and
/// geometry. Orthogonal planes span(e1, e2) and span(e1, e3) of the frame.
AuditTrial audit_trial(const SourceModel &source, const Frame &frame, double phi,
                       const AuditOptions &options, Rng &rng);

/// Random sources, frames and phi; trial t draws from make_stream(seed, t).
AuditReport audit_full_chain(const AuditOptions &options, std::uint64_t seed);

} // namespace leggett
