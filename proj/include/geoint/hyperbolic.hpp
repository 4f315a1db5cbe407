#pragma once
// Geometry of the upper half-plane H and of its unit tangent bundle SH,
// identified with PSL2(R) through g -> g.(i, up).
//
// Tangent directions are stored as the Euclidean angle omega in [0, 2 pi) of
// the tangent vector. The Iwasawa angle theta of g = n(x) a(y) R_theta is a
// derived quantity: R_theta rotates the upward vector at i by -2 theta, so
// omega = pi/2 - 2 theta (mod 2 pi).

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "geoint/boundary.hpp"
#include "geoint/types.hpp"

namespace geoint {

struct Point {
  Real x = 0;
  Real y = 1;
};

struct UnitTangent {
  Real x = 0;
  Real y = 1;
  Real theta = 0;  // direction angle of the tangent vector, in [0, 2 pi)
};

/// Reduce an angle to [0, 2 pi).
Real wrap_two_pi(Real a);
/// Reduce an angle to [0, pi).
Real wrap_pi(Real a);

/// Real 2x2 matrix of determinant one acting by fractional linear maps.
struct Moebius {
  Real a = 1, b = 0, c = 0, d = 1;

  static Moebius from(const Sl2z& m);
  static Moebius translation(Real x) { return {1, x, 0, 1}; }
  /// a(y) = diag(sqrt y, 1/sqrt y): z -> y z.
  static Moebius dilation(Real y);
  /// R_theta = (cos, -sin; sin, cos): fixes i, rotates tangents there by -2 theta.
  static Moebius rotation(Real theta);

  Real det() const { return a * d - b * c; }
  Moebius inverse() const { return {d, -b, -c, a}; }
  friend Moebius operator*(const Moebius& m, const Moebius& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d};
  }
};

Point mobius_apply(const Moebius& m, const Point& p);
Point mobius_apply(const Sl2z& m, const Point& p);
UnitTangent mobius_apply(const Moebius& m, const UnitTangent& u);
UnitTangent mobius_apply(const Sl2z& m, const UnitTangent& u);

/// Hyperbolic distance arccosh(1 + |z - w|^2 / (2 y1 y2)), evaluated in the
/// cancellation-free form 2 asinh(|z - w| / (2 sqrt(y1 y2))).
Real dist(const Point& p, const Point& q);

struct Iwasawa {
  Real x = 0;
  Real y = 1;
  Real theta = 0;  // in [0, pi)
};

Iwasawa iwasawa(const Moebius& g);
Moebius compose_from_iwasawa(const Iwasawa& w);
/// g.(i, up).
UnitTangent tangent_of(const Moebius& g);
/// The g with tangent_of(g) == u.
Moebius group_element(const UnitTangent& u);
Real iwasawa_theta_of_direction(Real omega);
Real direction_of_iwasawa_theta(Real theta);

/// Move a distance t along the geodesic flow: g -> g a(e^t).
UnitTangent flow(const UnitTangent& u, Real t);

/// A complete oriented geodesic of H (from foot_minus towards foot_plus),
/// together with a half-open arc-length window [lo, hi).
///
/// Arc length is measured from the apex of a semicircle, and from height 1
/// for vertical lines. On a semicircle with centre c, radius R and
/// sigma = +1 when travelling rightwards, the point at parameter t is
/// (c + sigma R tanh t, R sech t) and its direction is atan2(-sinh t, sigma).
class GeodesicArc {
 public:
  GeodesicArc() = default;
  static GeodesicArc from_feet(const BoundaryPoint& foot_minus, const BoundaryPoint& foot_plus);
  /// Axis of the form (a, b, c): from (-b - sqrt d)/(2a) to (-b + sqrt d)/(2a).
  static GeodesicArc axis_of(Int a, Int b, Int d);

  const BoundaryPoint& foot_minus() const { return minus_; }
  const BoundaryPoint& foot_plus() const { return plus_; }
  bool vertical() const { return vertical_; }
  /// Centre of the semicircle, or abscissa of a vertical line.
  Real center() const { return center_; }
  Real radius() const { return radius_; }
  /// +1 when the arc travels rightwards (or upwards for vertical lines).
  int sigma() const { return sigma_; }

  Real lo() const { return lo_; }
  Real hi() const { return hi_; }
  bool full() const;
  Real length() const { return hi_ - lo_; }
  GeodesicArc with_window(Real lo, Real hi) const;
  bool in_window(Real t) const { return t >= lo_ && t < hi_; }

  Point point_at(Real t) const;
  Real direction_at(Real t) const;
  UnitTangent tangent_at(Real t) const;
  /// Arc-length parameter of a point on the geodesic.
  Real param_of(const Point& p) const;
  /// Euclidean apex (the point at parameter 0).
  Point apex() const { return point_at(0); }

 private:
  BoundaryPoint minus_, plus_;
  bool vertical_ = false;
  Real center_ = 0;
  Real radius_ = 1;
  int sigma_ = 1;
  Real lo_ = -std::numeric_limits<Real>::infinity();
  Real hi_ = std::numeric_limits<Real>::infinity();
};

/// Image of an arc, feet mapped exactly; the window is carried along.
GeodesicArc mobius_apply(const Sl2z& m, const GeodesicArc& g);
GeodesicArc mobius_apply(const Moebius& m, const GeodesicArc& g);

/// Geodesic tangent to u, oriented along u, with the full window. The
/// parameter of u's base point is returned through `param`.
GeodesicArc geodesic_through(const UnitTangent& u, Real* param = nullptr);
/// The forward arc of the given length starting at u.
GeodesicArc forward_arc(const UnitTangent& u, Real length);

struct Crossing {
  Point point;
  Real angle = 0;           // counter-clockwise from g1 to g2, reduced to (0, pi)
  Real oriented_angle = 0;  // the same angle in (0, 2 pi)
  Real param1 = 0;
  Real param2 = 0;
  bool near_tangent = false;  // angle within 1e-9 of 0 or pi
};

inline constexpr Real kAngleTolerance = 1e-9L;

/// Crossing of the complete geodesics, if their feet interlace.
std::optional<Crossing> crossing_of_lines(const GeodesicArc& g1, const GeodesicArc& g2);
/// Crossing restricted to both windows.
std::optional<Crossing> intersect_arcs(const GeodesicArc& g1, const GeodesicArc& g2);

struct Reduced {
  Point point;
  Sl2z map;  // mobius_apply(map, input) == point
};
struct ReducedTangent {
  UnitTangent tangent;
  Sl2z map;
};

/// |x| <= 1/2 and |z| >= 1; ties go to x = -1/2 and to the left half of the
/// unit arc.
bool in_fundamental_domain(const Point& p);
Reduced reduce_to_fundamental_domain(const Point& p);
ReducedTangent reduce_to_fundamental_domain(const UnitTangent& u);

/// Psi(t1, phi, t2) = a(e^t1) R_{phi/2} a(e^-t2), as a unit tangent.
UnitTangent psi_map(Real t1, Real phi, Real t2);
Moebius psi_element(Real t1, Real phi, Real t2);

struct PsiDensity {
  Real value = 0;
  bool singular = false;  // phi = 0 mod pi
};
/// Haar density dx dy dtheta / y^2 pulled back through Psi, by central
/// differences of (t1, phi, t2) -> (x, y, theta_iwasawa).
PsiDensity psi_density(Real t1, Real phi, Real t2);

struct HaarConstants {
  Real volume_sx = 0;    // pi^2 / 3
  Real base_volume = 0;  // pi / 3
  Real fiber = 0;        // pi, the range of the Iwasawa angle
  std::string density;
};
HaarConstants haar_volume_constants();

struct VolumeEstimate {
  Real estimate = 0;
  Real stderr_ = 0;
};
/// Monte Carlo volume of the fundamental domain times the angle fibre.
VolumeEstimate fundamental_domain_volume_mc(std::size_t samples, std::uint64_t seed);

}  // namespace geoint
