#pragma once
// Closed geodesics of discriminant d as concrete arcs in H, the oriented
// family of all of them, and line integrals along the family.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "geoint/bqf.hpp"
#include "geoint/hyperbolic.hpp"

namespace geoint {

/// The oriented closed geodesic of a form: its axis with the base window
/// [0, 2 log eps) measured from the apex.
struct ClosedGeodesic {
  QuadForm form;
  Int d = 0;
  Automorph automorph;
  GeodesicArc axis;

  Real length() const { return axis.length(); }
  /// Euclidean gap between automorph(window start) and the window end, with
  /// the direction gap; nullopt when the automorph entries overflow long double.
  std::optional<Real> closure_error() const;
};

ClosedGeodesic closed_geodesic(const QuadForm& q);
ClosedGeodesic closed_geodesic(const QuadForm& q, const PellUnit& unit);

/// A stretch of a closed geodesic carried next to the fundamental domain:
/// `arc` is a window on the axis of the translate `form`, and `start` is the
/// arc length from the base point of the geodesic to the window start.
struct Piece {
  QuadForm form;
  GeodesicArc arc;
  Real start = 0;
  std::size_t index = 0;
};

/// Cut the base window into half-open pieces of length at most `max_piece`,
/// each moved by an integer map so that it starts in the fundamental domain.
std::vector<Piece> walk(const ClosedGeodesic& g, Real max_piece = 1);

/// Distance in SH between the end of the last piece and the start of the
/// first, after reduction to the fundamental domain; zero for exact closure.
Real walk_closure_error(const std::vector<Piece>& pieces);

struct GeodesicFamily {
  Discriminant disc;
  ClassSet classes;
  PellUnit unit;
  std::vector<ClosedGeodesic> members;  // one per class; -q is a member class of its own
  TotalLengths lengths;

  /// Ambiguous classes give one unoriented geodesic each, the others pair up.
  std::size_t unoriented_count() const;
  Real oriented_length() const;
};

GeodesicFamily family(const Discriminant& d);

using TangentFunction = std::function<Real(const UnitTangent&)>;

/// Smooth bump exp(1 - 1/(1 - r^2)), r = dist(z, center) / radius, of the base
/// point only. The ball must lie inside the fundamental domain so that the
/// function is well defined on the quotient.
TangentFunction bump_function(const Point& center, Real radius);

/// Default node count max(64, ceil(256 * length)).
std::size_t default_nodes(Real length);

/// Midpoint rule along every member, each node reduced to the fundamental
/// domain before f is evaluated. `nodes` = 0 selects default_nodes per member.
Real integrate_along(const TangentFunction& f, const GeodesicFamily& fam, std::size_t nodes = 0);
/// Single-threaded reference of integrate_along.
Real integrate_along_serial(const TangentFunction& f, const GeodesicFamily& fam, std::size_t nodes = 0);

/// Integral of f over SX = F x [0, pi) against dx dy dtheta / y^2, by
/// composite Gauss-Legendre in x and 1/y and the midpoint rule in the angle.
Real haar_integral(const TangentFunction& f, std::size_t x_panels = 16, std::size_t u_panels = 32,
                   std::size_t angle_nodes = 32);

struct DukeRow {
  Int d = 0;
  Int h = 0;
  Real log_eps = 0;
  Real period = 0;  // mu_d(f) / l(oriented family)
  Real target = 0;  // (3 / pi^2) * integral of f
  Real deviation = 0;
};

/// Normalised periods against the equidistribution target. If `target` is
/// not supplied it is computed with haar_integral.
std::vector<DukeRow> duke_test(const TangentFunction& f, const std::vector<Int>& d_list,
                               std::optional<Real> target = std::nullopt, std::size_t nodes = 0);

void write_duke_json(std::ostream& os, const std::vector<DukeRow>& rows);

}  // namespace geoint
