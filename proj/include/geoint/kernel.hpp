#pragma once
// The modular intersection kernel: the indicator k that two forward arcs of
// length delta cross at an angle in a window, its average K over the modular
// group, and numerical checks of the identities built on it.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "geoint/bqf.hpp"
#include "geoint/hyperbolic.hpp"
#include "geoint/intersect.hpp"

namespace geoint {

struct KernelParams {
  Real delta = 0.05L;
  Real theta1 = 0;
  Real theta2 = kPi;
  AngleWindow window() const { return {theta1, theta2}; }
  /// Throws unless 0 < delta < 1 and 0 <= theta1 <= theta2 <= pi.
  void validate() const;
};

/// 1 if the forward delta-arcs from u1 and u2 cross at an angle in the
/// window, else 0. The angle is measured from the first arc to the second
/// and reduced mod pi. Arcs on a common geodesic never cross.
int k_delta(const UnitTangent& u1, const UnitTangent& u2, const KernelParams& p);

/// Every gamma in PSL2(Z) with dist(z1, gamma z2) < radius, normalised with
/// c > 0, or c = 0 and d = 1. Requires 0 < radius <= 4.
std::vector<Sl2z> enumerate_gamma_near(const Point& z1, const Point& z2, Real radius);

/// Reference search over words in T, T^-1 and S up to the given length; slow,
/// for cross-checking enumerate_gamma_near.
std::vector<Sl2z> enumerate_gamma_by_words(const Point& z1, const Point& z2, Real radius, int max_length);

/// K(u1, u2) = sum over the modular group of k_delta(u1, gamma u2).
int K_delta(const UnitTangent& u1, const UnitTangent& u2, const KernelParams& p);

/// Arc-length weight of a crossing at parameter t on the extended segment of
/// length l + delta: min(t / delta, 1, (l + delta - t) / delta).
Real crossing_weight(Real t, Real l, Real delta);

struct IdentityReport {
  std::string identity;
  std::vector<std::pair<std::string, Real>> parameters;
  Real lhs = 0;
  Real rhs = 0;
  Real abs_err = 0;
  Real rel_err = 0;
  Real stderr_ = -1;  // negative when not a statistical estimate
  bool passed = false;
  std::vector<std::pair<std::string, Real>> extra;
};
void write_json(std::ostream& os, const IdentityReport& r, std::uint64_t seed = 0, bool with_seed = false);

/// Monte Carlo estimate of the integral of k_delta((i, up), g) dV(g), with dV =
/// dx dy dtheta / y^2 and theta the Iwasawa angle, against
/// (cos theta1 - cos theta2) delta^2. Samples are drawn in a box that contains
/// every g with a non-zero integrand; passes within three standard errors.
/// The result does not depend on the thread count.
IdentityReport check_volume_identity(const KernelParams& p, std::size_t n_samples, std::uint64_t seed);

/// The same integral in the chart (t1, phi, t2) with density |sin phi| / 2,
/// evaluated deterministically on a grid aligned with the arc ends and the
/// window; `cells` is the number of cells per delta in t1 and t2.
IdentityReport check_volume_identity_psi(const KernelParams& p, std::size_t cells = 16);

struct CountIdentityOptions {
  std::size_t grid = 8;  // cells per delta in each direction, at least 8
  bool parallel = true;
};

/// (1/delta^2) times the integral of K over the product of the two oriented
/// families, by a grid aligned with the crossing rectangles and refined to
/// `grid` cells per delta, against the oriented crossing count in the window.
/// Passes when the rounded quadrature equals the count and lies within 1e-6 of it.
IdentityReport check_count_identity(const Discriminant& d1, const Discriminant& d2, const KernelParams& p,
                                    const CountIdentityOptions& opt = {});

/// True if the arc meets one of its own translates by a non-trivial element.
bool self_intersects(const GeodesicArc& segment);

/// (1/delta^2) times the integral of K over beta x (oriented C_d) against the
/// weighted count of crossings of beta extended forward by delta. Throws if
/// the extended segment intersects itself on the modular surface. Passes
/// within 1e-3.
IdentityReport check_weighted_identity(const GeodesicArc& beta, const Discriminant& d, const KernelParams& p,
                                       std::size_t grid = 8);

struct BlowupRow {
  Real height = 0;
  int value = 0;
};
struct BlowupReport {
  Real delta = 0;
  AngleWindow window{};
  std::vector<BlowupRow> rows;
  Real slope = 0;
  Real intercept = 0;
  Real r_squared = 0;
  bool monotone = false;
  bool passed = false;  // slope > 0 and r_squared >= 0.9
};

/// The tangent at height R whose forward delta-arc runs symmetrically over
/// the top of the semicircle |z| = R.
UnitTangent horocycle_tangent(Real R, Real delta);

/// K_delta(u, u) along horocycle_tangent(R, delta) and a least-squares line in R.
BlowupReport blowup_check(const KernelParams& p, const std::vector<Real>& heights);
void write_json(std::ostream& os, const BlowupReport& r);

}  // namespace geoint
