#pragma once
// Brute-force crossing counts for tests: every primitive form in a
// coefficient box is tested against a segment using only Euclidean circle
// geometry, independent of the library's candidate search and predicates.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "geoint/geodesics.hpp"

namespace geoint::testing {

// A segment described only by Euclidean data: a semicircle (centre, radius)
// or a vertical line, with the x or y range it covers.
struct PlainSegment {
  bool vertical = false;
  Real c = 0, R = 0;   // circle, or c = abscissa of the vertical line
  Real lo = 0, hi = 0;  // x range on the circle, y range on the line
};

inline PlainSegment plain(const Point& p, const Point& q) {
  PlainSegment s;
  if (std::fabs(p.x - q.x) < 1e-15L) {
    s.vertical = true;
    s.c = p.x;
    s.lo = std::min(p.y, q.y);
    s.hi = std::max(p.y, q.y);
    return s;
  }
  s.c = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2 * (q.x - p.x));
  s.R = std::hypot(p.x - s.c, p.y);
  s.lo = std::min(p.x, q.x);
  s.hi = std::max(p.x, q.x);
  return s;
}

struct OracleEvent {
  QuadForm form;  // a > 0
  Real angle = 0;
};

inline Real mod_pi(Real a) {
  a = std::fmod(a, kPi);
  return a < 0 ? a + kPi : a;
}

// Crossings of the segment with the axes of all primitive forms of
// discriminant d with |a| <= a_max and |b| <= b_max, unoriented (a > 0).
inline std::vector<OracleEvent> brute_crossings(const PlainSegment& s, Int d, Int a_max, Int b_max) {
  std::vector<OracleEvent> out;
  const Real sd = std::sqrt(static_cast<Real>(d));
  for (Int a = 1; a <= a_max; ++a) {
    for (Int b = -b_max; b <= b_max; ++b) {
      if ((b * b - d) % (4 * a) != 0) continue;
      const Int c = (b * b - d) / (4 * a);
      if (std::gcd(std::gcd(a, std::abs(b)), std::abs(c)) != 1) continue;
      const Real c2 = -static_cast<Real>(b) / (2 * a), R2 = sd / (2 * a);
      Real x, y;
      if (s.vertical) {
        if (std::fabs(s.c - c2) >= R2) continue;
        x = s.c;
        y = std::sqrt(R2 * R2 - (x - c2) * (x - c2));
        if (y < s.lo || y > s.hi) continue;
      } else {
        const Real gap = std::fabs(s.c - c2);
        if (!(gap > std::fabs(s.R - R2) && gap < s.R + R2)) continue;
        x = (s.R * s.R - R2 * R2 - s.c * s.c + c2 * c2) / (2 * (c2 - s.c));
        if (x < s.lo || x > s.hi) continue;
        y = std::sqrt(s.R * s.R - (x - s.c) * (x - s.c));
      }
      const Real t1 = s.vertical ? kPi / 2 : std::atan2(x - s.c, -y);
      const Real t2 = std::atan2(x - c2, -y);
      out.push_back({{a, b, c}, mod_pi(t2 - t1)});
    }
  }
  return out;
}

inline std::vector<OracleEvent> brute_crossings_auto(const Point& p, const Point& q, Int d) {
  const auto s = plain(p, q);
  const Real ymin = std::min(p.y, q.y) * 0.5L;  // safety factor 2 on the height
  const Int a_max = static_cast<Int>(std::sqrt(static_cast<Real>(d)) / (2 * ymin)) + 1;
  const Real xmax = std::max({std::fabs(p.x), std::fabs(q.x), std::fabs(s.c) + s.R});
  const Int b_max = static_cast<Int>(4 * a_max * xmax + 2 * std::sqrt(static_cast<Real>(d))) + 2;
  return brute_crossings(s, d, a_max, b_max);
}

// Crossings of one period of each member of d1 with every oriented form of
// d2, by the brute-force scan over the Euclidean arc.
inline std::size_t brute_pair_total(Int d1, Int d2) {
  const auto fam = family(validate_discriminant(d1));
  std::size_t total = 0;
  for (const auto& m : fam.members) {
    const Real L = m.length();
    // roughly centred on the apex, so the lowest point of the period stays
    // high, but offset from the apex where the library starts its walk
    const Real t0 = -0.4827L * L;
    const auto& q = m.form;
    const Real c = -static_cast<Real>(q.b) / (2 * q.a);
    const Real R = std::sqrt(static_cast<Real>(d1)) / (2 * std::abs(static_cast<Real>(q.a)));
    const Real sigma = q.a > 0 ? 1 : -1;
    auto at = [&](Real t) { return Point{c + sigma * R * std::tanh(t), R / std::cosh(t)}; };
    // one arc of a semicircle is a graph over x with its lowest point at an
    // end, so the scan takes the whole period at once
    total += 2 * brute_crossings_auto(at(t0), at(t0 + L), d2).size();  // q and -q
  }
  return total;
}

}  // namespace geoint::testing
