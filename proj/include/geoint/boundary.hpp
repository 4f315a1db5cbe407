#pragma once
// Points of the boundary R u {inf} of the upper half-plane. Feet of
// arithmetic geodesics are kept as exact quadratic irrationals so that the
// crossing predicate never depends on rounding.

#include <iosfwd>

#include "geoint/types.hpp"

namespace geoint {

/// (p + k sqrt(d)) / q with q > 0 and d > 0.
struct QuadIrrational {
  Int p = 0;
  Int k = 0;
  Int d = 1;
  Int q = 1;

  Real approx() const;
  friend bool operator==(const QuadIrrational&, const QuadIrrational&) = default;
};

/// Build (p + k sqrt d) / q, normalising the sign of q.
QuadIrrational make_quad(Int p, Int k, Int d, Int q);

class BoundaryPoint {
 public:
  enum class Kind { Finite, Quadratic, Infinity };

  BoundaryPoint() = default;
  static BoundaryPoint finite(Real x);
  static BoundaryPoint quadratic(const QuadIrrational& v);
  static BoundaryPoint infinity();

  Kind kind() const { return kind_; }
  bool is_infinite() const { return kind_ == Kind::Infinity; }
  /// Nearest long double; +inf for the point at infinity.
  Real approx() const;
  const QuadIrrational& quad() const { return quad_; }
  Real finite_value() const { return value_; }

  /// Exact image under an integer Moebius map.
  BoundaryPoint apply(const Sl2z& m) const;

  friend std::ostream& operator<<(std::ostream& os, const BoundaryPoint& b);

 private:
  Kind kind_ = Kind::Finite;
  Real value_ = 0;
  QuadIrrational quad_{};
};

/// Exact three-way comparison on the real line; infinity is larger than every
/// finite point and equal to itself.
int compare(const BoundaryPoint& x, const BoundaryPoint& y);

/// Exact sign of a + b sqrt(m) + c sqrt(n) (m, n >= 0). Exposed for testing.
int sign_of_sum(Wide a, Wide b, Int m, Wide c, Int n);

/// True iff the chords {p1, p2} and {q1, q2} strictly interlace on the circle
/// R u {inf}. Shared endpoints never interlace.
bool interlace(const BoundaryPoint& p1, const BoundaryPoint& p2, const BoundaryPoint& q1,
               const BoundaryPoint& q2);

}  // namespace geoint
