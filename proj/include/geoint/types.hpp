#pragma once

#include <cstdint>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace geoint {

/// Machine integer used for form coefficients and modular matrices.
using Int = std::int64_t;
using Wide = __int128;

/// Floating type for geometry. x86 long double carries a 64-bit mantissa.
using Real = long double;

inline constexpr Real kPi = std::numbers::pi_v<Real>;

/// Multiply with overflow detection.
inline Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in multiplication");
  return r;
}

inline Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in addition");
  return r;
}

inline Int narrow(Wide v) {
  if (v > static_cast<Wide>(INT64_MAX) || v < static_cast<Wide>(INT64_MIN))
    throw std::overflow_error("integer does not fit in 64 bits");
  return static_cast<Int>(v);
}

/// floor(sqrt(n)) for n >= 0.
Int isqrt(Int n);
bool is_square(Int n);
Int gcd(Int a, Int b);
/// floor division and non-negative remainder.
inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline Int mod_floor(Int a, Int b) { return a - floor_div(a, b) * b; }

/// An element of SL2(Z), stored exactly. Acts on the upper half-plane by
/// z -> (p z + q) / (r z + s).
struct Sl2z {
  Int p = 1, q = 0, r = 0, s = 1;

  static Sl2z identity() { return {}; }
  static Sl2z translation(Int n) { return {1, n, 0, 1}; }
  static Sl2z inversion() { return {0, -1, 1, 0}; }

  Int det() const { return narrow(static_cast<Wide>(p) * s - static_cast<Wide>(q) * r); }
  Sl2z inverse() const { return {s, -q, -r, p}; }
  Sl2z negated() const { return {-p, -q, -r, -s}; }
  /// Equality in PSL2(Z).
  bool projectively_equal(const Sl2z& o) const {
    return (*this == o) || (*this == o.negated());
  }
  friend Sl2z operator*(const Sl2z& a, const Sl2z& b) {
    auto mul = [](Int x, Int y, Int u, Int v) {
      return narrow(static_cast<Wide>(x) * y + static_cast<Wide>(u) * v);
    };
    return {mul(a.p, b.p, a.q, b.r), mul(a.p, b.q, a.q, b.s), mul(a.r, b.p, a.s, b.r),
            mul(a.r, b.q, a.s, b.s)};
  }
  friend bool operator==(const Sl2z&, const Sl2z&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Sl2z& m) {
    return os << "(" << m.p << "," << m.q << ";" << m.r << "," << m.s << ")";
  }
};

}  // namespace geoint
