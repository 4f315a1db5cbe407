#include "geoint/boundary.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <gmpxx.h>

namespace geoint {

namespace {

mpz_class to_mpz(Wide v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  mpz_class hi = static_cast<unsigned long>(u >> 64);
  mpz_class lo = static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL);
  mpz_class r = (hi << 64) + lo;
  return neg ? mpz_class(-r) : r;
}

// sign of x + y sqrt(k), k >= 0
int sign_xy(const mpz_class& x, const mpz_class& y, const mpz_class& k) {
  const int sx = sgn(x), sy = sgn(y);
  if (sy == 0 || sgn(k) == 0) return sx;
  if (sx == 0) return sy;
  if (sx == sy) return sx;
  const int c = cmp(x * x, y * y * k);
  if (c > 0) return sx;
  if (c < 0) return sy;
  return 0;
}

int sign_of_sum_exact(const mpz_class& a, const mpz_class& b, const mpz_class& m, const mpz_class& c,
                      const mpz_class& n) {
  const int sb = sgn(m) == 0 ? 0 : sgn(b);
  const int sc = sgn(n) == 0 ? 0 : sgn(c);
  int su;
  if (sb == 0) {
    su = sc;
  } else if (sc == 0 || sb == sc) {
    su = sb;
  } else {
    const int k = cmp(b * b * m, c * c * n);
    su = k > 0 ? sb : (k < 0 ? sc : 0);
  }
  const int sa = sgn(a);
  if (sa == 0) return su;
  if (su == 0 || su == sa) return su == 0 ? sa : su;
  // |u| vs |a| where u = b sqrt m + c sqrt n
  const mpz_class x = b * b * m + c * c * n - a * a;
  const mpz_class y = 2 * b * c;
  const int t = sign_xy(x, y, m * n);
  if (t > 0) return su;
  if (t < 0) return sa;
  return 0;
}

// exact decomposition x = mant * 2^exp
void split_long_double(Real x, mpz_class& mant, long& exp) {
  int e = 0;
  const Real m = std::frexp(x, &e);
  const Real scaled = std::ldexp(m < 0 ? -m : m, 64);
  const auto bits = static_cast<unsigned long long>(scaled);
  mant = static_cast<unsigned long>(bits);
  if (m < 0) mant = -mant;
  exp = static_cast<long>(e) - 64;
}

// sign of quad - x
int compare_quad_finite(const QuadIrrational& v, Real x) {
  const Real root = std::sqrt(static_cast<Real>(v.d));
  const Real num = static_cast<Real>(v.p) + static_cast<Real>(v.k) * root;
  const Real diff = num / static_cast<Real>(v.q) - x;
  const Real scale =
      (std::fabs(static_cast<Real>(v.p)) + std::fabs(static_cast<Real>(v.k)) * root) /
          static_cast<Real>(v.q) +
      std::fabs(x);
  if (std::fabs(diff) > 1e-15L * scale) return diff > 0 ? 1 : -1;

  // p - q x + k sqrt(d), with x = M 2^e
  mpz_class mant;
  long e;
  split_long_double(x, mant, e);
  mpz_class X, Y;
  const mpz_class p = static_cast<long>(v.p), q = static_cast<long>(v.q), k = static_cast<long>(v.k);
  if (e >= 0) {
    X = p - q * (mant << e);
    Y = k;
  } else {
    X = (p << -e) - q * mant;
    Y = k << -e;
  }
  return sign_xy(X, Y, mpz_class(static_cast<long>(v.d)));
}

}  // namespace

int sign_of_sum(Wide a, Wide b, Int m, Wide c, Int n) {
  const Real rm = std::sqrt(static_cast<Real>(m));
  const Real rn = std::sqrt(static_cast<Real>(n));
  const Real fa = static_cast<Real>(a), fb = static_cast<Real>(b) * rm, fc = static_cast<Real>(c) * rn;
  const Real v = fa + fb + fc;
  const Real scale = std::fabs(fa) + std::fabs(fb) + std::fabs(fc);
  if (std::fabs(v) > 1e-16L * scale) return v > 0 ? 1 : -1;
  return sign_of_sum_exact(to_mpz(a), to_mpz(b), mpz_class(static_cast<long>(m)), to_mpz(c),
                           mpz_class(static_cast<long>(n)));
}

QuadIrrational make_quad(Int p, Int k, Int d, Int q) {
  if (q == 0) throw std::invalid_argument("make_quad: zero denominator");
  if (d <= 0) throw std::invalid_argument("make_quad: radicand must be positive");
  if (q < 0) {
    p = -p;
    k = -k;
    q = -q;
  }
  Int g = gcd(gcd(p, k), q);
  if (g > 1) {
    p /= g;
    k /= g;
    q /= g;
  }
  return {p, k, d, q};
}

Real QuadIrrational::approx() const {
  const Real root = std::sqrt(static_cast<Real>(d));
  const Real fp = static_cast<Real>(p), fk = static_cast<Real>(k) * root;
  if ((p > 0 && k < 0) || (p < 0 && k > 0)) {
    // p + k sqrt(d) = (p^2 - k^2 d) / (p - k sqrt(d)) avoids cancellation
    const Wide num = static_cast<Wide>(p) * p - static_cast<Wide>(k) * k * d;
    return static_cast<Real>(num) / ((fp - fk) * static_cast<Real>(q));
  }
  return (fp + fk) / static_cast<Real>(q);
}

BoundaryPoint BoundaryPoint::finite(Real x) {
  if (!std::isfinite(x)) throw std::invalid_argument("BoundaryPoint::finite: non-finite value");
  BoundaryPoint b;
  b.kind_ = Kind::Finite;
  b.value_ = x;
  return b;
}

BoundaryPoint BoundaryPoint::quadratic(const QuadIrrational& v) {
  BoundaryPoint b;
  b.kind_ = Kind::Quadratic;
  b.quad_ = v;
  b.value_ = v.approx();
  return b;
}

BoundaryPoint BoundaryPoint::infinity() {
  BoundaryPoint b;
  b.kind_ = Kind::Infinity;
  b.value_ = std::numeric_limits<Real>::infinity();
  return b;
}

Real BoundaryPoint::approx() const { return value_; }

BoundaryPoint BoundaryPoint::apply(const Sl2z& m) const {
  switch (kind_) {
    case Kind::Infinity:
      if (m.r == 0) return infinity();
      return quadratic(make_quad(m.p, 0, 1, m.r));
    case Kind::Finite: {
      const Real den = static_cast<Real>(m.r) * value_ + static_cast<Real>(m.s);
      if (den == 0) return infinity();
      return finite((static_cast<Real>(m.p) * value_ + static_cast<Real>(m.q)) / den);
    }
    case Kind::Quadratic: {
      const Wide a = m.p, b = m.q, c = m.r, d = m.s;
      const Wide p = quad_.p, k = quad_.k, q = quad_.q, rad = quad_.d;
      const Wide lin_num = a * p + b * q;
      const Wide lin_den = c * p + d * q;
      const Wide x = lin_num * lin_den - a * c * k * k * rad;
      const Wide y = lin_den * lin_den - c * c * k * k * rad;
      const Wide kk = k * q;
      if (y == 0) return infinity();
      // reduce by the common factor before narrowing
      auto g128 = [](Wide u, Wide v) {
        u = u < 0 ? -u : u;
        v = v < 0 ? -v : v;
        while (v != 0) {
          Wide t = u % v;
          u = v;
          v = t;
        }
        return u;
      };
      Wide g = g128(g128(x, kk), y);
      if (g == 0) g = 1;
      return quadratic(make_quad(narrow(x / g), narrow(kk / g), quad_.d, narrow(y / g)));
    }
  }
  return *this;
}

std::ostream& operator<<(std::ostream& os, const BoundaryPoint& b) {
  switch (b.kind()) {
    case BoundaryPoint::Kind::Infinity: return os << "inf";
    case BoundaryPoint::Kind::Finite: return os << static_cast<double>(b.finite_value());
    case BoundaryPoint::Kind::Quadratic: {
      const auto& q = b.quad();
      return os << "(" << q.p << (q.k < 0 ? "-" : "+") << (q.k < 0 ? -q.k : q.k) << "*sqrt(" << q.d
                << "))/" << q.q;
    }
  }
  return os;
}

int compare(const BoundaryPoint& x, const BoundaryPoint& y) {
  using K = BoundaryPoint::Kind;
  if (x.kind() == K::Infinity || y.kind() == K::Infinity) {
    if (x.kind() == y.kind()) return 0;
    return x.kind() == K::Infinity ? 1 : -1;
  }
  if (x.kind() == K::Finite && y.kind() == K::Finite) {
    return x.finite_value() < y.finite_value() ? -1 : (x.finite_value() > y.finite_value() ? 1 : 0);
  }
  if (x.kind() == K::Quadratic && y.kind() == K::Finite) return compare_quad_finite(x.quad(), y.finite_value());
  if (x.kind() == K::Finite && y.kind() == K::Quadratic) return -compare_quad_finite(y.quad(), x.finite_value());
  const auto& u = x.quad();
  const auto& v = y.quad();
  // sign of (p1 + k1 r1)/q1 - (p2 + k2 r2)/q2 with q1, q2 > 0
  const Wide a = static_cast<Wide>(u.p) * v.q - static_cast<Wide>(v.p) * u.q;
  const Wide b = static_cast<Wide>(u.k) * v.q;
  const Wide c = -static_cast<Wide>(v.k) * u.q;
  if (u.d == v.d) return sign_of_sum(a, b + c, u.d, 0, 0);
  return sign_of_sum(a, b, u.d, c, v.d);
}

bool interlace(const BoundaryPoint& p1, const BoundaryPoint& p2, const BoundaryPoint& q1,
               const BoundaryPoint& q2) {
  const int c12 = compare(p1, p2);
  if (c12 == 0) return false;
  const BoundaryPoint& lo = c12 < 0 ? p1 : p2;
  const BoundaryPoint& hi = c12 < 0 ? p2 : p1;
  auto inside = [&](const BoundaryPoint& q, bool& shared) {
    const int a = compare(q, lo);
    const int b = compare(q, hi);
    if (a == 0 || b == 0) shared = true;
    return a > 0 && b < 0;
  };
  bool shared = false;
  const bool in1 = inside(q1, shared);
  const bool in2 = inside(q2, shared);
  if (shared) return false;
  return in1 != in2;
}

}  // namespace geoint
