#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "geoint/kernel.hpp"

using namespace geoint;

namespace {

// A forward arc of length delta from a tangent, in plain Euclidean terms.
struct PlainArc {
  bool vertical = false;
  Real c = 0, R = 0;    // centre and radius, or c = abscissa of the line
  Real lo = 0, hi = 0;  // covered x range, or y range on a vertical line
};

PlainArc plain_arc(const UnitTangent& u, Real delta) {
  PlainArc a;
  const Real ct = std::cos(u.theta), st = std::sin(u.theta);
  if (std::fabs(ct) < 1e-12L) {
    a.vertical = true;
    a.c = u.x;
    const Real end = st > 0 ? u.y * std::exp(delta) : u.y * std::exp(-delta);
    a.lo = std::min(u.y, end);
    a.hi = std::max(u.y, end);
    return a;
  }
  // the centre lies where the normal to the direction meets the real axis
  a.c = u.x + u.y * st / ct;
  a.R = std::hypot(u.x - a.c, u.y);
  // x = c + R tanh s runs rightwards in s
  const Real s0 = std::atanh((u.x - a.c) / a.R);
  const Real s1 = ct > 0 ? s0 + delta : s0 - delta;
  const Real x1 = a.c + a.R * std::tanh(s1);
  a.lo = std::min(u.x, x1);
  a.hi = std::max(u.x, x1);
  return a;
}

struct PlainCrossing {
  Real angle = 0;   // mod pi, from arc 1 to arc 2
  Real margin = 0;  // distance of the crossing from the nearest arc end, in the covered coordinate
};

Real mod_pi(Real a) {
  a = std::fmod(a, kPi);
  return a < 0 ? a + kPi : a;
}

std::optional<PlainCrossing> plain_crossing(const PlainArc& a1, const PlainArc& a2) {
  Real x, y;
  if (a1.vertical && a2.vertical) return std::nullopt;
  if (a1.vertical || a2.vertical) {
    const PlainArc& v = a1.vertical ? a1 : a2;
    const PlainArc& s = a1.vertical ? a2 : a1;
    if (std::fabs(v.c - s.c) >= s.R) return std::nullopt;
    x = v.c;
    y = std::sqrt(s.R * s.R - (x - s.c) * (x - s.c));
  } else {
    const Real gap = std::fabs(a1.c - a2.c);
    if (!(gap > std::fabs(a1.R - a2.R) && gap < a1.R + a2.R)) return std::nullopt;
    x = (a1.R * a1.R - a2.R * a2.R - a1.c * a1.c + a2.c * a2.c) / (2 * (a2.c - a1.c));
    y = std::sqrt(a1.R * a1.R - (x - a1.c) * (x - a1.c));
  }
  auto inside = [&](const PlainArc& a) { return a.vertical ? std::min(y - a.lo, a.hi - y) : std::min(x - a.lo, a.hi - x); };
  const Real m = std::min(inside(a1), inside(a2));
  if (m < 0) return std::nullopt;
  auto dir = [&](const PlainArc& a) { return a.vertical ? kPi / 2 : std::atan2(x - a.c, -y); };
  return PlainCrossing{mod_pi(dir(a2) - dir(a1)), m};
}

// Oracle for k_delta; nullopt when the answer sits within 1e-9 of a decision boundary.
std::optional<int> k_oracle(const UnitTangent& u1, const UnitTangent& u2, const KernelParams& p) {
  const auto c = plain_crossing(plain_arc(u1, p.delta), plain_arc(u2, p.delta));
  if (!c) return 0;
  if (c->margin < 1e-9L) return std::nullopt;
  const Real a = c->angle;
  if (std::fabs(a - p.theta1) < 1e-9L || std::fabs(a - p.theta2) < 1e-9L) return std::nullopt;
  return (a > p.theta1 && a < p.theta2) ? 1 : 0;
}

Moebius random_motion(std::mt19937_64& rng) {
  std::uniform_real_distribution<long double> u(-2, 2), pos(0.3L, 3);
  return Moebius::translation(u(rng)) * Moebius::dilation(pos(rng)) * Moebius::rotation(u(rng));
}

// Minimum distance between the orbits, by the word search.
Real orbit_distance(const Point& z1, const Point& z2) {
  Real best = 1e9L;
  for (const auto& g : enumerate_gamma_by_words(z1, z2, 4, 10)) best = std::min(best, dist(z1, mobius_apply(g, z2)));
  return best;
}

bool same_list(std::vector<Sl2z> a, std::vector<Sl2z> b) {
  auto key = [](const Sl2z& g) { return std::make_tuple(g.p, g.q, g.r, g.s); };
  auto less = [&](const Sl2z& l, const Sl2z& r) { return key(l) < key(r); };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  return a == b;
}

}  // namespace

TEST_CASE("k_delta examples") {
  KernelParams p;
  p.delta = 0.5L;
  p.theta1 = kPi / 4;
  p.theta2 = 3 * kPi / 4;
  // both arcs pass through i at their midpoints
  const UnitTangent right = flow({0, 1, 0}, -0.25L);
  const UnitTangent up = flow({0, 1, kPi / 2}, -0.25L);
  CHECK(k_delta(right, up, p) == 1);
  CHECK(k_delta(up, right, p) == 1);
  p.theta1 = 0;
  p.theta2 = kPi / 4;
  CHECK(k_delta(right, up, p) == 0);
  // far apart
  KernelParams q;
  q.delta = 0.05L;
  CHECK(k_delta({0, 1, kPi / 2}, {0.5L, 1.5L, 2}, q) == 0);
  // one geodesic never crosses itself
  CHECK(k_delta(right, flow(right, 0.1L), q) == 0);
}

TEST_CASE("k_delta agrees with a Euclidean oracle and is invariant") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<long double> jitter(-0.08L, 0.08L), ang(0, 2 * kPi), th(0, kPi);
  int agree = 0, ones = 0, skipped = 0;
  for (int k = 0; k < 1000; ++k) {
    KernelParams p;
    p.delta = 0.1L;
    const Real a = th(rng), b = th(rng);
    p.theta1 = std::min(a, b);
    p.theta2 = std::max(a, b);
    const UnitTangent u1{jitter(rng), 1 + jitter(rng), ang(rng)};
    const UnitTangent u2{u1.x + jitter(rng), u1.y + jitter(rng), ang(rng)};
    const auto expect = k_oracle(u1, u2, p);
    if (!expect) {
      ++skipped;
      continue;
    }
    const int got = k_delta(u1, u2, p);
    CHECK(got == *expect);
    agree += got == *expect;
    ones += got;
    const Moebius g = random_motion(rng);
    const UnitTangent v1 = mobius_apply(g, u1), v2 = mobius_apply(g, u2);
    if (auto moved = k_oracle(v1, v2, p)) CHECK(*moved == *expect);
    CHECK(k_delta(v1, v2, p) == got);
  }
  CHECK(agree > 900);
  CHECK(ones > 50);
  CHECK(skipped < 10);
}

TEST_CASE("enumerate_gamma_near examples") {
  const auto at_i = enumerate_gamma_near({0, 1}, {0, 1}, 0.1L);
  // S fixes i, so the list is the stabiliser {I, S}
  CHECK(same_list(at_i, {Sl2z::identity(), Sl2z::inversion()}));
  const Real Y = 50;
  const auto cusp = enumerate_gamma_near({0, Y}, {0, Y}, 1);
  // arccosh(1 + n^2 / (2 Y^2)) < 1
  const Int n_max = static_cast<Int>(std::floor(Y * std::sqrt(2 * (std::cosh(1.0L) - 1))));
  CHECK(cusp.size() == static_cast<std::size_t>(2 * n_max + 1));
  for (const auto& g : cusp) {
    CHECK(g.r == 0);
    CHECK(std::abs(g.q) <= n_max);
  }
  CHECK_THROWS(enumerate_gamma_near({0, 1}, {0, 1}, 4.5L));
}

TEST_CASE("enumerate_gamma_near matches the word search") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<long double> x(-0.5L, 0.5L), y(0.87L, 2), r(0.05L, 1.5L), step(-0.4L, 0.4L);
  for (int k = 0; k < 200; ++k) {
    const Point z1{x(rng), y(rng)};
    const Point z2{z1.x + step(rng), std::max<Real>(0.3L, z1.y + step(rng))};
    const Real radius = r(rng);
    const auto fast = enumerate_gamma_near(z1, z2, radius);
    const auto slow = enumerate_gamma_by_words(z1, z2, radius, 12);
    CHECK(same_list(fast, slow));
    for (const auto& g : fast) CHECK(dist(z1, mobius_apply(g, z2)) < radius);
  }
}

TEST_CASE("K_delta support and the compact bound") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<long double> x(-0.5L, 0.5L), y(0.87L, 1.8L), ang(0, 2 * kPi);
  KernelParams p;
  p.delta = 0.05L;
  int far = 0;
  for (int k = 0; k < 400; ++k) {
    const UnitTangent u1{x(rng), y(rng), ang(rng)}, u2{x(rng), y(rng), ang(rng)};
    if (orbit_distance({u1.x, u1.y}, {u2.x, u2.y}) > 2 * p.delta) {
      ++far;
      CHECK(K_delta(u1, u2, p) == 0);
    }
  }
  CHECK(far > 300);
  // points whose nearest non-trivial translate is farther than 4 delta
  std::uniform_real_distribution<long double> cx(0.05L, 0.4L), cy(1.15L, 1.6L), jitter(-0.04L, 0.04L);
  int tested = 0, hits = 0;
  while (tested < 2000) {
    const Point z{cx(rng), cy(rng)};
    Real inj = 1e9L;
    for (const auto& g : enumerate_gamma_near(z, z, 4 * p.delta + 0.1L))
      if (!(g == Sl2z::identity())) inj = std::min(inj, dist(z, mobius_apply(g, z)));
    if (inj <= 4 * p.delta) continue;
    ++tested;
    const UnitTangent u1{z.x, z.y, ang(rng)}, u2{z.x + jitter(rng), z.y + jitter(rng), ang(rng)};
    const int K = K_delta(u1, u2, p);
    CHECK(K <= 1);
    hits += K;
  }
  CHECK(hits > 20);
}

TEST_CASE("K_delta counts both stabiliser elements at i") {
  KernelParams p;
  p.delta = 0.5L;
  const UnitTangent right = flow({0, 1, 0}, -0.25L);
  const UnitTangent up = flow({0, 1, kPi / 2}, -0.25L);
  // S turns the upward arc into the downward one, which also crosses at i
  CHECK(K_delta(right, up, p) == 2);
  p.theta1 = kPi / 4;
  p.theta2 = 3 * kPi / 4;
  CHECK(K_delta(right, up, p) == 2);
}

TEST_CASE("crossing weights") {
  const Real d = 0.05L, l = 0.4L;
  CHECK(crossing_weight(d / 2, l, d) == doctest::Approx(0.5));
  CHECK(crossing_weight(d, l, d) == doctest::Approx(1));
  CHECK(crossing_weight(0.2L, l, d) == doctest::Approx(1));
  CHECK(crossing_weight(l, l, d) == doctest::Approx(1));
  CHECK(crossing_weight(l + d / 4, l, d) == doctest::Approx(0.75));
  CHECK(crossing_weight(l + d, l, d) == doctest::Approx(0));
  CHECK(crossing_weight(0, l, d) == doctest::Approx(0));
}

TEST_CASE("kernel parameters are validated") {
  KernelParams p;
  CHECK_NOTHROW(p.validate());
  p.delta = 1;
  CHECK_THROWS(p.validate());
  p.delta = 0.1L;
  p.theta1 = 2;
  p.theta2 = 1;
  CHECK_THROWS(p.validate());
  p.theta1 = p.theta2 = 1;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("volume identity by Monte Carlo") {
  KernelParams p;
  p.delta = 0.2L;
  p.theta1 = kPi / 4;
  p.theta2 = 3 * kPi / 4;
  const auto r = check_volume_identity(p, 200000, 5);
  CHECK(r.rhs == doctest::Approx(0.0565685425).epsilon(1e-9));
  CHECK(r.stderr_ > 0);
  CHECK(r.abs_err <= 3 * r.stderr_);
  CHECK(r.passed);
  // deterministic in the seed
  CHECK(check_volume_identity(p, 200000, 5).lhs == r.lhs);
  KernelParams full;
  full.delta = 0.1L;
  CHECK(check_volume_identity(full, 10000, 1).rhs == doctest::Approx(0.02));
  KernelParams empty;
  empty.theta1 = empty.theta2 = 1;
  const auto e = check_volume_identity(empty, 10000, 1);
  CHECK(e.lhs == 0);
  CHECK(e.rhs == 0);
  CHECK_THROWS(check_volume_identity(p, 9999, 1));
}

TEST_CASE("volume identity in the psi chart") {
  for (Real delta : {0.05L, 0.2L, 0.5L}) {
    for (auto [a, b] : std::vector<std::pair<Real, Real>>{{0, kPi}, {kPi / 4, 3 * kPi / 4}, {0.3L, 1.2L}, {2.0L, 3.0L}}) {
      KernelParams p;
      p.delta = delta;
      p.theta1 = a;
      p.theta2 = b;
      const auto r = check_volume_identity_psi(p);
      CHECK(r.rhs == doctest::Approx(static_cast<double>((std::cos(a) - std::cos(b)) * delta * delta)));
      CHECK(r.abs_err <= 1e-12);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("count identity") {
  const auto d5 = validate_discriminant(5), d8 = validate_discriminant(8);
  const auto pair = family_vs_family(d5, d8);
  KernelParams p;
  const auto r = check_count_identity(d5, d8, p);
  CHECK(r.passed);
  CHECK(r.rhs == doctest::Approx(static_cast<double>(pair.in_window)));
  CHECK(std::llround(r.lhs) == static_cast<long long>(pair.in_window));
  p.delta = 0.025L;
  const auto half = check_count_identity(d5, d8, p);
  CHECK(std::llround(half.lhs) == std::llround(r.lhs));
  // window partition
  p.delta = 0.05L;
  long long parts = 0;
  for (auto [a, b] : std::vector<std::pair<Real, Real>>{{0, 1}, {1, 2}, {2, kPi}}) {
    p.theta1 = a;
    p.theta2 = b;
    const auto part = check_count_identity(d5, d8, p);
    CHECK(part.passed);
    parts += std::llround(part.lhs);
  }
  CHECK(parts == std::llround(r.lhs));
  // serial and parallel quadrature agree
  CountIdentityOptions serial;
  serial.parallel = false;
  KernelParams q;
  CHECK(check_count_identity(d5, d8, q, serial).lhs == doctest::Approx(static_cast<double>(r.lhs)).epsilon(1e-12));
  CountIdentityOptions coarse;
  coarse.grid = 4;
  CHECK_THROWS(check_count_identity(d5, d8, q, coarse));
  CHECK_THROWS(check_count_identity(d5, d5, q));
}

TEST_CASE("weighted identity") {
  KernelParams p;
  const auto beta = segment_from_endpoints({0.1L, 0.9L}, {0.1L, 1.3L});
  const auto r = check_weighted_identity(beta, validate_discriminant(5), p);
  CHECK(r.abs_err < 1e-3);
  CHECK(r.passed);
  // two crossings, one of them on a ramp of the weight
  CHECK(r.rhs > 3);
  CHECK(r.rhs < 4);
  // a wide arc high up meets its own translate by z -> z + 1
  const auto wide = segment_from_endpoints({-0.6L, 3}, {0.6L, 3});
  CHECK(self_intersects(wide));
  CHECK_THROWS(check_weighted_identity(wide, validate_discriminant(5), p));
  CHECK_FALSE(self_intersects(beta));
}

TEST_CASE("cusp blow-up") {
  const auto u = horocycle_tangent(10, 0.5L);
  const auto arc = forward_arc(u, 0.5L);
  const Point a = arc.point_at(arc.lo()), b = arc.point_at(arc.hi());
  CHECK(a.x == doctest::Approx(static_cast<double>(-b.x)));
  CHECK(a.y == doctest::Approx(static_cast<double>(b.y)));
  CHECK(std::hypot(static_cast<double>(a.x), static_cast<double>(a.y)) == doctest::Approx(10));
  KernelParams p;
  p.delta = 0.5L;
  p.theta2 = kPi / 2;
  const auto r = blowup_check(p, {10, 20, 40, 80});
  CHECK(r.rows.size() == 4);
  CHECK(r.monotone);
  CHECK(r.slope > 0);
  CHECK(r.r_squared >= 0.9);
  CHECK(r.passed);
  std::ostringstream os;
  write_json(os, r);
  CHECK(os.str().find("\"slope\"") != std::string::npos);
}

TEST_CASE("identity reports serialise") {
  IdentityReport r;
  r.identity = "volume";
  r.lhs = 1;
  r.rhs = 1;
  std::ostringstream plain, seeded;
  write_json(plain, r);
  write_json(seeded, r, 9, true);
  CHECK(plain.str().find("\"stderr\"") == std::string::npos);
  CHECK(seeded.str().find("\"seed\"") != std::string::npos);
}
