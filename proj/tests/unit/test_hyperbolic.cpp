#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "geoint/hyperbolic.hpp"

using namespace geoint;

namespace {

using C = std::complex<long double>;

C as_complex(const Point& p) { return {p.x, p.y}; }

// Fractional linear action in plain complex arithmetic.
C act(long double a, long double b, long double c, long double d, C z) { return (a * z + b) / (c * z + d); }

// Distance from the textbook formula arccosh(1 + |z - w|^2 / (2 y1 y2)).
long double dist_oracle(const Point& p, const Point& q) {
  const long double dx = p.x - q.x, dy = p.y - q.y;
  return std::acosh(1 + (dx * dx + dy * dy) / (2 * p.y * q.y));
}

Moebius random_motion(std::mt19937_64& rng) {
  std::uniform_real_distribution<long double> u(-2, 2);
  std::uniform_real_distribution<long double> pos(0.3L, 3);
  return Moebius::translation(u(rng)) * Moebius::dilation(pos(rng)) * Moebius::rotation(u(rng));
}

Point random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<long double> x(-1, 1);
  std::uniform_real_distribution<long double> y(0.4L, 2.5L);
  return {x(rng), y(rng)};
}

}  // namespace

TEST_CASE("mobius action examples") {
  const Point i{0, 1};
  auto p = mobius_apply(Sl2z::identity(), i);
  CHECK(p.x == 0);
  CHECK(p.y == 1);
  p = mobius_apply(Sl2z::translation(1), i);
  CHECK(p.x == doctest::Approx(1));
  CHECK(p.y == doctest::Approx(1));
  p = mobius_apply(Sl2z::inversion(), Point{0, 2});
  const C z = act(0, -1, 1, 0, C(0, 2));
  CHECK(p.x == doctest::Approx(static_cast<double>(z.real())));
  CHECK(p.y == doctest::Approx(0.5));
}

TEST_CASE("tangent action agrees with the derivative of the map") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<long double> ang(0, 2 * kPi);
  for (int k = 0; k < 200; ++k) {
    const Moebius m = random_motion(rng);
    const Point p = random_point(rng);
    const UnitTangent u{p.x, p.y, ang(rng)};
    const UnitTangent v = mobius_apply(m, u);
    // push a short step forward through the map and read off the direction
    const long double h = 1e-7L;
    const C z0 = as_complex(p);
    const C z1 = z0 + h * C(std::cos(u.theta), std::sin(u.theta));
    const C w = act(m.a, m.b, m.c, m.d, z1) - act(m.a, m.b, m.c, m.d, z0);
    const long double expected = std::arg(w);
    const long double diff = std::remainder(v.theta - expected, 2 * kPi);
    CHECK(std::fabs(static_cast<double>(diff)) < 1e-6);
  }
}

TEST_CASE("distance examples") {
  CHECK(dist({0, 1}, {0, std::exp(1.0L)}) == doctest::Approx(1).epsilon(1e-14));
  CHECK(dist({0, 1}, {0, 1}) == 0);
  CHECK(dist({0, 1}, {1, 1}) == doctest::Approx(0.9624236501).epsilon(1e-10));
  CHECK(dist({0, 1}, {1, 1}) == doctest::Approx(std::acosh(1.5)).epsilon(1e-14));
}

TEST_CASE("distance matches the arccosh formula and is invariant") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const Point p = random_point(rng), q = random_point(rng);
    const Moebius m = random_motion(rng);
    const Real d0 = dist(p, q);
    CHECK(std::fabs(static_cast<double>(d0 - dist_oracle(p, q))) < 1e-10);
    CHECK(std::fabs(static_cast<double>(dist(mobius_apply(m, p), mobius_apply(m, q)) - d0)) < 1e-10);
    CHECK(dist(q, p) == d0);
  }
}

TEST_CASE("iwasawa decomposition") {
  auto w = iwasawa(Moebius{});
  CHECK(w.x == doctest::Approx(0));
  CHECK(w.y == doctest::Approx(1));
  CHECK(w.theta == doctest::Approx(0));
  w = iwasawa(Moebius::translation(3) * Moebius::dilation(4));
  CHECK(w.x == doctest::Approx(3));
  CHECK(w.y == doctest::Approx(4));
  CHECK(w.theta == doctest::Approx(0));
  w = iwasawa(Moebius::rotation(kPi / 4));
  CHECK(w.x == doctest::Approx(0));
  CHECK(w.y == doctest::Approx(1));
  CHECK(w.theta == doctest::Approx(static_cast<double>(kPi / 4)));

  std::mt19937_64 rng(9);
  for (int k = 0; k < 500; ++k) {
    const Moebius g = random_motion(rng);
    const Moebius h = compose_from_iwasawa(iwasawa(g));
    // equal in PSL2(R)
    const long double s = (g.a * h.a + g.b * h.b + g.c * h.c + g.d * h.d) < 0 ? -1 : 1;
    CHECK(std::fabs(static_cast<double>(g.a - s * h.a)) < 1e-12);
    CHECK(std::fabs(static_cast<double>(g.b - s * h.b)) < 1e-12);
    CHECK(std::fabs(static_cast<double>(g.c - s * h.c)) < 1e-12);
    CHECK(std::fabs(static_cast<double>(g.d - s * h.d)) < 1e-12);
    // tangent round trip
    const UnitTangent u = tangent_of(g);
    const UnitTangent v = tangent_of(group_element(u));
    CHECK(v.x == doctest::Approx(static_cast<double>(u.x)));
    CHECK(v.y == doctest::Approx(static_cast<double>(u.y)));
    CHECK(std::fabs(static_cast<double>(std::remainder(v.theta - u.theta, 2 * kPi))) < 1e-12);
  }
}

TEST_CASE("geodesic through a tangent") {
  Real param = 99;
  const auto g = geodesic_through(UnitTangent{0, 1, 0}, &param);
  CHECK_FALSE(g.vertical());
  CHECK(g.foot_minus().approx() == doctest::Approx(-1));
  CHECK(g.foot_plus().approx() == doctest::Approx(1));
  CHECK(param == doctest::Approx(0));
  const auto v = geodesic_through(UnitTangent{0, 1, kPi / 2});
  CHECK(v.vertical());
  CHECK(v.center() == doctest::Approx(0));
  CHECK(v.sigma() == 1);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<long double> ang(0, 2 * kPi), step(0.01L, 2);
  for (int k = 0; k < 500; ++k) {
    const Point p = random_point(rng);
    const UnitTangent u{p.x, p.y, ang(rng)};
    Real s0 = 0;
    const auto arc = geodesic_through(u, &s0);
    const Point b = arc.point_at(s0);
    CHECK(std::fabs(static_cast<double>(b.x - u.x)) < 1e-12);
    CHECK(std::fabs(static_cast<double>(b.y - u.y)) < 1e-12);
    CHECK(std::fabs(static_cast<double>(std::remainder(arc.direction_at(s0) - u.theta, 2 * kPi))) < 1e-12);
    // the arc-length parameter is hyperbolic arc length
    const Real t = step(rng);
    CHECK(std::fabs(static_cast<double>(dist(b, arc.point_at(s0 + t)) - t)) < 1e-10);
    const UnitTangent f = flow(u, t);
    CHECK(std::fabs(static_cast<double>(dist(b, {f.x, f.y}) - t)) < 1e-10);
    CHECK(std::fabs(static_cast<double>(arc.param_of({f.x, f.y}) - s0 - t)) < 1e-10);
  }
}

TEST_CASE("crossings of explicit arcs") {
  const auto unit = GeodesicArc::from_feet(BoundaryPoint::finite(-1), BoundaryPoint::finite(1));
  const auto vert = GeodesicArc::from_feet(BoundaryPoint::finite(0), BoundaryPoint::infinity());
  auto c = intersect_arcs(unit, vert);
  REQUIRE(c);
  CHECK(c->point.x == doctest::Approx(0));
  CHECK(c->point.y == doctest::Approx(1));
  CHECK(c->angle == doctest::Approx(static_cast<double>(kPi / 2)));

  const auto other = GeodesicArc::from_feet(BoundaryPoint::finite(0), BoundaryPoint::finite(2));
  c = intersect_arcs(unit, other);
  REQUIRE(c);
  // circles x^2 + y^2 = 1 and (x - 1)^2 + y^2 = 1 meet at x = 1/2
  CHECK(c->point.x == doctest::Approx(0.5));
  CHECK(c->point.y == doctest::Approx(std::sqrt(0.75)));
  // tangent directions (-y, x) on the unit circle against the other, both rightwards
  const long double a1 = std::atan2(-0.5L, std::sqrt(0.75L)) + kPi;  // direction of travel -1 -> 1
  const long double a2 = std::atan2(0.5L, std::sqrt(0.75L));         // on the circle around 1
  const long double expected = std::fmod(std::fmod(a2 - a1, kPi) + kPi, kPi);
  CHECK(c->angle == doctest::Approx(static_cast<double>(expected)));

  const auto far = GeodesicArc::from_feet(BoundaryPoint::finite(2), BoundaryPoint::finite(4));
  CHECK_FALSE(intersect_arcs(unit, far));
}

TEST_CASE("crossing angle is antisymmetric") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<long double> foot(-3, 3);
  int crossings = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto g1 = GeodesicArc::from_feet(BoundaryPoint::finite(foot(rng)), BoundaryPoint::finite(foot(rng)));
    const auto g2 = GeodesicArc::from_feet(BoundaryPoint::finite(foot(rng)), BoundaryPoint::finite(foot(rng)));
    const auto c12 = intersect_arcs(g1, g2);
    const auto c21 = intersect_arcs(g2, g1);
    REQUIRE(c12.has_value() == c21.has_value());
    if (!c12) continue;
    ++crossings;
    CHECK(std::fabs(static_cast<double>(c12->angle + c21->angle - kPi)) < 1e-9);
    CHECK(std::fabs(static_cast<double>(c12->point.x - c21->point.x)) < 1e-9);
    // the point lies on both circles
    CHECK(std::fabs(static_cast<double>(std::hypot(c12->point.x - g1.center(), c12->point.y) - g1.radius())) < 1e-9);
    CHECK(std::fabs(static_cast<double>(std::hypot(c12->point.x - g2.center(), c12->point.y) - g2.radius())) < 1e-9);
  }
  CHECK(crossings > 300);
}

TEST_CASE("reduction to the fundamental domain") {
  auto r = reduce_to_fundamental_domain(Point{0.7L, 2});
  CHECK(r.point.x == doctest::Approx(-0.3));
  CHECK(r.point.y == doctest::Approx(2));
  CHECK(r.map == Sl2z{1, -1, 0, 1});
  r = reduce_to_fundamental_domain(Point{0, 0.5L});
  CHECK(r.point.x == doctest::Approx(0));
  CHECK(r.point.y == doctest::Approx(2));
  CHECK(r.map.projectively_equal(Sl2z{0, -1, 1, 0}));

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<long double> x(-50, 50), ly(-8, 3);
  for (int k = 0; k < 2000; ++k) {
    const Point p{x(rng), std::exp(ly(rng))};
    const auto red = reduce_to_fundamental_domain(p);
    CHECK(in_fundamental_domain(red.point));
    CHECK(std::fabs(static_cast<double>(red.point.x)) <= 0.5);
    CHECK(red.point.x * red.point.x + red.point.y * red.point.y >= 1 - 1e-15L);
    CHECK(red.map.det() == 1);
    const Point img = mobius_apply(red.map, p);
    CHECK(std::fabs(static_cast<double>(img.x - red.point.x)) < 1e-12);
    CHECK(std::fabs(static_cast<double>(img.y / red.point.y - 1)) < 1e-12);
  }
}

TEST_CASE("psi density") {
  CHECK(psi_density(0.3L, kPi / 2, 0.1L).value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(psi_density(0.2L, 0, 0.4L).value == doctest::Approx(0).epsilon(1e-6));
  CHECK(psi_density(0.2L, 0, 0.4L).singular);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<long double> t(0, 1), phi(0, 2 * kPi);
  for (int k = 0; k < 300; ++k) {
    CHECK(psi_density(t(rng), kPi / 6, t(rng)).value == doctest::Approx(0.25).epsilon(1e-6));
    const Real f = phi(rng);
    if (std::fabs(std::sin(f)) < 1e-3L) continue;
    const Real expected = std::fabs(std::sin(f)) / 2;
    CHECK(std::fabs(static_cast<double>(psi_density(t(rng), f, t(rng)).value - expected)) < 1e-6);
  }
}

TEST_CASE("psi map matches the matrix product") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<long double> t(-1, 1), phi(0, 2 * kPi);
  for (int k = 0; k < 200; ++k) {
    const Real t1 = t(rng), f = phi(rng), t2 = t(rng);
    // a(e^t1) R_{phi/2} a(e^-t2) applied to i, built from scratch
    const long double e1 = std::exp(t1 / 2), e2 = std::exp(-t2 / 2);
    const long double c = std::cos(f / 2), s = std::sin(f / 2);
    const long double A = e1 * c * e2, B = -e1 * s / e2, Cc = s * e2 / e1, D = c / (e1 * e2);
    const C z = act(A, B, Cc, D, C(0, 1));
    const UnitTangent u = psi_map(t1, f, t2);
    CHECK(u.x == doctest::Approx(static_cast<double>(z.real())));
    CHECK(u.y == doctest::Approx(static_cast<double>(z.imag())));
  }
}

TEST_CASE("haar volume constants") {
  const auto h = haar_volume_constants();
  CHECK(h.volume_sx == doctest::Approx(3.2898681337).epsilon(1e-10));
  CHECK(h.base_volume == doctest::Approx(static_cast<double>(kPi / 3)));
  CHECK(h.base_volume * h.fiber == doctest::Approx(static_cast<double>(h.volume_sx)));
  const auto mc = fundamental_domain_volume_mc(200000, 42);
  CHECK(std::fabs(static_cast<double>(mc.estimate / h.volume_sx - 1)) < 0.005);
}
