#include "geoint/hyperbolic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace geoint {

Real wrap_two_pi(Real a) {
  const Real two_pi = 2 * kPi;
  Real r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return r;
}

Real wrap_pi(Real a) {
  Real r = std::fmod(a, kPi);
  if (r < 0) r += kPi;
  if (r >= kPi) r -= kPi;
  return r;
}

Moebius Moebius::from(const Sl2z& m) {
  return {static_cast<Real>(m.p), static_cast<Real>(m.q), static_cast<Real>(m.r),
          static_cast<Real>(m.s)};
}

Moebius Moebius::dilation(Real y) {
  const Real r = std::sqrt(y);
  return {r, 0, 0, 1 / r};
}

Moebius Moebius::rotation(Real theta) {
  const Real c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

Point mobius_apply(const Moebius& m, const Point& p) {
  const Real re = m.c * p.x + m.d;
  const Real im = m.c * p.y;
  const Real den = re * re + im * im;
  const Real nx = (m.a * p.x + m.b) * re + m.a * m.c * p.y * p.y;
  return {nx / den, m.det() * p.y / den};
}

Point mobius_apply(const Sl2z& m, const Point& p) { return mobius_apply(Moebius::from(m), p); }

UnitTangent mobius_apply(const Moebius& m, const UnitTangent& u) {
  const Point q = mobius_apply(m, Point{u.x, u.y});
  const Real arg = std::atan2(m.c * u.y, m.c * u.x + m.d);
  return {q.x, q.y, wrap_two_pi(u.theta - 2 * arg)};
}

UnitTangent mobius_apply(const Sl2z& m, const UnitTangent& u) { return mobius_apply(Moebius::from(m), u); }

Real dist(const Point& p, const Point& q) {
  const Real chord = std::hypot(p.x - q.x, p.y - q.y);
  return 2 * std::asinh(chord / (2 * std::sqrt(p.y * q.y)));
}

Iwasawa iwasawa(const Moebius& g) {
  const Real den = g.c * g.c + g.d * g.d;
  return {(g.a * g.c + g.b * g.d) / den, g.det() / den, wrap_pi(std::atan2(g.c, g.d))};
}

Moebius compose_from_iwasawa(const Iwasawa& w) {
  return Moebius::translation(w.x) * Moebius::dilation(w.y) * Moebius::rotation(w.theta);
}

Real iwasawa_theta_of_direction(Real omega) { return wrap_pi((kPi / 2 - omega) / 2); }

Real direction_of_iwasawa_theta(Real theta) { return wrap_two_pi(kPi / 2 - 2 * theta); }

UnitTangent tangent_of(const Moebius& g) {
  const Iwasawa w = iwasawa(g);
  return {w.x, w.y, direction_of_iwasawa_theta(w.theta)};
}

Moebius group_element(const UnitTangent& u) {
  return compose_from_iwasawa({u.x, u.y, iwasawa_theta_of_direction(u.theta)});
}

UnitTangent flow(const UnitTangent& u, Real t) {
  return tangent_of(group_element(u) * Moebius::dilation(std::exp(t)));
}

// --- geodesic arcs ---------------------------------------------------------

GeodesicArc GeodesicArc::from_feet(const BoundaryPoint& foot_minus, const BoundaryPoint& foot_plus) {
  if (compare(foot_minus, foot_plus) == 0) throw std::invalid_argument("geodesic feet coincide");
  GeodesicArc g;
  g.minus_ = foot_minus;
  g.plus_ = foot_plus;
  if (foot_plus.is_infinite() || foot_minus.is_infinite()) {
    g.vertical_ = true;
    g.sigma_ = foot_plus.is_infinite() ? 1 : -1;
    g.center_ = foot_plus.is_infinite() ? foot_minus.approx() : foot_plus.approx();
    g.radius_ = 0;
    return g;
  }
  const Real fm = foot_minus.approx(), fp = foot_plus.approx();
  g.center_ = (fm + fp) / 2;
  g.radius_ = std::fabs(fp - fm) / 2;
  g.sigma_ = compare(foot_plus, foot_minus) > 0 ? 1 : -1;
  return g;
}

GeodesicArc GeodesicArc::axis_of(Int a, Int b, Int d) {
  if (a == 0) throw std::invalid_argument("axis_of: a must be non-zero");
  GeodesicArc g;
  g.minus_ = BoundaryPoint::quadratic(make_quad(-b, -1, d, 2 * a));
  g.plus_ = BoundaryPoint::quadratic(make_quad(-b, 1, d, 2 * a));
  g.center_ = -static_cast<Real>(b) / (2 * static_cast<Real>(a));
  g.radius_ = std::sqrt(static_cast<Real>(d)) / (2 * std::fabs(static_cast<Real>(a)));
  g.sigma_ = a > 0 ? 1 : -1;
  return g;
}

bool GeodesicArc::full() const { return std::isinf(lo_) && std::isinf(hi_); }

GeodesicArc GeodesicArc::with_window(Real lo, Real hi) const {
  if (!(lo < hi)) throw std::invalid_argument("empty arc window");
  GeodesicArc g = *this;
  g.lo_ = lo;
  g.hi_ = hi;
  return g;
}

Point GeodesicArc::point_at(Real t) const {
  if (vertical_) return {center_, std::exp(sigma_ * t)};
  return {center_ + sigma_ * radius_ * std::tanh(t), radius_ / std::cosh(t)};
}

Real GeodesicArc::direction_at(Real t) const {
  if (vertical_) return sigma_ > 0 ? kPi / 2 : 3 * kPi / 2;
  return wrap_two_pi(std::atan2(-std::sinh(t), static_cast<Real>(sigma_)));
}

UnitTangent GeodesicArc::tangent_at(Real t) const {
  const Point p = point_at(t);
  return {p.x, p.y, direction_at(t)};
}

Real GeodesicArc::param_of(const Point& p) const {
  if (vertical_) return sigma_ * std::log(p.y);
  return std::asinh(sigma_ * (p.x - center_) / p.y);
}

namespace {

GeodesicArc carry_window(const GeodesicArc& src, GeodesicArc dst, const auto& map_point) {
  if (src.full()) return dst;
  const bool use_lo = std::isfinite(src.lo());
  const Real anchor = use_lo ? src.lo() : src.hi();
  const Real t = dst.param_of(map_point(src.point_at(anchor)));
  if (use_lo) return dst.with_window(t, t + (src.hi() - src.lo()));
  return dst.with_window(-std::numeric_limits<Real>::infinity(), t);
}

BoundaryPoint real_boundary_image(const Moebius& m, const BoundaryPoint& b) {
  if (b.is_infinite()) {
    if (m.c == 0) return BoundaryPoint::infinity();
    return BoundaryPoint::finite(m.a / m.c);
  }
  const Real x = b.approx();
  const Real den = m.c * x + m.d;
  if (den == 0) return BoundaryPoint::infinity();
  return BoundaryPoint::finite((m.a * x + m.b) / den);
}

}  // namespace

GeodesicArc mobius_apply(const Sl2z& m, const GeodesicArc& g) {
  GeodesicArc out = GeodesicArc::from_feet(g.foot_minus().apply(m), g.foot_plus().apply(m));
  return carry_window(g, out, [&](const Point& p) { return mobius_apply(m, p); });
}

GeodesicArc mobius_apply(const Moebius& m, const GeodesicArc& g) {
  GeodesicArc out =
      GeodesicArc::from_feet(real_boundary_image(m, g.foot_minus()), real_boundary_image(m, g.foot_plus()));
  return carry_window(g, out, [&](const Point& p) { return mobius_apply(m, p); });
}

GeodesicArc geodesic_through(const UnitTangent& u, Real* param) {
  const Real cw = std::cos(u.theta), sw = std::sin(u.theta);
  GeodesicArc g;
  if (std::fabs(cw) < 1e-12L) {
    if (sw > 0)
      g = GeodesicArc::from_feet(BoundaryPoint::finite(u.x), BoundaryPoint::infinity());
    else
      g = GeodesicArc::from_feet(BoundaryPoint::infinity(), BoundaryPoint::finite(u.x));
  } else {
    const Real center = u.x + u.y * sw / cw;
    const Real radius = u.y / std::fabs(cw);
    const Real sigma = cw > 0 ? 1 : -1;
    g = GeodesicArc::from_feet(BoundaryPoint::finite(center - sigma * radius),
                               BoundaryPoint::finite(center + sigma * radius));
  }
  if (param) *param = g.param_of({u.x, u.y});
  return g;
}

GeodesicArc forward_arc(const UnitTangent& u, Real length) {
  Real t0 = 0;
  GeodesicArc g = geodesic_through(u, &t0);
  return g.with_window(t0, t0 + length);
}

namespace {

Real direction_at_point(const GeodesicArc& g, const Point& p) {
  if (g.vertical()) return g.sigma() > 0 ? kPi / 2 : 3 * kPi / 2;
  const Real s = static_cast<Real>(g.sigma());
  return wrap_two_pi(std::atan2(-s * (p.x - g.center()), s * p.y));
}

Real height_on_circle(Real radius, Real offset) {
  const Real h2 = (radius - offset) * (radius + offset);
  return h2 > 0 ? std::sqrt(h2) : 0;
}

}  // namespace

std::optional<Crossing> crossing_of_lines(const GeodesicArc& g1, const GeodesicArc& g2) {
  if (!interlace(g1.foot_minus(), g1.foot_plus(), g2.foot_minus(), g2.foot_plus())) return std::nullopt;
  Point p;
  if (g1.vertical()) {
    p.x = g1.center();
    p.y = height_on_circle(g2.radius(), p.x - g2.center());
  } else if (g2.vertical()) {
    p.x = g2.center();
    p.y = height_on_circle(g1.radius(), p.x - g1.center());
  } else {
    const Real dc = g2.center() - g1.center();
    const Real r1 = g1.radius(), r2 = g2.radius();
    const Real u = ((r1 - r2) * (r1 + r2) + dc * dc) / (2 * dc);
    p.x = g1.center() + u;
    p.y = height_on_circle(r1, u);
  }
  if (!(p.y > 0)) p.y = std::numeric_limits<Real>::min();
  Crossing c;
  c.point = p;
  c.param1 = g1.param_of(p);
  c.param2 = g2.param_of(p);
  c.oriented_angle = wrap_two_pi(direction_at_point(g2, p) - direction_at_point(g1, p));
  c.angle = wrap_pi(c.oriented_angle);
  c.near_tangent = c.angle < kAngleTolerance || c.angle > kPi - kAngleTolerance;
  return c;
}

std::optional<Crossing> intersect_arcs(const GeodesicArc& g1, const GeodesicArc& g2) {
  auto c = crossing_of_lines(g1, g2);
  if (!c) return c;
  if (!g1.in_window(c->param1) || !g2.in_window(c->param2)) return std::nullopt;
  return c;
}

// --- fundamental domain --------------------------------------------------------

bool in_fundamental_domain(const Point& p) {
  constexpr Real tol = 1e-12L;
  return p.y > 0 && std::fabs(p.x) <= 0.5L + tol && p.x * p.x + p.y * p.y >= 1 - tol;
}

Reduced reduce_to_fundamental_domain(const Point& p) {
  if (!(p.y > 0)) throw std::invalid_argument("point must lie in the upper half-plane");
  Sl2z m = Sl2z::identity();
  Real x = p.x, y = p.y;
  for (int iter = 0; iter < 100000; ++iter) {
    const Real n = std::floor(x + 0.5L);
    if (n != 0) {
      x -= n;
      m = Sl2z::translation(-static_cast<Int>(n)) * m;
    }
    const Real r2 = x * x + y * y;
    if (r2 < 1 || (r2 == 1 && x > 0)) {
      x = -x / r2;
      y = y / r2;
      m = Sl2z::inversion() * m;
      continue;
    }
    break;
  }
  return {mobius_apply(m, p), m};
}

ReducedTangent reduce_to_fundamental_domain(const UnitTangent& u) {
  const Reduced r = reduce_to_fundamental_domain(Point{u.x, u.y});
  return {mobius_apply(r.map, u), r.map};
}

// --- the map Psi and Haar measure --------------------------------------------

Moebius psi_element(Real t1, Real phi, Real t2) {
  return Moebius::dilation(std::exp(t1)) * Moebius::rotation(phi / 2) * Moebius::dilation(std::exp(-t2));
}

UnitTangent psi_map(Real t1, Real phi, Real t2) { return tangent_of(psi_element(t1, phi, t2)); }

PsiDensity psi_density(Real t1, Real phi, Real t2) {
  constexpr Real h = 1e-5L;
  auto chart = [](Real a, Real b, Real c) { return iwasawa(psi_element(a, b, c)); };
  const Iwasawa base = chart(t1, phi, t2);
  Real jac[3][3];
  const Real args[3] = {t1, phi, t2};
  for (int j = 0; j < 3; ++j) {
    Real plus[3] = {args[0], args[1], args[2]};
    Real minus[3] = {args[0], args[1], args[2]};
    plus[j] += h;
    minus[j] -= h;
    const Iwasawa wp = chart(plus[0], plus[1], plus[2]);
    const Iwasawa wm = chart(minus[0], minus[1], minus[2]);
    Real dtheta = wp.theta - wm.theta;
    if (dtheta > kPi / 2) dtheta -= kPi;
    if (dtheta < -kPi / 2) dtheta += kPi;
    jac[0][j] = (wp.x - wm.x) / (2 * h);
    jac[1][j] = (wp.y - wm.y) / (2 * h);
    jac[2][j] = dtheta / (2 * h);
  }
  const Real det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) -
                   jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0]) +
                   jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
  PsiDensity out;
  out.value = std::fabs(det) / (base.y * base.y);
  out.singular = std::fabs(std::sin(phi)) < 1e-12L;
  return out;
}

HaarConstants haar_volume_constants() {
  return {kPi * kPi / 3, kPi / 3, kPi, "dx dy dtheta / y^2, theta the Iwasawa angle in [0, pi)"};
}

VolumeEstimate fundamental_domain_volume_mc(std::size_t samples, std::uint64_t seed) {
  // With u = 1/y the measure dx dy / y^2 becomes dx du and the domain is
  // |x| <= 1/2, 0 < u <= 1/sqrt(1 - x^2) inside the box [-1/2, 1/2] x (0, 2/sqrt 3].
  std::mt19937_64 rng(seed);
  const Real umax = 2 / std::sqrt(static_cast<Real>(3));
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uu(0.0, static_cast<double>(umax));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Real x = ux(rng), u = uu(rng);
    if (u * u * (1 - x * x) <= 1) ++hits;
  }
  const Real p = static_cast<Real>(hits) / static_cast<Real>(samples);
  const Real box = umax * kPi;
  return {box * p, box * std::sqrt(p * (1 - p) / static_cast<Real>(samples))};
}

}  // namespace geoint
