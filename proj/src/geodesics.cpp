#include "geoint/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <json.hpp>
#include <mpfr.h>

#include "geoint/format.hpp"

namespace geoint {

namespace {

Real to_real(const mpz_class& z) {
  mpfr_t x;
  mpfr_init2(x, 128);
  mpfr_set_z(x, z.get_mpz_t(), MPFR_RNDN);
  const Real r = mpfr_get_ld(x, MPFR_RNDN);
  mpfr_clear(x);
  return r;
}

Real tangent_gap(const UnitTangent& a, const UnitTangent& b) {
  Real dth = std::fabs(a.theta - b.theta);
  dth = std::min(dth, 2 * kPi - dth);
  return std::hypot(a.x - b.x, a.y - b.y) + dth;
}

}  // namespace

std::optional<Real> ClosedGeodesic::closure_error() const {
  const mpz_class bound = mpz_class(1) << 40;
  for (const auto* v : {&automorph.p, &automorph.q, &automorph.r, &automorph.s}) {
    if (abs(*v) > bound) return std::nullopt;
  }
  const Moebius m{to_real(automorph.p), to_real(automorph.q), to_real(automorph.r), to_real(automorph.s)};
  const UnitTangent image = mobius_apply(m, axis.tangent_at(axis.lo()));
  return tangent_gap(image, axis.tangent_at(axis.hi()));
}

ClosedGeodesic closed_geodesic(const QuadForm& q, const PellUnit& unit) {
  const Wide disc = q.discriminant();
  if (disc <= 0) throw std::invalid_argument("closed_geodesic: discriminant must be positive");
  if (!q.primitive()) throw std::invalid_argument("closed_geodesic: form must be primitive");
  ClosedGeodesic g;
  g.form = q;
  g.d = narrow(disc);
  g.automorph = automorph_of(q, unit);
  g.axis = GeodesicArc::axis_of(q.a, q.b, g.d).with_window(0, 2 * unit.log_eps);
  return g;
}

ClosedGeodesic closed_geodesic(const QuadForm& q) {
  const Wide disc = q.discriminant();
  if (disc <= 0) throw std::invalid_argument("closed_geodesic: discriminant must be positive");
  return closed_geodesic(q, pell_unit(validate_discriminant(narrow(disc))));
}

std::vector<Piece> walk(const ClosedGeodesic& g, Real max_piece) {
  if (!(max_piece > 0)) throw std::invalid_argument("walk: piece length must be positive");
  const Real total = g.length();
  std::vector<Piece> pieces;
  QuadForm q = g.form;
  GeodesicArc arc = GeodesicArc::axis_of(q.a, q.b, g.d);
  Real t = g.axis.lo();
  Real s = 0;
  while (s < total) {
    // axis(q.act(m^-1)) = m . axis(q)
    const Reduced red = reduce_to_fundamental_domain(arc.point_at(t));
    q = q.act(red.map.inverse());
    arc = GeodesicArc::axis_of(q.a, q.b, g.d);
    t = arc.param_of(red.point);
    const Real len = std::min(max_piece, total - s);
    pieces.push_back({q, arc.with_window(t, t + len), s, pieces.size()});
    t += len;
    s += len;
  }
  return pieces;
}

Real walk_closure_error(const std::vector<Piece>& pieces) {
  if (pieces.empty()) return 0;
  const auto& last = pieces.back().arc;
  const UnitTangent end = reduce_to_fundamental_domain(last.tangent_at(last.hi())).tangent;
  const UnitTangent start = reduce_to_fundamental_domain(pieces.front().arc.tangent_at(pieces.front().arc.lo())).tangent;
  // boundary points of the domain may reduce to different edges; compare up
  // to the short words that glue the edges
  static const std::vector<Sl2z> gluing = [] {
    const Sl2z t = Sl2z::translation(1), ti = Sl2z::translation(-1), s = Sl2z::inversion();
    return std::vector<Sl2z>{Sl2z::identity(), t, ti, s, t * s, ti * s, s * t, s * ti, t * s * t, ti * s * ti};
  }();
  Real best = std::numeric_limits<Real>::infinity();
  for (const auto& g : gluing) best = std::min(best, tangent_gap(mobius_apply(g, end), start));
  return best;
}

std::size_t GeodesicFamily::unoriented_count() const {
  std::size_t ambiguous = 0;
  for (const auto& q : classes.reps) ambiguous += is_ambiguous(q) ? 1 : 0;
  return ambiguous + (classes.reps.size() - ambiguous) / 2;
}

Real GeodesicFamily::oriented_length() const {
  Real total = 0;
  for (const auto& m : members) total += m.length();
  return total;
}

GeodesicFamily family(const Discriminant& d) {
  GeodesicFamily fam;
  fam.disc = d;
  fam.classes = class_representatives(d);
  fam.unit = pell_unit(d);
  for (const auto& q : fam.classes.reps) fam.members.push_back(closed_geodesic(q, fam.unit));
  fam.lengths = total_lengths(fam.classes, fam.unit);
  return fam;
}

TangentFunction bump_function(const Point& center, Real radius) {
  if (!(radius > 0)) throw std::invalid_argument("bump_function: radius must be positive");
  // Euclidean image of the ball: centre y cosh r, radius y sinh r
  const Real half = center.y * std::sinh(radius);
  const Real cy = center.y * std::cosh(radius);
  const bool inside = std::fabs(center.x) + half < 0.5L && std::hypot(center.x, cy) - half > 1;
  if (!inside) throw std::invalid_argument("bump_function: the ball must lie inside the fundamental domain");
  return [center, radius](const UnitTangent& u) -> Real {
    const Real r = dist({u.x, u.y}, center) / radius;
    return r < 1 ? std::exp(1 - 1 / (1 - r * r)) : 0;
  };
}

std::size_t default_nodes(Real length) {
  return std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(256 * length)));
}

namespace {

struct Node {
  const GeodesicArc* arc;
  Real param;
  Real weight;
};

std::vector<Node> quadrature_nodes(const GeodesicFamily& fam, std::size_t nodes,
                                   std::vector<std::vector<Piece>>& storage) {
  storage.clear();
  for (const auto& m : fam.members) storage.push_back(walk(m));
  std::vector<Node> out;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const Real len = fam.members[i].length();
    const std::size_t n = nodes ? nodes : default_nodes(len);
    const Real h = len / static_cast<Real>(n);
    const auto& pieces = storage[i];
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const Real s = (static_cast<Real>(j) + 0.5L) * h;
      while (k + 1 < pieces.size() && s >= pieces[k + 1].start) ++k;
      out.push_back({&pieces[k].arc, pieces[k].arc.lo() + (s - pieces[k].start), h});
    }
  }
  return out;
}

Real evaluate(const TangentFunction& f, const Node& n) {
  return f(reduce_to_fundamental_domain(n.arc->tangent_at(n.param)).tangent);
}

}  // namespace

Real integrate_along(const TangentFunction& f, const GeodesicFamily& fam, std::size_t nodes) {
  std::vector<std::vector<Piece>> storage;
  const auto list = quadrature_nodes(fam, nodes, storage);
  std::vector<Real> values(list.size());
  const long n = static_cast<long>(list.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = evaluate(f, list[static_cast<std::size_t>(i)]);
  Real total = 0;
  for (std::size_t i = 0; i < list.size(); ++i) total += values[i] * list[i].weight;
  return total;
}

Real integrate_along_serial(const TangentFunction& f, const GeodesicFamily& fam, std::size_t nodes) {
  std::vector<std::vector<Piece>> storage;
  const auto list = quadrature_nodes(fam, nodes, storage);
  Real total = 0;
  for (const auto& node : list) total += evaluate(f, node) * node.weight;
  return total;
}

Real haar_integral(const TangentFunction& f, std::size_t x_panels, std::size_t u_panels,
                   std::size_t angle_nodes) {
  using Rule = boost::math::quadrature::gauss<long double, 8>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  // composite rule on [lo, hi]
  auto composite = [&](Real lo, Real hi, std::size_t panels, const auto& g) {
    const Real width = (hi - lo) / static_cast<Real>(panels);
    Real sum = 0;
    for (std::size_t p = 0; p < panels; ++p) {
      const Real mid = lo + (static_cast<Real>(p) + 0.5L) * width;
      for (std::size_t k = 0; k < abscissa.size(); ++k) {
        const Real off = abscissa[k] * width / 2;
        sum += weights[k] * width / 2 * (g(mid - off) + g(mid + off));
      }
    }
    return sum;
  };
  const Real dtheta = kPi / static_cast<Real>(angle_nodes);
  // dx dy / y^2 = dx du with u = 1/y; the domain is 0 < u <= 1/sqrt(1 - x^2)
  return composite(-0.5L, 0.5L, x_panels, [&](Real x) {
    const Real umax = 1 / std::sqrt(1 - x * x);
    return composite(0, umax, u_panels, [&](Real u) {
      Real s = 0;
      for (std::size_t k = 0; k < angle_nodes; ++k) {
        const Real theta = (static_cast<Real>(k) + 0.5L) * dtheta;
        s += f({x, 1 / u, direction_of_iwasawa_theta(theta)});
      }
      return s * dtheta;
    });
  });
}

std::vector<DukeRow> duke_test(const TangentFunction& f, const std::vector<Int>& d_list,
                               std::optional<Real> target, std::size_t nodes) {
  const Real tgt = target ? *target : 3 / (kPi * kPi) * haar_integral(f);
  std::vector<DukeRow> rows;
  for (Int d : d_list) {
    const auto fam = family(validate_discriminant(d));
    DukeRow r;
    r.d = d;
    r.h = fam.classes.h();
    r.log_eps = fam.unit.log_eps;
    r.period = integrate_along(f, fam, nodes) / fam.lengths.oriented;
    r.target = tgt;
    r.deviation = r.period - tgt;
    rows.push_back(r);
  }
  return rows;
}

void write_duke_json(std::ostream& os, const std::vector<DukeRow>& rows) {
  nlohmann::ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    out["rows"].push_back({{"d", r.d},
                           {"h", r.h},
                           {"log_eps", round_sig(r.log_eps)},
                           {"period", round_sig(r.period)},
                           {"target", round_sig(r.target)},
                           {"deviation", round_sig(r.deviation)}});
  }
  os << out.dump(2) << '\n';
}

}  // namespace geoint
