#include "geoint/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "geoint/format.hpp"
#include "geoint/geodesics.hpp"

namespace geoint {

void KernelParams::validate() const {
  if (!(delta > 0) || !(delta < 1)) throw std::invalid_argument("kernel: delta must lie in (0, 1)");
  if (!(theta1 >= 0) || !(theta2 <= kPi) || !(theta1 <= theta2))
    throw std::invalid_argument("kernel: angle window must satisfy 0 <= theta1 <= theta2 <= pi");
}

int k_delta(const UnitTangent& u1, const UnitTangent& u2, const KernelParams& p) {
  const auto c = intersect_arcs(forward_arc(u1, p.delta), forward_arc(u2, p.delta));
  return c && p.window().contains(c->angle) ? 1 : 0;
}

// --- enumeration of nearby translates -----------------------------------------

namespace {

// x d + y c = g with g = gcd(d, c) >= 0
Int extended_gcd(Int a, Int b, Int& x, Int& y) {
  Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    const Int q = floor_div(a, b);
    std::tie(a, b) = std::make_tuple(b, a - q * b);
    std::tie(x0, x1) = std::make_tuple(x1, x0 - q * x1);
    std::tie(y0, y1) = std::make_tuple(y1, y0 - q * y1);
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

Sl2z normalise(const Sl2z& g) {
  if (g.r < 0 || (g.r == 0 && g.s < 0)) return g.negated();
  return g;
}

// Every eta with dist(w1, eta w2) < radius, for arbitrary points; complete
// because Im(eta w2) = y2 / |c w2 + d|^2 must stay within a factor e^radius of y1.
std::vector<Sl2z> near_cosets(const Point& w1, const Point& w2, Real radius) {
  constexpr Real slack = 1e-9L;
  const Real er = std::exp(radius) * (1 + slack);
  const Real m = w2.y * er / w1.y;  // bound on |c w2 + d|^2
  const Real cmax = std::sqrt(m) / w2.y;
  const Real ch = std::cosh(radius);
  std::vector<Sl2z> out;
  auto add_translates = [&](const Sl2z& eta0) {
    const Point v = mobius_apply(eta0, w2);
    // (x1 - x)^2 < 2 y1 y (cosh r - 1) - (y1 - y)^2
    const Real room = 2 * w1.y * v.y * (ch - 1) * (1 + slack) - (w1.y - v.y) * (w1.y - v.y);
    if (room < 0) return;
    const Real span = std::sqrt(room) + slack;
    const Int lo = static_cast<Int>(std::ceil(w1.x - v.x - span));
    const Int hi = static_cast<Int>(std::floor(w1.x - v.x + span));
    for (Int n = lo; n <= hi; ++n) {
      const Sl2z eta = Sl2z::translation(n) * eta0;
      if (dist(w1, mobius_apply(eta, w2)) < radius) out.push_back(eta);
    }
  };
  add_translates(Sl2z::identity());
  for (Int c = 1; c <= static_cast<Int>(std::floor(cmax + slack)); ++c) {
    const Real cy = static_cast<Real>(c) * w2.y;
    const Real room = m - cy * cy;
    if (room < 0) continue;
    const Real span = std::sqrt(room) + slack;
    const Real cx = static_cast<Real>(c) * w2.x;
    const Int lo = static_cast<Int>(std::ceil(-cx - span));
    const Int hi = static_cast<Int>(std::floor(-cx + span));
    for (Int d = lo; d <= hi; ++d) {
      Int x = 0, y = 0;
      if (extended_gcd(d, c, x, y) != 1) continue;
      // a d - b c = 1 with a = x, b = -y
      add_translates(Sl2z{x, -y, c, d});
    }
  }
  return out;
}

struct Frame {
  UnitTangent reduced;
  Sl2z map;  // reduced = map . original
};

Frame reduce(const UnitTangent& u) {
  const auto r = reduce_to_fundamental_domain(u);
  return {r.tangent, r.map};
}

// K for tangents already moved into the fundamental domain.
int K_reduced(const UnitTangent& w1, const UnitTangent& w2, const KernelParams& p) {
  // two arcs of length delta can only meet if their base points are within 2 delta
  const Real radius = 2 * p.delta * (1 + 1e-9L) + 1e-12L;
  int total = 0;
  for (const auto& eta : near_cosets({w1.x, w1.y}, {w2.x, w2.y}, radius))
    total += k_delta(w1, mobius_apply(eta, w2), p);
  return total;
}

}  // namespace

std::vector<Sl2z> enumerate_gamma_near(const Point& z1, const Point& z2, Real radius) {
  if (!(radius > 0) || radius > 4) throw std::invalid_argument("enumerate_gamma_near: radius must lie in (0, 4]");
  const auto r1 = reduce_to_fundamental_domain(z1);
  const auto r2 = reduce_to_fundamental_domain(z2);
  std::vector<Sl2z> out;
  for (const auto& eta : near_cosets(r1.point, r2.point, radius)) {
    // dist(z1, gamma z2) = dist(g1 z1, g1 gamma g2^-1 (g2 z2))
    const Sl2z gamma = normalise(r1.map.inverse() * eta * r2.map);
    if (dist(z1, mobius_apply(gamma, z2)) < radius) out.push_back(gamma);
  }
  std::sort(out.begin(), out.end(), [](const Sl2z& a, const Sl2z& b) {
    return std::tie(a.r, a.s, a.p, a.q) < std::tie(b.r, b.s, b.p, b.q);
  });
  return out;
}

std::vector<Sl2z> enumerate_gamma_by_words(const Point& z1, const Point& z2, Real radius, int max_length) {
  const Sl2z gens[3] = {Sl2z::translation(1), Sl2z::translation(-1), Sl2z::inversion()};
  auto key = [](const Sl2z& g) {
    const Sl2z n = normalise(g);
    return std::make_tuple(n.p, n.q, n.r, n.s);
  };
  std::set<std::tuple<Int, Int, Int, Int>> seen{key(Sl2z::identity())};
  std::vector<Sl2z> frontier{Sl2z::identity()};
  std::vector<Sl2z> out;
  if (dist(z1, z2) < radius) out.push_back(Sl2z::identity());
  for (int len = 1; len <= max_length; ++len) {
    std::vector<Sl2z> next;
    for (const auto& w : frontier) {
      for (const auto& g : gens) {
        const Sl2z v = g * w;
        if (!seen.insert(key(v)).second) continue;
        next.push_back(v);
        if (dist(z1, mobius_apply(v, z2)) < radius) out.push_back(normalise(v));
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end(), [](const Sl2z& a, const Sl2z& b) {
    return std::tie(a.r, a.s, a.p, a.q) < std::tie(b.r, b.s, b.p, b.q);
  });
  return out;
}

int K_delta(const UnitTangent& u1, const UnitTangent& u2, const KernelParams& p) {
  p.validate();
  // K is invariant under the modular group in each argument
  return K_reduced(reduce(u1).reduced, reduce(u2).reduced, p);
}

Real crossing_weight(Real t, Real l, Real delta) { return std::max<Real>(0, std::min({t / delta, Real(1), (l + delta - t) / delta})); }

// --- reports ------------------------------------------------------------------

namespace {

void finish(IdentityReport& r) {
  r.abs_err = std::fabs(r.lhs - r.rhs);
  r.rel_err = r.rhs != 0 ? r.abs_err / std::fabs(r.rhs) : r.abs_err;
}

}  // namespace

void write_json(std::ostream& os, const IdentityReport& r, std::uint64_t seed, bool with_seed) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["identity"] = r.identity;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.parameters) params[k] = round_sig(v);
  j["parameters"] = params;
  j["lhs"] = round_sig(r.lhs);
  j["rhs"] = round_sig(r.rhs);
  j["abs_err"] = round_sig(r.abs_err);
  j["rel_err"] = round_sig(r.rel_err);
  if (r.stderr_ >= 0) j["stderr"] = round_sig(r.stderr_);
  for (const auto& [k, v] : r.extra) j[k] = round_sig(v);
  if (with_seed) j["seed"] = seed;
  j["passed"] = r.passed;
  os << j.dump(2) << '\n';
}

// --- the volume identity --------------------------------------------------------

IdentityReport check_volume_identity(const KernelParams& p, std::size_t n_samples, std::uint64_t seed) {
  p.validate();
  if (n_samples < 10000) throw std::invalid_argument("check_volume_identity: at least 10^4 samples are required");
  const UnitTangent base{0, 1, kPi / 2};
  const GeodesicArc arc1 = forward_arc(base, p.delta);
  // every g with k = 1 has its base point within 2 delta of i
  const Real rho = 2.1L * p.delta;
  const Real X = std::sinh(rho);
  const Real box = (2 * X) * (2 * rho) * (2 * kPi);
  constexpr std::size_t kTasks = 64;
  std::vector<Real> sum(kTasks, 0), sum2(kTasks, 0);
  const long tasks = static_cast<long>(kTasks);
#pragma omp parallel for schedule(dynamic, 1)
  for (long t = 0; t < tasks; ++t) {
    const auto task = static_cast<std::size_t>(t);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(task)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> ux(-static_cast<double>(X), static_cast<double>(X));
    std::uniform_real_distribution<double> ul(-static_cast<double>(rho), static_cast<double>(rho));
    std::uniform_real_distribution<double> uw(0.0, 2 * static_cast<double>(kPi));
    const std::size_t n = n_samples / kTasks + (task < n_samples % kTasks ? 1 : 0);
    Real s = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Real x = ux(rng);
      const Real y = std::exp(static_cast<Real>(ul(rng)));
      const Real w = uw(rng);
      // dV = dx dy dtheta / y^2 = dx d(log y) d(omega) / (2 y)
      const auto c = intersect_arcs(arc1, forward_arc({x, y, w}, p.delta));
      const Real f = c && p.window().contains(c->angle) ? box / (2 * y) : 0;
      s += f;
      s2 += f * f;
    }
    sum[task] = s;
    sum2[task] = s2;
  }
  Real s = 0, s2 = 0;
  for (std::size_t t = 0; t < kTasks; ++t) {
    s += sum[t];
    s2 += sum2[t];
  }
  const Real n = static_cast<Real>(n_samples);
  const Real mean = s / n;
  const Real var = std::max<Real>(0, s2 / n - mean * mean);
  IdentityReport r;
  r.identity = "kernel_volume";
  r.parameters = {{"delta", p.delta}, {"theta1", p.theta1}, {"theta2", p.theta2}, {"samples", n}};
  r.lhs = mean;
  r.rhs = (std::cos(p.theta1) - std::cos(p.theta2)) * p.delta * p.delta;
  r.stderr_ = std::sqrt(var / (n - 1));
  finish(r);
  r.passed = r.abs_err <= 3 * r.stderr_;
  r.extra = {{"z_score", r.stderr_ > 0 ? r.abs_err / r.stderr_ : 0}};
  return r;
}

IdentityReport check_volume_identity_psi(const KernelParams& p, std::size_t cells) {
  p.validate();
  if (cells < 2) throw std::invalid_argument("check_volume_identity_psi: at least two cells per delta");
  if (cells % 2) ++cells;
  const UnitTangent base{0, 1, kPi / 2};
  // t1, t2 over (-delta/2, 3 delta/2): the arc ends 0 and delta fall on cell edges
  const std::size_t nt = 2 * cells;
  const Real h = p.delta / static_cast<Real>(cells);
  // the crossing angle is phi or pi - phi mod pi depending on orientation;
  // cutting at both keeps k constant on every piece
  std::vector<Real> cuts{0, kPi, 2 * kPi};
  for (Real t : {p.theta1, p.theta2}) {
    for (Real c : {t, kPi - t, kPi + t, 2 * kPi - t}) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  constexpr int kSub = 8;
  std::vector<std::pair<Real, Real>> phis;  // (midpoint, integral of |sin| / 2)
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    for (int j = 0; j < kSub; ++j) {
      const Real a = cuts[k] + (cuts[k + 1] - cuts[k]) * j / kSub;
      const Real b = cuts[k] + (cuts[k + 1] - cuts[k]) * (j + 1) / kSub;
      if (b > a) phis.push_back({(a + b) / 2, std::fabs(std::cos(a) - std::cos(b)) / 2});
    }
  }
  const GeodesicArc arc1 = forward_arc(base, p.delta);
  Real total = 0;
  std::size_t outside_hits = 0;
  for (std::size_t i = 0; i < nt; ++i) {
    const Real t1 = -p.delta / 2 + (static_cast<Real>(i) + 0.5L) * h;
    for (std::size_t j = 0; j < nt; ++j) {
      const Real t2 = -p.delta / 2 + (static_cast<Real>(j) + 0.5L) * h;
      const bool inside = t1 > 0 && t1 < p.delta && t2 > 0 && t2 < p.delta;
      for (const auto& [phi, w] : phis) {
        const auto c = intersect_arcs(arc1, forward_arc(psi_map(t1, phi, t2), p.delta));
        if (!c || !p.window().contains(c->angle)) continue;
        total += w * h * h;
        outside_hits += inside ? 0 : 1;
      }
    }
  }
  IdentityReport r;
  r.identity = "kernel_volume_psi_chart";
  r.parameters = {{"delta", p.delta}, {"theta1", p.theta1}, {"theta2", p.theta2}, {"cells", static_cast<Real>(cells)}};
  r.lhs = total;
  r.rhs = (std::cos(p.theta1) - std::cos(p.theta2)) * p.delta * p.delta;
  finish(r);
  r.passed = r.abs_err <= 1e-12L * std::max<Real>(1, p.delta * p.delta) && outside_hits == 0;
  r.extra = {{"outside_hits", static_cast<Real>(outside_hits)}};
  return r;
}

// --- quadrature along closed geodesics ------------------------------------------

namespace {

struct Cell {
  Real mid;
  Real width;
};

// Cells covering [0, len) whose edges include every breakpoint, each at most h wide.
std::vector<Cell> aligned_cells(std::vector<Real> cuts, Real len, Real h) {
  cuts.push_back(0);
  cuts.push_back(len);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](Real a, Real b) { return std::fabs(a - b) < 1e-15L; }),
             cuts.end());
  std::vector<Cell> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Real a = cuts[k], b = cuts[k + 1];
    const auto n = static_cast<std::size_t>(std::max<Real>(1, std::ceil((b - a) / h)));
    const Real w = (b - a) / static_cast<Real>(n);
    for (std::size_t j = 0; j < n; ++j) out.push_back({a + (static_cast<Real>(j) + 0.5L) * w, w});
  }
  return out;
}

Real wrap(Real t, Real len) {
  t = std::fmod(t, len);
  return t < 0 ? t + len : t;
}

// Unit tangents along a closed geodesic, moved into the fundamental domain.
class Track {
 public:
  explicit Track(const ClosedGeodesic& g) : pieces_(walk(g)), length_(g.length()) {}
  Real length() const { return length_; }
  UnitTangent at(Real s) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
                               [](Real v, const Piece& pc) { return v < pc.start; });
    const Piece& pc = *std::prev(it);
    return reduce(pc.arc.tangent_at(pc.arc.lo() + (s - pc.start))).reduced;
  }

 private:
  std::vector<Piece> pieces_;
  Real length_;
};

// Sum of K * area over the product of two lists of cells.
Real grid_integral(const std::vector<UnitTangent>& u1, const std::vector<Cell>& c1,
                   const std::vector<UnitTangent>& u2, const std::vector<Cell>& c2, const KernelParams& p,
                   bool parallel) {
  std::vector<Real> rows(c1.size(), 0);
  const long n = static_cast<long>(c1.size());
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (long i = 0; i < n; ++i) {
    const auto a = static_cast<std::size_t>(i);
    Real row = 0;
    for (std::size_t b = 0; b < c2.size(); ++b) {
      const int k = K_reduced(u1[a], u2[b], p);
      if (k) row += k * c2[b].width;
    }
    rows[a] = row * c1[a].width;
  }
  Real total = 0;
  for (Real r : rows) total += r;
  return total;
}

}  // namespace

IdentityReport check_count_identity(const Discriminant& d1, const Discriminant& d2, const KernelParams& p,
                                    const CountIdentityOptions& opt) {
  p.validate();
  if (opt.grid < 8) throw std::invalid_argument("check_count_identity: the grid needs at least 8 cells per delta");
  if (d1.d == d2.d) throw std::invalid_argument("check_count_identity: discriminants must differ");
  const auto fam1 = family(d1);
  const auto fam2 = family(d2);
  PairOptions popt;
  popt.window = p.window();
  popt.parallel = opt.parallel;
  const auto pair = family_vs_family(d1, d2, popt);

  // the integrand is constant off the lines s = p and s = p - delta of each crossing
  std::vector<std::vector<Real>> cuts1(fam1.members.size()), cuts2(fam2.members.size());
  for (const auto& e : pair.events) {
    const Real l1 = fam1.members[e.member1].length();
    const Real l2 = fam2.members[e.member2].length();
    cuts1[e.member1].push_back(wrap(e.param, l1));
    cuts1[e.member1].push_back(wrap(e.param - p.delta, l1));
    cuts2[e.member2].push_back(wrap(e.param2, l2));
    cuts2[e.member2].push_back(wrap(e.param2 - p.delta, l2));
  }
  const Real h = p.delta / static_cast<Real>(opt.grid);
  auto sample = [&](const GeodesicFamily& fam, const std::vector<std::vector<Real>>& cuts,
                    std::vector<std::vector<Cell>>& cells, std::vector<std::vector<UnitTangent>>& tangents) {
    for (std::size_t m = 0; m < fam.members.size(); ++m) {
      const Track track(fam.members[m]);
      cells.push_back(aligned_cells(cuts[m], track.length(), h));
      std::vector<UnitTangent> u;
      u.reserve(cells.back().size());
      for (const auto& c : cells.back()) u.push_back(track.at(c.mid));
      tangents.push_back(std::move(u));
    }
  };
  std::vector<std::vector<Cell>> cells1, cells2;
  std::vector<std::vector<UnitTangent>> tan1, tan2;
  sample(fam1, cuts1, cells1, tan1);
  sample(fam2, cuts2, cells2, tan2);
  Real integral = 0;
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i < cells1.size(); ++i) {
    for (std::size_t j = 0; j < cells2.size(); ++j) {
      integral += grid_integral(tan1[i], cells1[i], tan2[j], cells2[j], p, opt.parallel);
      evaluations += cells1[i].size() * cells2[j].size();
    }
  }
  IdentityReport r;
  r.identity = "count_identity";
  r.parameters = {{"d1", static_cast<Real>(d1.d)}, {"d2", static_cast<Real>(d2.d)}, {"delta", p.delta},
                  {"theta1", p.theta1}, {"theta2", p.theta2}, {"grid", static_cast<Real>(opt.grid)}};
  r.lhs = integral / (p.delta * p.delta);
  r.rhs = static_cast<Real>(pair.in_window);
  finish(r);
  r.passed = std::llround(r.lhs) == static_cast<long long>(pair.in_window) && r.abs_err < 1e-6L;
  r.extra = {{"rounded_lhs", static_cast<Real>(std::llround(r.lhs))},
             {"oriented_total", static_cast<Real>(pair.oriented_total)},
             {"evaluations", static_cast<Real>(evaluations)}};
  return r;
}

// --- the weighted identity along a segment --------------------------------------

bool self_intersects(const GeodesicArc& segment) {
  const Real len = segment.length();
  if (!(len > 0) || !std::isfinite(len)) throw std::invalid_argument("self_intersects: segment must be finite");
  if (len > 4) throw std::invalid_argument("self_intersects: segment longer than 4 is not supported");
  const Point mid = segment.point_at((segment.lo() + segment.hi()) / 2);
  // a translate meeting the segment has its midpoint within one length of ours
  for (const auto& g : enumerate_gamma_near(mid, mid, len * (1 + 1e-9L) + 1e-12L)) {
    if (g == Sl2z::identity()) continue;
    if (intersect_arcs(segment, mobius_apply(g, segment))) return true;
  }
  return false;
}

IdentityReport check_weighted_identity(const GeodesicArc& beta, const Discriminant& d, const KernelParams& p,
                                       std::size_t grid) {
  p.validate();
  if (grid < 8) throw std::invalid_argument("check_weighted_identity: the grid needs at least 8 cells per delta");
  const Real l = beta.length();
  if (!(l > 0) || !std::isfinite(l)) throw std::invalid_argument("check_weighted_identity: segment must be finite");
  const GeodesicArc beta0 = beta.with_window(beta.lo(), beta.hi() + p.delta);
  if (self_intersects(beta0))
    throw std::invalid_argument("check_weighted_identity: the extended segment intersects itself");

  const auto fam = family(d);
  const FamilyChart chart(fam);
  const auto seg = segment_vs_family(beta0, d, p.window());
  Real weighted = 0;
  std::vector<Real> cuts_t;
  std::vector<std::vector<Real>> cuts_s(fam.members.size());
  for (const auto& e : seg.events) {
    // e stands for both orientations of its geodesic, with the same angle mod pi
    weighted += 2 * crossing_weight(e.param, l, p.delta);
    cuts_t.push_back(std::clamp(e.param, Real(0), l));
    cuts_t.push_back(std::clamp(e.param - p.delta, Real(0), l));
    for (const auto& q : {e.form, e.form.negated()}) {
      const auto loc = chart.locate(q, e.lifted);
      const Real len = fam.members[loc.member].length();
      cuts_s[loc.member].push_back(wrap(loc.param, len));
      cuts_s[loc.member].push_back(wrap(loc.param - p.delta, len));
    }
  }
  const Real h = p.delta / static_cast<Real>(grid);
  const auto cells_t = aligned_cells(cuts_t, l, h);
  std::vector<UnitTangent> tan_t;
  for (const auto& c : cells_t) tan_t.push_back(reduce(beta.tangent_at(beta.lo() + c.mid)).reduced);
  Real integral = 0;
  for (std::size_t m = 0; m < fam.members.size(); ++m) {
    const Track track(fam.members[m]);
    const auto cells_s = aligned_cells(cuts_s[m], track.length(), h);
    std::vector<UnitTangent> tan_s;
    for (const auto& c : cells_s) tan_s.push_back(track.at(c.mid));
    integral += grid_integral(tan_t, cells_t, tan_s, cells_s, p, true);
  }
  IdentityReport r;
  r.identity = "weighted_identity";
  const Point a = beta.point_at(beta.lo()), b = beta.point_at(beta.hi());
  r.parameters = {{"d", static_cast<Real>(d.d)}, {"delta", p.delta}, {"theta1", p.theta1}, {"theta2", p.theta2},
                  {"x0", a.x}, {"y0", a.y}, {"x1", b.x}, {"y1", b.y}, {"length", l}};
  r.lhs = integral / (p.delta * p.delta);
  r.rhs = weighted;
  finish(r);
  r.passed = r.abs_err < 1e-3L;
  r.extra = {{"events", static_cast<Real>(seg.events.size())}};
  return r;
}

// --- growth in the cusp ---------------------------------------------------------

UnitTangent horocycle_tangent(Real R, Real delta) {
  // on |z| = R, clockwise, starting delta / 2 before the top
  const Real alpha = std::atan(std::sinh(delta / 2));
  return {-R * std::sin(alpha), R * std::cos(alpha), alpha};
}

BlowupReport blowup_check(const KernelParams& p, const std::vector<Real>& heights) {
  p.validate();
  if (heights.size() < 2) throw std::invalid_argument("blowup_check: at least two heights are required");
  BlowupReport r;
  r.delta = p.delta;
  r.window = p.window();
  for (Real R : heights) {
    const UnitTangent u = horocycle_tangent(R, p.delta);
    r.rows.push_back({R, K_delta(u, u, p)});
  }
  const Real n = static_cast<Real>(r.rows.size());
  Real sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& row : r.rows) {
    const Real x = row.height, y = row.value;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const Real vxx = sxx - sx * sx / n, vxy = sxy - sx * sy / n, vyy = syy - sy * sy / n;
  r.slope = vxx > 0 ? vxy / vxx : 0;
  r.intercept = (sy - r.slope * sx) / n;
  r.r_squared = vyy > 0 ? vxy * vxy / (vxx * vyy) : 0;
  r.monotone = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i) r.monotone = r.monotone && r.rows[i].value >= r.rows[i - 1].value;
  r.passed = r.slope > 0 && r.r_squared >= 0.9L;
  return r;
}

void write_json(std::ostream& os, const BlowupReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["identity"] = "cusp_blowup";
  j["parameters"] = {{"delta", round_sig(r.delta)}, {"theta1", round_sig(r.window.lo)}, {"theta2", round_sig(r.window.hi)}};
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) j["rows"].push_back({{"height", round_sig(row.height)}, {"K", row.value}});
  j["slope"] = round_sig(r.slope);
  j["intercept"] = round_sig(r.intercept);
  j["r_squared"] = round_sig(r.r_squared);
  j["monotone"] = r.monotone;
  j["passed"] = r.passed;
  os << j.dump(2) << '\n';
}

}  // namespace geoint
