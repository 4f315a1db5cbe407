#include "geoint/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "geoint/format.hpp"

namespace geoint {

// --- candidate enumeration ---------------------------------------------------

Box bounding_box(const GeodesicArc& arc, Real margin) {
  if (!std::isfinite(arc.lo()) || !std::isfinite(arc.hi()))
    throw std::invalid_argument("bounding_box: arc window must be finite");
  const Point p = arc.point_at(arc.lo());
  const Point q = arc.point_at(arc.hi());
  Box b{std::min(p.x, q.x), std::max(p.x, q.x), std::min(p.y, q.y), std::max(p.y, q.y)};
  if (!arc.vertical() && arc.lo() <= 0 && arc.hi() >= 0) b.y1 = arc.radius();
  const Real mx = margin * (1 + std::fabs(b.x0) + std::fabs(b.x1));
  const Real my = margin * (1 + b.y1);
  b.x0 -= mx;
  b.x1 += mx;
  b.y0 = std::max(b.y0 - my, b.y0 / 2);
  b.y1 += my;
  return b;
}

bool semicircle_meets_box(Real center, Real radius, const Box& box) {
  const Real dx = std::max({box.x0 - center, Real(0), center - box.x1});
  const Real near2 = dx * dx + box.y0 * box.y0;
  const Real fx = std::max(std::fabs(center - box.x0), std::fabs(center - box.x1));
  const Real far2 = fx * fx + box.y1 * box.y1;
  const Real r2 = radius * radius;
  const Real slack = 1e-12L * (1 + far2);
  return near2 <= r2 + slack && r2 <= far2 + slack;
}

namespace {

// Forms with leading coefficient a > 0 whose axis meets the box.
void forms_for_a(Int d, Int a, const Box& box, std::vector<QuadForm>& out) {
  const Real R = std::sqrt(static_cast<Real>(d)) / (2 * static_cast<Real>(a));
  if (R < box.y0 * (1 - 1e-12L)) return;
  const Real eps = 1e-9L * (1 + std::fabs(box.x0) + std::fabs(box.x1) + R);
  const Real s = std::sqrt(std::max(Real(0), R * R - box.y0 * box.y0));
  // centres whose circle reaches above the box top everywhere are excluded
  Real intervals[2][2];
  int count = 0;
  if (R > box.y1) {
    const Real t = std::sqrt(R * R - box.y1 * box.y1);
    const Real ex_lo = box.x1 - t + eps, ex_hi = box.x0 + t - eps;
    if (ex_lo < ex_hi) {
      intervals[count][0] = box.x0 - s - eps;
      intervals[count++][1] = ex_lo;
      intervals[count][0] = ex_hi;
      intervals[count++][1] = box.x1 + s + eps;
    }
  }
  if (count == 0) {
    intervals[count][0] = box.x0 - s - eps;
    intervals[count++][1] = box.x1 + s + eps;
  }
  const Real two_a = 2 * static_cast<Real>(a);
  const Int four_a = 4 * a;
  const Int parity = d & 1;
  for (int k = 0; k < count; ++k) {
    // centre -b / (2a) in [lo, hi]  <=>  b in [-2a hi, -2a lo]
    Int blo = static_cast<Int>(std::ceil(-two_a * intervals[k][1]));
    const Int bhi = static_cast<Int>(std::floor(-two_a * intervals[k][0]));
    if ((blo & 1) != parity) ++blo;
    for (Int b = blo; b <= bhi; b += 2) {
      const Wide num = static_cast<Wide>(b) * b - d;
      if (num % four_a != 0) continue;
      const Int c = narrow(num / four_a);
      if (gcd(gcd(a, b), c) != 1) continue;
      const Real center = -static_cast<Real>(b) / two_a;
      if (!semicircle_meets_box(center, R, box)) continue;
      out.push_back({a, b, c});
    }
  }
}

Int max_leading(Int d, const Box& box) {
  if (!(box.y0 > 0)) throw std::invalid_argument("candidate_forms: box must lie above the real axis");
  return static_cast<Int>(std::floor(std::sqrt(static_cast<Real>(d)) / (2 * box.y0))) + 1;
}

std::vector<QuadForm> with_negations(const std::vector<QuadForm>& positive) {
  std::vector<QuadForm> out;
  out.reserve(2 * positive.size());
  for (const auto& q : positive) {
    out.push_back(q);
    out.push_back(q.negated());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<QuadForm> candidate_forms_serial(const Discriminant& d, const Box& box) {
  const Int amax = max_leading(d.d, box);
  std::vector<QuadForm> pos;
  for (Int a = 1; a <= amax; ++a) forms_for_a(d.d, a, box, pos);
  return with_negations(pos);
}

std::vector<QuadForm> candidate_forms(const Discriminant& d, const Box& box) {
  const Int amax = max_leading(d.d, box);
  std::vector<std::vector<QuadForm>> per_a(static_cast<std::size_t>(amax));
#pragma omp parallel for schedule(dynamic, 16)
  for (Int a = 1; a <= amax; ++a) forms_for_a(d.d, a, box, per_a[static_cast<std::size_t>(a - 1)]);
  std::vector<QuadForm> pos;
  for (auto& v : per_a) pos.insert(pos.end(), v.begin(), v.end());
  return with_negations(pos);
}

// --- segments ------------------------------------------------------------------

GeodesicArc segment_from_endpoints(const Point& p, const Point& q) {
  if (!(p.y > 0) || !(q.y > 0)) throw std::invalid_argument("segment endpoints must lie in the upper half-plane");
  if (p.x == q.x && p.y == q.y) throw std::invalid_argument("segment has zero length");
  GeodesicArc g;
  if (p.x == q.x) {
    g = q.y > p.y ? GeodesicArc::from_feet(BoundaryPoint::finite(p.x), BoundaryPoint::infinity())
                  : GeodesicArc::from_feet(BoundaryPoint::infinity(), BoundaryPoint::finite(p.x));
  } else {
    const Real c = ((q.x - p.x) * (q.x + p.x) + (q.y - p.y) * (q.y + p.y)) / (2 * (q.x - p.x));
    const Real r = std::hypot(p.x - c, p.y);
    const Real sigma = q.x > p.x ? 1 : -1;
    g = GeodesicArc::from_feet(BoundaryPoint::finite(c - sigma * r), BoundaryPoint::finite(c + sigma * r));
  }
  const Real t0 = g.param_of(p);
  return g.with_window(t0, t0 + dist(p, q));
}

GeodesicArc segment_from_tangent(const UnitTangent& u, Real length) {
  if (!(u.y > 0)) throw std::invalid_argument("segment base point must lie in the upper half-plane");
  if (!(length > 0)) throw std::invalid_argument("segment has zero length");
  return forward_arc(u, length);
}

namespace {

struct RawCrossing {
  QuadForm form;
  Crossing crossing;
};

std::vector<RawCrossing> crossings_with(const GeodesicArc& beta, Int d, const std::vector<QuadForm>& forms,
                                        bool parallel) {
  std::vector<std::optional<Crossing>> hits(forms.size());
  const long n = static_cast<long>(forms.size());
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (long i = 0; i < n; ++i) {
    const auto& q = forms[static_cast<std::size_t>(i)];
    hits[static_cast<std::size_t>(i)] = intersect_arcs(beta, GeodesicArc::axis_of(q.a, q.b, d));
  }
  std::vector<RawCrossing> out;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (hits[i]) out.push_back({forms[i], *hits[i]});
  }
  return out;
}

// Position on a closed curve of length len, in [0, len); positions within tol
// of len are identified with 0.
Real wrap_length(Real t, Real len, Real tol) {
  t = std::fmod(t, len);
  if (t < 0) t += len;
  if (t >= len - tol) t = 0;
  return t;
}

bool at_endpoint(const GeodesicArc& beta, Real t) {
  return std::fabs(t - beta.lo()) < kAngleTolerance || std::fabs(beta.hi() - t) < kAngleTolerance;
}

SegmentResult segment_impl(const GeodesicArc& beta, const Discriminant& d, const AngleWindow& window,
                           bool parallel) {
  if (!(beta.length() > 0) || !std::isfinite(beta.length()))
    throw std::invalid_argument("segment_vs_family: segment must have finite positive length");
  const Box box = bounding_box(beta);
  const auto forms = parallel ? candidate_forms(d, box) : candidate_forms_serial(d, box);
  SegmentResult res;
  for (const auto& rc : crossings_with(beta, d.d, forms, parallel)) {
    if (!window.contains(rc.crossing.angle)) continue;
    ++res.oriented_count;
    if (rc.form.a < 0) continue;  // -q is the same unoriented geodesic
    IntersectionEvent e;
    e.lifted = rc.crossing.point;
    e.point = reduce_to_fundamental_domain(rc.crossing.point).point;
    e.angle = rc.crossing.angle;
    e.oriented_angle = rc.crossing.oriented_angle;
    e.form = rc.form;
    e.param = rc.crossing.param1 - beta.lo();
    e.degenerate = rc.crossing.near_tangent;
    e.at_endpoint = at_endpoint(beta, rc.crossing.param1);
    res.degenerate += e.degenerate ? 1 : 0;
    res.endpoint_hits += e.at_endpoint ? 1 : 0;
    res.events.push_back(e);
  }
  std::sort(res.events.begin(), res.events.end(), [](const auto& x, const auto& y) {
    return std::tie(x.form.b, x.form.a) < std::tie(y.form.b, y.form.a);
  });
  return res;
}

}  // namespace

SegmentResult segment_vs_family(const GeodesicArc& beta, const Discriminant& d, const AngleWindow& window) {
  return segment_impl(beta, d, window, true);
}

SegmentResult segment_vs_family_serial(const GeodesicArc& beta, const Discriminant& d,
                                       const AngleWindow& window) {
  return segment_impl(beta, d, window, false);
}

// --- family chart -------------------------------------------------------------

FamilyChart::FamilyChart(const GeodesicFamily& fam) : fam_(&fam), locator_(fam.classes) {
  const Int d = fam.disc.d;
  for (const auto& cycle : fam.classes.cycles) {
    std::vector<Real> off(cycle.size(), 0);
    for (std::size_t j = 1; j < cycle.size(); ++j) {
      // prev.act(step) = next, so step maps the axis of next onto the axis of prev
      const auto& prev = cycle[j - 1].form;
      const auto& next = cycle[j].form;
      const Point apex = GeodesicArc::axis_of(next.a, next.b, d).apex();
      const Point mapped = mobius_apply(cycle[j].step, apex);
      off[j] = off[j - 1] + GeodesicArc::axis_of(prev.a, prev.b, d).param_of(mapped);
    }
    offsets_.push_back(std::move(off));
  }
  for (const auto& rep : fam.classes.reps) negation_.push_back(locator_.locate(rep.negated()).class_index);
}

FamilyChart::Location FamilyChart::locate(const QuadForm& q, const Point& on_axis) const {
  const auto loc = locator_.locate(q);
  const auto& r = fam_->classes.cycles[loc.class_index][loc.position].form;
  // q.act(M) = r, so M^-1 carries the axis of q onto the axis of r
  const Point p = mobius_apply(loc.to_reduced.inverse(), on_axis);
  const Real len = fam_->members[loc.class_index].length();
  Real t = offsets_[loc.class_index][loc.position] + GeodesicArc::axis_of(r.a, r.b, fam_->disc.d).param_of(p);
  t = std::fmod(t, len);
  if (t < 0) t += len;
  if (t >= len) t -= len;
  return {loc.class_index, t};
}

// --- family against family ----------------------------------------------------

PairResult family_vs_family(const Discriminant& d1, const Discriminant& d2, const PairOptions& opt) {
  if (d1.d == d2.d && !opt.allow_self)
    throw std::invalid_argument("family_vs_family: equal discriminants need the self-pairing exclusion enabled");
  const auto fam1 = family(d1);
  const auto fam2 = family(d2);
  const FamilyChart chart2(fam2);
  const bool same = d1.d == d2.d;

  struct Item {
    std::size_t member;
    Piece piece;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < fam1.members.size(); ++i) {
    for (auto& p : walk(fam1.members[i], opt.max_piece)) items.push_back({i, std::move(p)});
  }

  // Pieces are widened slightly so that a crossing sitting exactly on a cut
  // (or on the base point of a member) is seen from both sides; duplicates are
  // removed afterwards using the positions along both members.
  constexpr Real kPad = 1e-9L;
  struct Found {
    IntersectionEvent event;
    bool excluded = false;
  };
  std::vector<std::vector<Found>> results(items.size());
  const long n = static_cast<long>(items.size());
#pragma omp parallel for schedule(dynamic, 1) if (opt.parallel)
  for (long k = 0; k < n; ++k) {
    const auto& item = items[static_cast<std::size_t>(k)];
    auto& out = results[static_cast<std::size_t>(k)];
    const auto& piece_arc = item.piece.arc;
    const auto arc = piece_arc.with_window(piece_arc.lo() - kPad, piece_arc.hi() + kPad);
    const Real len1 = fam1.members[item.member].length();
    const auto forms = candidate_forms_serial(d2, bounding_box(arc));
    for (const auto& rc : crossings_with(arc, d2.d, forms, false)) {
      const auto loc = chart2.locate(rc.form, rc.crossing.point);
      Found f;
      f.excluded = same && (loc.member == item.member || loc.member == chart2.negation_of(item.member));
      auto& e = f.event;
      e.lifted = rc.crossing.point;
      e.point = reduce_to_fundamental_domain(rc.crossing.point).point;
      e.angle = rc.crossing.angle;
      e.oriented_angle = rc.crossing.oriented_angle;
      e.form = rc.form;
      e.param = wrap_length(item.piece.start + (rc.crossing.param1 - piece_arc.lo()), len1, kPad);
      e.degenerate = rc.crossing.near_tangent;
      e.at_endpoint = at_endpoint(piece_arc, rc.crossing.param1);
      e.member1 = item.member;
      e.piece = item.piece.index;
      e.member2 = loc.member;
      e.param2 = wrap_length(loc.param, fam2.members[loc.member].length(), kPad);
      out.push_back(f);
    }
  }

  std::vector<Found> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  std::stable_sort(all.begin(), all.end(), [](const Found& x, const Found& y) {
    return std::tie(x.event.member1, x.event.member2, x.event.param) <
           std::tie(y.event.member1, y.event.member2, y.event.param);
  });
  std::vector<Found> unique;
  for (auto& f : all) {
    bool dup = false;
    // the same oriented pair crosses at most once at a given pair of positions
    // and angle; at elliptic points one pair of positions can carry several
    // crossings that differ in angle
    for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
      const auto& u = it->event;
      if (u.member1 != f.event.member1 || u.member2 != f.event.member2 || f.event.param - u.param > 4 * kPad) break;
      Real dphi = std::fabs(u.oriented_angle - f.event.oriented_angle);
      dphi = std::min(dphi, 2 * kPi - dphi);
      if (std::fabs(u.param2 - f.event.param2) < 4 * kPad && dphi < 1e-6L) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(std::move(f));
  }

  // merge order: member, piece, then b and a of the crossing translate
  std::stable_sort(unique.begin(), unique.end(), [](const Found& x, const Found& y) {
    return std::tie(x.event.member1, x.event.piece, x.event.form.b, x.event.form.a) <
           std::tie(y.event.member1, y.event.piece, y.event.form.b, y.event.form.a);
  });

  PairResult res;
  res.d1 = d1.d;
  res.d2 = d2.d;
  res.l1 = fam1.lengths.unoriented;
  res.l2 = fam2.lengths.unoriented;
  for (auto& f : unique) {
    if (f.excluded) {
      ++res.excluded_self;
      continue;
    }
    ++res.oriented_total;
    res.degenerate += f.event.degenerate ? 1 : 0;
    if (opt.window.contains(f.event.angle)) ++res.in_window;
    res.events.push_back(std::move(f.event));
  }
  return res;
}

// --- statistics ----------------------------------------------------------------

Real sine_law_cdf(Real theta) {
  if (theta <= 0) return 0;
  if (theta >= kPi) return 1;
  return (1 - std::cos(theta)) / 2;
}

Real sine_law_target(const AngleWindow& w) { return 3 / (kPi * kPi) * (std::cos(w.lo) - std::cos(w.hi)); }

Real ks_statistic(std::vector<Real> sample, const std::function<Real(Real)>& cdf) {
  if (sample.empty()) return 0;
  std::sort(sample.begin(), sample.end());
  const Real n = static_cast<Real>(sample.size());
  Real D = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Real f = cdf(sample[i]);
    D = std::max({D, (static_cast<Real>(i) + 1) / n - f, f - static_cast<Real>(i) / n});
  }
  return D;
}

Real ks_critical(std::size_t n, Real alpha) {
  Real c;
  if (alpha == 0.05L)
    c = 1.358L;
  else if (alpha == 0.01L)
    c = 1.628L;
  else
    c = std::sqrt(-0.5L * std::log(alpha / 2));
  return c / std::sqrt(static_cast<Real>(n));
}

Real ks_pvalue(Real D, std::size_t n) {
  if (n == 0) return 1;
  const Real rn = std::sqrt(static_cast<Real>(n));
  const Real lambda = (rn + 0.12L + 0.11L / rn) * D;
  if (lambda < 0.2L) return 1;
  Real sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const Real term = std::exp(-2 * k * k * lambda * lambda);
    sum += (k % 2 ? 2 : -2) * term;
    if (term < 1e-18L) break;
  }
  return std::clamp(sum, Real(0), Real(1));
}

std::vector<Real> sample_sine_law(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Real> out(n);
  for (auto& v : out) v = std::acos(1 - 2 * static_cast<Real>(u(rng)));
  return out;
}

EquidistributionReport equidistribution_report(const std::vector<IntersectionEvent>& events, Real l_beta,
                                               Real l_cd, std::size_t bins, const AngleWindow& window,
                                               Int d) {
  if (bins < 4) throw std::invalid_argument("equidistribution_report: at least 4 bins");
  EquidistributionReport r;
  r.d = d;
  r.l_beta = l_beta;
  r.l_cd = l_cd;
  r.window = window;
  r.target = sine_law_target(window);
  std::vector<Real> angles, params;
  for (const auto& e : events) {
    if (e.degenerate) {
      ++r.degenerate;
      continue;
    }
    if (!window.contains(e.angle)) continue;
    angles.push_back(e.angle);
    params.push_back(e.param / l_beta);
  }
  r.count = angles.size();
  r.normalized = (l_beta > 0 && l_cd > 0) ? static_cast<Real>(r.count) / (l_beta * l_cd) : 0;
  const Real clo = std::cos(window.lo), mass = clo - std::cos(window.hi);
  auto cdf = [&](Real t) { return std::clamp((clo - std::cos(t)) / mass, Real(0), Real(1)); };
  r.ks_statistic = ks_statistic(angles, cdf);
  r.ks_pvalue = ks_pvalue(r.ks_statistic, angles.size());
  r.param_ks_statistic = ks_statistic(params, [](Real t) { return std::clamp(t, Real(0), Real(1)); });
  r.param_ks_pvalue = ks_pvalue(r.param_ks_statistic, params.size());
  const Real width = (window.hi - window.lo) / static_cast<Real>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    HistogramBin bin;
    bin.lo = window.lo + static_cast<Real>(b) * width;
    bin.hi = b + 1 == bins ? window.hi : bin.lo + width;
    bin.expected = static_cast<Real>(r.count) * (std::cos(bin.lo) - std::cos(bin.hi)) / mass;
    r.histogram.push_back(bin);
  }
  for (Real a : angles) {
    auto b = static_cast<std::size_t>((a - window.lo) / width);
    r.histogram[std::min(b, bins - 1)].observed++;
  }
  return r;
}

void write_events_csv(std::ostream& os, Int d, const std::vector<IntersectionEvent>& events) {
  os << "schema_version,d,a,b,c,x,y,angle,param,degenerate\n";
  for (const auto& e : events) {
    os << kSchemaVersion << ',' << d << ',' << e.form.a << ',' << e.form.b << ',' << e.form.c << ','
       << fmt_real(e.point.x) << ',' << fmt_real(e.point.y) << ',' << fmt_real(e.angle) << ','
       << fmt_real(e.param) << ',' << (e.degenerate ? 1 : 0) << '\n';
  }
}

void write_pair_events_csv(std::ostream& os, Int d1, Int d2, const std::vector<IntersectionEvent>& events) {
  os << "schema_version,d1,d2,a,b,c,x,y,angle,param,member1,member2,param2,degenerate\n";
  for (const auto& e : events) {
    os << kSchemaVersion << ',' << d1 << ',' << d2 << ',' << e.form.a << ',' << e.form.b << ',' << e.form.c
       << ',' << fmt_real(e.point.x) << ',' << fmt_real(e.point.y) << ',' << fmt_real(e.angle) << ','
       << fmt_real(e.param) << ',' << e.member1 << ',' << e.member2 << ',' << fmt_real(e.param2) << ','
       << (e.degenerate ? 1 : 0) << '\n';
  }
}

void write_json(std::ostream& os, const EquidistributionReport& r) {
  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (const auto& b : r.histogram) {
    hist.push_back({{"lo", round_sig(b.lo)}, {"hi", round_sig(b.hi)}, {"observed", b.observed},
                    {"expected", round_sig(b.expected)}});
  }
  nlohmann::ordered_json j{{"schema_version", kSchemaVersion},
                   {"d", r.d},
                   {"count", r.count},
                   {"degenerate", r.degenerate},
                   {"l_beta", round_sig(r.l_beta)},
                   {"l_cd", round_sig(r.l_cd)},
                   {"normalized", round_sig(r.normalized)},
                   {"target", round_sig(r.target)},
                   {"deviation", round_sig(r.normalized - r.target)},
                   {"window", {round_sig(r.window.lo), round_sig(r.window.hi)}},
                   {"ks_statistic", round_sig(r.ks_statistic)},
                   {"ks_pvalue", round_sig(r.ks_pvalue)},
                   {"ks_critical_5pct", r.count ? round_sig(ks_critical(r.count, 0.05L)) : 0.0},
                   {"param_ks_statistic", round_sig(r.param_ks_statistic)},
                   {"param_ks_pvalue", round_sig(r.param_ks_pvalue)},
                   {"histogram", hist}};
  os << j.dump(2) << '\n';
}

}  // namespace geoint
