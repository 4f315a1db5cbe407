#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "brute_force.hpp"
#include "geoint/intersect.hpp"

using namespace geoint;
using namespace geoint::testing;

namespace {

std::vector<Real> sorted_angles(const std::vector<IntersectionEvent>& ev) {
  std::vector<Real> a;
  for (const auto& e : ev) a.push_back(e.angle);
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

TEST_CASE("candidate forms are exactly the axes meeting the box") {
  const std::vector<Box> boxes{{-0.5L, 0.5L, 0.8L, 1.2L}, {-0.3L, 0.1L, 0.5L, 0.7L}, {0.2L, 0.45L, 1.5L, 2.5L}};
  for (const auto& box : boxes) {
    const auto d = validate_discriminant(5);
    const auto got = candidate_forms(d, box);
    CHECK(got == candidate_forms_serial(d, box));
    std::vector<QuadForm> expected;
    for (Int a = -50; a <= 50; ++a) {
      if (a == 0) continue;
      for (Int b = -50; b <= 50; ++b) {
        if ((b * b - 5) % (4 * a) != 0) continue;
        const QuadForm q{a, b, (b * b - 5) / (4 * a)};
        if (!q.primitive()) continue;
        const Real c = -static_cast<Real>(b) / (2 * a), R = std::sqrt(5.0L) / (2 * std::abs(a));
        // nearest and farthest points of the box from the centre (c, 0)
        const Real nx = std::clamp(c, box.x0, box.x1);
        const Real near = std::hypot(nx - c, box.y0);
        const Real far = std::max(std::hypot(box.x0 - c, box.y1), std::hypot(box.x1 - c, box.y1));
        if (near <= R && R <= far) expected.push_back(q);
      }
    }
    std::sort(expected.begin(), expected.end(), [](const QuadForm& l, const QuadForm& r) {
      return std::tie(l.a, l.b) < std::tie(r.a, r.b);
    });
    CHECK(got == expected);
    for (const auto& q : got) CHECK(std::abs(q.a) <= std::sqrt(5.0) / 1.6);
  }
  const auto apex_box = Box{-1.1L, -0.9L, 1.3L, 1.5L};
  const auto d8 = candidate_forms(validate_discriminant(8), apex_box);
  CHECK(std::find(d8.begin(), d8.end(), QuadForm{1, 2, -1}) != d8.end());
}

TEST_CASE("vertical segment against a wide scan") {
  const Point p{0, 1}, q{0, std::exp(0.5L)};
  const auto beta = segment_from_endpoints(p, q);
  const auto res = segment_vs_family(beta, validate_discriminant(5));
  auto oracle = brute_crossings(plain(p, q), 5, 1000, 1000);
  REQUIRE(res.events.size() == oracle.size());
  CHECK(oracle.size() >= 2);
  CHECK(res.oriented_count == 2 * res.events.size());
  std::sort(oracle.begin(), oracle.end(), [](auto& l, auto& r) { return l.angle < r.angle; });
  const auto angles = sorted_angles(res.events);
  for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(std::fabs(static_cast<double>(angles[i] - oracle[i].angle)) < 1e-9);
  std::vector<QuadForm> got, want;
  for (const auto& e : res.events) got.push_back(e.form);
  for (const auto& e : oracle) want.push_back(e.form);
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  CHECK(got == want);
}

TEST_CASE("random segments in the fundamental domain match the scan") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<long double> x(-0.5L, 0.5L), y(0.9L, 2.5L), len(0.1L, 1), ang(0, 2 * kPi);
  const std::vector<Int> ds{5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40, 41, 44, 53, 56, 60, 61, 65, 69, 73, 76, 77,
                            85, 88, 89, 92, 93, 97};
  std::uniform_int_distribution<std::size_t> pick(0, ds.size() - 1);
  int done = 0;
  std::size_t seen = 0;
  while (done < 60) {
    const Point p{x(rng), y(rng)};
    if (p.x * p.x + p.y * p.y < 1) continue;
    const auto beta = segment_from_tangent({p.x, p.y, ang(rng)}, len(rng));
    const Point q = beta.point_at(beta.hi());
    if (std::fabs(q.x) > 0.5L || q.x * q.x + q.y * q.y < 1) continue;
    ++done;
    const Int d = ds[pick(rng)];
    const auto res = segment_vs_family(beta, validate_discriminant(d));
    const auto ser = segment_vs_family_serial(beta, validate_discriminant(d));
    CHECK(ser.oriented_count == res.oriented_count);
    CHECK(sorted_angles(ser.events) == sorted_angles(res.events));
    auto oracle = brute_crossings_auto(p, q, d);
    seen += oracle.size();
    CHECK_MESSAGE(res.events.size() == oracle.size(), "d = " << d);
    CHECK(res.oriented_count == 2 * res.events.size());
    std::sort(oracle.begin(), oracle.end(), [](auto& l, auto& r) { return l.angle < r.angle; });
    const auto angles = sorted_angles(res.events);
    if (angles.size() != oracle.size()) continue;
    for (std::size_t i = 0; i < oracle.size(); ++i)
      CHECK(std::fabs(static_cast<double>(angles[i] - oracle[i].angle)) < 1e-9);
  }
  CHECK(seen > 100);
}

TEST_CASE("segments high in the cusp meet nothing") {
  const Real y = std::sqrt(1001.0L) / 2 * 1.01L;
  const auto beta = segment_from_endpoints({-0.3L, y}, {0.2L, y * 1.1L});
  const auto res = segment_vs_family(beta, validate_discriminant(1001));
  CHECK(res.events.empty());
  CHECK(res.oriented_count == 0);
}

TEST_CASE("window additivity and monotonicity") {
  const auto beta = segment_from_endpoints({-0.4L, 1.1L}, {0.45L, 1.6L});
  const auto d = validate_discriminant(229);
  const auto full = segment_vs_family(beta, d).events.size();
  const std::vector<Real> cuts{0, 0.4L, 1.1L, 2.0L, kPi};
  std::size_t sum = 0, prefix = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto part = segment_vs_family(beta, d, {cuts[i], cuts[i + 1]}).events.size();
    sum += part;
    const auto grow = segment_vs_family(beta, d, {0, cuts[i + 1]}).events.size();
    CHECK(grow >= prefix);
    prefix = grow;
  }
  CHECK(full > 0);
  CHECK(sum == full);
}

TEST_CASE("counts and angles are invariant under the modular group") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> letter(0, 2);
  const auto beta = segment_from_endpoints({-0.2L, 1.3L}, {0.4L, 1.05L});
  for (Int dv : {5, 21, 60, 97}) {
    const auto d = validate_discriminant(dv);
    const auto base = segment_vs_family(beta, d);
    for (int k = 0; k < 20; ++k) {
      Sl2z g = Sl2z::identity();
      for (int j = 0; j < 6; ++j) {
        const int l = letter(rng);
        g = g * (l == 0 ? Sl2z::translation(1) : l == 1 ? Sl2z::translation(-1) : Sl2z::inversion());
      }
      const auto moved = segment_vs_family(mobius_apply(g, beta), d);
      REQUIRE(moved.events.size() == base.events.size());
      const auto a = sorted_angles(base.events), b = sorted_angles(moved.events);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(static_cast<double>(a[i] - b[i])) < 1e-9);
    }
  }
}

TEST_CASE("family against family matches a brute-force scan") {
  const std::vector<std::pair<Int, Int>> pairs{{5, 8}, {5, 13}, {12, 21}, {13, 17}, {24, 28}, {60, 77}};
  for (const auto& [d1, d2] : pairs) {
    const auto r = family_vs_family(validate_discriminant(d1), validate_discriminant(d2));
    CHECK_MESSAGE(r.oriented_total == brute_pair_total(d1, d2), d1 << " " << d2);
    CHECK(r.oriented_total % 4 == 0);
    CHECK(r.in_window + r.degenerate == r.oriented_total);
    CHECK(r.events.size() == r.oriented_total);
    CHECK(r.count() == doctest::Approx(static_cast<double>(r.oriented_total) / 4));
    // symmetry of the full count, angles reflected
    const auto s = family_vs_family(validate_discriminant(d2), validate_discriminant(d1));
    CHECK(s.oriented_total == r.oriented_total);
    auto a = sorted_angles(r.events), b = sorted_angles(s.events);
    std::transform(b.begin(), b.end(), b.begin(), [](Real t) { return kPi - t; });
    std::sort(b.begin(), b.end());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(static_cast<double>(a[i] - b[i])) < 1e-9);
  }
}

TEST_CASE("family pairs: windows, parallel agreement and self pairs") {
  const auto d1 = validate_discriminant(105), d2 = validate_discriminant(140);
  PairOptions serial;
  serial.parallel = false;
  const auto par = family_vs_family(d1, d2);
  const auto ser = family_vs_family(d1, d2, serial);
  CHECK(par.oriented_total == ser.oriented_total);
  REQUIRE(par.events.size() == ser.events.size());
  for (std::size_t i = 0; i < par.events.size(); ++i) CHECK(par.events[i].angle == ser.events[i].angle);
  PairOptions lower, upper;
  lower.window = {0, 1};
  upper.window = {1, kPi};
  CHECK(family_vs_family(d1, d2, lower).in_window + family_vs_family(d1, d2, upper).in_window == par.in_window);
  CHECK_THROWS_AS(family_vs_family(d1, d1), std::invalid_argument);
  PairOptions self;
  self.allow_self = true;
  const auto s = family_vs_family(d1, d1, self);
  CHECK(s.oriented_total % 4 == 0);
  CHECK(s.excluded_self > 0);
}

TEST_CASE("sine law helpers") {
  CHECK(sine_law_cdf(0) == doctest::Approx(0));
  CHECK(sine_law_cdf(kPi) == doctest::Approx(1));
  CHECK(sine_law_cdf(kPi / 2) == doctest::Approx(0.5));
  CHECK(sine_law_target({0, kPi}) == doctest::Approx(0.6079271019).epsilon(1e-10));
  // the density integrates to one
  Real mass = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) mass += std::sin((i + 0.5L) * kPi / n) / 2 * kPi / n;
  CHECK(mass == doctest::Approx(1).epsilon(1e-8));
  const auto sample = sample_sine_law(10000, 7);
  CHECK(ks_statistic(sample, sine_law_cdf) < ks_critical(sample.size(), 0.01L));
  CHECK(ks_critical(10000, 0.05L) == doctest::Approx(1.358 / 100).epsilon(1e-3));
  // a uniform sample is far from the sine law
  std::vector<Real> uniform;
  for (int i = 0; i < 10000; ++i) uniform.push_back((i + 0.5L) * kPi / 10000);
  CHECK(ks_statistic(uniform, sine_law_cdf) > ks_critical(uniform.size(), 0.01L));
}

TEST_CASE("equidistribution report bookkeeping") {
  const auto beta = segment_from_endpoints({-0.45L, 1.2L}, {0.4L, 1.9L});
  const auto d = validate_discriminant(1009);
  const auto res = segment_vs_family(beta, d);
  const auto rep = equidistribution_report(res.events, beta.length(), total_lengths(d).unoriented, 8, {}, 1009);
  std::size_t observed = 0;
  Real expected = 0;
  for (const auto& b : rep.histogram) {
    observed += b.observed;
    expected += b.expected;
  }
  CHECK(observed == rep.count);
  CHECK(expected == doctest::Approx(static_cast<double>(rep.count)));
  CHECK(rep.normalized == doctest::Approx(static_cast<double>(rep.count / (rep.l_beta * rep.l_cd))));
  const auto empty = equidistribution_report({}, 1, 1, 4);
  CHECK(empty.count == 0);
  CHECK(empty.histogram.size() == 4);
  CHECK_THROWS(equidistribution_report({}, 1, 1, 3));
  std::ostringstream csv;
  write_events_csv(csv, 1009, res.events);
  CHECK(csv.str().rfind("schema_version,d,a,b,c,x,y,angle,param,degenerate\n", 0) == 0);
}
