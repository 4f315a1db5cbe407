#pragma once
// Crossings of geodesic segments with the closed geodesics of discriminant d,
// and of two families with each other, with angle statistics.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "geoint/bqf.hpp"
#include "geoint/geodesics.hpp"
#include "geoint/hyperbolic.hpp"

namespace geoint {

struct Box {
  Real x0 = 0, x1 = 0, y0 = 1, y1 = 1;
};

/// Bounding box of the window of an arc, widened by a relative margin.
Box bounding_box(const GeodesicArc& arc, Real margin = 1e-9L);

/// True if the upper semicircle with the given centre and radius meets the box.
bool semicircle_meets_box(Real center, Real radius, const Box& box);

/// Every primitive form of discriminant d whose axis meets the box, ordered
/// by (a, b). Both q and -q are listed.
std::vector<QuadForm> candidate_forms(const Discriminant& d, const Box& box);
std::vector<QuadForm> candidate_forms_serial(const Discriminant& d, const Box& box);

struct AngleWindow {
  Real lo = 0;
  Real hi = kPi;
  bool contains(Real theta) const { return theta > lo && theta < hi; }
};

struct IntersectionEvent {
  Point point;        // reduced to the fundamental domain
  Point lifted;       // the crossing in H, on the lift of the segment
  Real angle = 0;     // from the segment to the geodesic, in (0, pi)
  Real oriented_angle = 0;
  QuadForm form;      // the translate responsible; a > 0 for unoriented events
  Real param = 0;     // arc length along the segment from its start
  bool degenerate = false;
  bool at_endpoint = false;
  // set by family_vs_family: which oriented geodesics cross and where
  std::size_t member1 = 0;
  std::size_t piece = 0;
  std::size_t member2 = 0;
  Real param2 = 0;  // arc length along member2 from its base point
};

struct SegmentResult {
  std::vector<IntersectionEvent> events;  // unoriented: one per {q, -q}
  std::size_t oriented_count = 0;         // crossings with every oriented translate
  std::size_t degenerate = 0;
  std::size_t endpoint_hits = 0;
};

/// Crossings of the segment (an arc with a finite window) with C_d whose
/// angle lies in the window.
SegmentResult segment_vs_family(const GeodesicArc& beta, const Discriminant& d,
                                const AngleWindow& window = {});
SegmentResult segment_vs_family_serial(const GeodesicArc& beta, const Discriminant& d,
                                       const AngleWindow& window = {});

/// A segment from two endpoints, or from a base tangent and a length.
GeodesicArc segment_from_endpoints(const Point& p, const Point& q);
GeodesicArc segment_from_tangent(const UnitTangent& u, Real length);

/// Locates a point on the axis of a form among the members of a family and
/// returns its arc length from the member's base point.
class FamilyChart {
 public:
  explicit FamilyChart(const GeodesicFamily& fam);
  struct Location {
    std::size_t member = 0;
    Real param = 0;  // in [0, member length)
  };
  Location locate(const QuadForm& q, const Point& on_axis) const;
  /// Offsets of the apexes of each cycle form along its member.
  const std::vector<std::vector<Real>>& offsets() const { return offsets_; }
  /// class index of -reps[i]
  std::size_t negation_of(std::size_t member) const { return negation_[member]; }

 private:
  const GeodesicFamily* fam_;
  ClassLocator locator_;
  std::vector<std::vector<Real>> offsets_;
  std::vector<std::size_t> negation_;
};

struct PairResult {
  Int d1 = 0, d2 = 0;
  std::vector<IntersectionEvent> events;  // every oriented crossing, angle reduced mod pi
  std::size_t oriented_total = 0;         // crossings of oriented family 1 with oriented family 2
  std::size_t in_window = 0;              // oriented crossings with angle in the window
  std::size_t degenerate = 0;
  std::size_t excluded_self = 0;
  Real l1 = 0, l2 = 0;                    // unoriented family lengths
  /// I(C_d1, C_d2) restricted to the window: the oriented total over 4.
  Real count() const { return static_cast<Real>(in_window) / 4; }
};

struct PairOptions {
  AngleWindow window{};
  bool allow_self = false;  // required when d1 == d2
  Real max_piece = 1;
  bool parallel = true;
};

PairResult family_vs_family(const Discriminant& d1, const Discriminant& d2, const PairOptions& opt = {});

// --- statistics ----------------------------------------------------------------

/// CDF of the density sin(theta)/2 on (0, pi).
Real sine_law_cdf(Real theta);
/// (3/pi^2) * integral of sin over the window.
Real sine_law_target(const AngleWindow& w);
/// Kolmogorov-Smirnov distance of a sample to a CDF.
Real ks_statistic(std::vector<Real> sample, const std::function<Real(Real)>& cdf);
/// Asymptotic critical value c(alpha)/sqrt(n) for alpha in {0.05, 0.01}.
Real ks_critical(std::size_t n, Real alpha);
/// Asymptotic Kolmogorov p-value for statistic D with n samples.
Real ks_pvalue(Real D, std::size_t n);
/// Draws from sin(theta)/2 by inversion.
std::vector<Real> sample_sine_law(std::size_t n, std::uint64_t seed);

struct HistogramBin {
  Real lo = 0, hi = 0;
  std::size_t observed = 0;
  Real expected = 0;
};

struct EquidistributionReport {
  Int d = 0;
  std::size_t count = 0;
  std::size_t degenerate = 0;
  Real l_beta = 0;
  Real l_cd = 0;
  Real normalized = 0;  // count / (l_beta l_cd)
  Real target = 0;
  Real ks_statistic = 0;
  Real ks_pvalue = 1;
  Real param_ks_statistic = 0;  // positions along the segment against uniform
  Real param_ks_pvalue = 1;
  AngleWindow window{};
  std::vector<HistogramBin> histogram;
};

EquidistributionReport equidistribution_report(const std::vector<IntersectionEvent>& events, Real l_beta,
                                               Real l_cd, std::size_t bins, const AngleWindow& window = {},
                                               Int d = 0);

void write_events_csv(std::ostream& os, Int d, const std::vector<IntersectionEvent>& events);
void write_pair_events_csv(std::ostream& os, Int d1, Int d2, const std::vector<IntersectionEvent>& events);
void write_json(std::ostream& os, const EquidistributionReport& r);

}  // namespace geoint
