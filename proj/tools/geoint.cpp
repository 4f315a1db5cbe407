// Command-line front end: class tables, segment and pair intersection runs,
// equidistribution tests and identity checks, written as CSV and JSON.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geoint/bqf.hpp"
#include "geoint/format.hpp"
#include "geoint/geodesics.hpp"
#include "geoint/hyperbolic.hpp"
#include "geoint/intersect.hpp"
#include "geoint/kernel.hpp"
#include "geoint/lfunc.hpp"

namespace {

using namespace geoint;
using json = nlohmann::ordered_json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Globals {
  std::uint64_t seed = 1;
  int threads = 0;
  int precision = 12;
  std::string out_dir;
  std::string format = "json";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes an artifact to the output directory if one was given.
void save(const Globals& g, const std::string& name, const std::string& content) {
  if (g.out_dir.empty()) return;
  std::filesystem::create_directories(g.out_dir);
  std::ofstream f(std::filesystem::path(g.out_dir) / name);
  if (!f) throw std::runtime_error("cannot write " + name);
  f << content;
}

// Sends a JSON report to stdout (unless CSV was requested) and to report.json.
void emit_report(const Globals& g, const json& report, const std::string& csv = {}) {
  const std::string text = report.dump(2) + "\n";
  save(g, "report.json", text);
  if (g.format == "csv" && !csv.empty())
    std::cout << csv;
  else
    std::cout << text;
}

template <class Report, class... Args>
json as_json(const Report& r, Args&&... args) {
  std::ostringstream os;
  write_json(os, r, std::forward<Args>(args)...);
  return json::parse(os.str());
}

// "a..b" into an inclusive integer range
std::pair<Int, Int> parse_range(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos) throw UsageError("--range expects a..b");
  try {
    const Int lo = std::stoll(s.substr(0, pos));
    const Int hi = std::stoll(s.substr(pos + 2));
    if (lo > hi) throw UsageError("--range is empty");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("--range expects integers a..b");
  }
}

Discriminant discriminant_or_usage(Int d) {
  try {
    return validate_discriminant(d);
  } catch (const DiscriminantError& e) {
    throw UsageError(std::string("invalid discriminant ") + std::to_string(d) + ": " + e.what());
  }
}

bool valid_discriminant(Int n) {
  try {
    validate_discriminant(n);
    return true;
  } catch (const DiscriminantError&) {
    return false;
  }
}

AngleWindow window_or_usage(double t1, double t2) {
  if (!(t1 >= 0) || !(t2 <= kPi) || !(t1 <= t2)) throw UsageError("the angle window needs 0 <= theta1 <= theta2 <= pi");
  return {static_cast<Real>(t1), static_cast<Real>(t2)};
}

// --- segment specification ------------------------------------------------------

struct SegmentSpec {
  std::vector<double> endpoints;  // x0 y0 x1 y1
  std::vector<double> tangent;    // x y theta length

  void add(CLI::App* app) {
    app->add_option("--segment", endpoints, "segment by endpoints x0 y0 x1 y1")->expected(4)->delimiter(',');
    app->add_option("--tangent", tangent, "segment by base point, direction and length: x y theta length")
        ->expected(4)
        ->delimiter(',');
  }
  GeodesicArc build() const {
    try {
      if (!endpoints.empty() && tangent.empty())
        return segment_from_endpoints({endpoints[0], endpoints[1]}, {endpoints[2], endpoints[3]});
      if (!tangent.empty() && endpoints.empty())
        return segment_from_tangent({tangent[0], tangent[1], wrap_two_pi(tangent[2])}, tangent[3]);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    throw UsageError("give exactly one of --segment and --tangent");
  }
};

json segment_json(const GeodesicArc& beta) {
  const Point a = beta.point_at(beta.lo()), b = beta.point_at(beta.hi());
  Real ymax = std::max(a.y, b.y);
  if (!beta.vertical() && beta.lo() <= 0 && beta.hi() >= 0) ymax = beta.radius();
  return {{"x0", round_sig(a.x)}, {"y0", round_sig(a.y)},     {"x1", round_sig(b.x)},
          {"y1", round_sig(b.y)}, {"length", round_sig(beta.length())}, {"y_max", round_sig(ymax)}};
}

// --- commands ---------------------------------------------------------------------

int cmd_classes(const Globals& g, std::optional<Int> d, const std::string& range) {
  std::vector<Int> list;
  bool explicit_d = false;
  if (d && range.empty()) {
    list.push_back(*d);
    explicit_d = true;
  } else if (!d && !range.empty()) {
    const auto [lo, hi] = parse_range(range);
    for (Int n = std::max<Int>(lo, 1); n <= hi; ++n) list.push_back(n);
  } else {
    throw UsageError("give exactly one of --d and --range");
  }
  std::ostringstream csv;
  json rows = json::array();
  bool header = true;
  int status = kPass;
  for (Int n : list) {
    Discriminant disc;
    try {
      disc = validate_discriminant(n);
    } catch (const DiscriminantError& e) {
      if (explicit_d) {
        std::cerr << e.what() << '\n';
        status = kUsage;
      }
      continue;
    }
    const auto classes = class_representatives(disc);
    const auto unit = pell_unit(disc);
    write_class_csv(csv, classes, unit, header);
    header = false;
    for (std::size_t i = 0; i < classes.reps.size(); ++i) {
      const auto& q = classes.reps[i];
      rows.push_back({{"d", n},
                      {"index", i},
                      {"a", q.a},
                      {"b", q.b},
                      {"c", q.c},
                      {"ambiguous", is_ambiguous(q)},
                      {"t", unit.t.get_str()},
                      {"u", unit.u.get_str()},
                      {"log_eps", round_sig(unit.log_eps)}});
    }
  }
  if (status != kPass) return status;
  save(g, "classes.csv", csv.str());
  if (g.format == "json")
    std::cout << json{{"schema_version", kSchemaVersion}, {"classes", rows}}.dump(2) << '\n';
  else
    std::cout << csv.str();
  return kPass;
}

int cmd_intersect(const Globals& g, const SegmentSpec& spec, Int d_value, double t1, double t2, std::size_t bins) {
  const auto beta = spec.build();
  const auto d = discriminant_or_usage(d_value);
  const auto window = window_or_usage(t1, t2);
  if (bins == 0) throw UsageError("--bins must be positive");
  const auto res = segment_vs_family(beta, d, window);
  const auto classes = class_representatives(d);
  const auto lengths = total_lengths(classes, pell_unit(d));
  const auto rep = equidistribution_report(res.events, beta.length(), lengths.unoriented, bins, window, d.d);
  std::ostringstream csv;
  write_events_csv(csv, d.d, res.events);
  save(g, "events.csv", csv.str());
  json report = as_json(rep);
  report["segment"] = segment_json(beta);
  report["h"] = classes.h();
  report["oriented_count"] = res.oriented_count;
  report["endpoint_hits"] = res.endpoint_hits;
  emit_report(g, report, csv.str());
  return kPass;
}

int cmd_pair(const Globals& g, Int d1v, Int d2v, double t1, double t2, bool allow_self) {
  const auto d1 = discriminant_or_usage(d1v);
  const auto d2 = discriminant_or_usage(d2v);
  if (d1.d == d2.d && !allow_self) throw UsageError("equal discriminants need --allow-self");
  PairOptions opt;
  opt.window = window_or_usage(t1, t2);
  opt.allow_self = allow_self;
  const auto res = family_vs_family(d1, d2, opt);
  std::ostringstream csv;
  write_pair_events_csv(csv, d1.d, d2.d, res.events);
  save(g, "events.csv", csv.str());
  const Real normalized = res.count() / (res.l1 * res.l2);
  const Real target = sine_law_target(opt.window);
  std::vector<Real> angles;
  for (const auto& e : res.events) {
    if (opt.window.contains(e.angle) && !e.degenerate) angles.push_back(e.angle);
  }
  const Real c0 = sine_law_cdf(opt.window.lo), c1 = sine_law_cdf(opt.window.hi);
  const Real ks = angles.empty() ? 0
                                 : ks_statistic(angles, [&](Real t) {
                                     return c1 > c0 ? (sine_law_cdf(t) - c0) / (c1 - c0) : 0;
                                   });
  json report{{"schema_version", kSchemaVersion},
              {"d1", d1.d},
              {"d2", d2.d},
              {"theta1", round_sig(opt.window.lo)},
              {"theta2", round_sig(opt.window.hi)},
              {"allow_self", allow_self},
              {"oriented_total", res.oriented_total},
              {"oriented_in_window", res.in_window},
              {"count", round_sig(res.count())},
              {"degenerate", res.degenerate},
              {"excluded_self", res.excluded_self},
              {"l1", round_sig(res.l1)},
              {"l2", round_sig(res.l2)},
              {"normalized", round_sig(normalized)},
              {"target", round_sig(target)},
              {"deviation", round_sig(normalized - target)},
              {"ks_statistic", round_sig(ks)},
              {"ks_pvalue", round_sig(ks_pvalue(ks, angles.size()))}};
  emit_report(g, report, csv.str());
  return kPass;
}

std::vector<Int> discriminant_list(const std::vector<Int>& ds, const std::string& range) {
  std::vector<Int> out;
  if (!ds.empty() && range.empty()) {
    for (Int d : ds) out.push_back(discriminant_or_usage(d).d);
  } else if (ds.empty() && !range.empty()) {
    const auto [lo, hi] = parse_range(range);
    for (Int n = std::max<Int>(lo, 1); n <= hi; ++n) {
      if (valid_discriminant(n)) out.push_back(n);
    }
  } else {
    throw UsageError("give exactly one of --d and --range");
  }
  if (out.empty()) throw UsageError("no valid discriminants selected");
  return out;
}

TangentFunction bump_or_usage(const std::vector<double>& bump) {
  try {
    return bump_function({bump[0], bump[1]}, bump[2]);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int cmd_duke(const Globals& g, const std::vector<Int>& ds, const std::string& range, const std::vector<double>& bump,
             std::optional<double> tol) {
  const auto list = discriminant_list(ds, range);
  const auto rows = duke_test(bump_or_usage(bump), list);
  std::ostringstream os;
  write_duke_json(os, rows);
  json report = json::parse(os.str());
  report["bump"] = {{"x", bump[0]}, {"y", bump[1]}, {"radius", bump[2]}};
  int status = kPass;
  if (tol) {
    const bool ok = std::fabs(rows.back().deviation) < *tol;
    report["tolerance"] = *tol;
    report["passed"] = ok;
    status = ok ? kPass : kFail;
  }
  std::ostringstream csv;
  csv << "schema_version,d,h,log_eps,period,target,deviation\n";
  for (const auto& r : rows) {
    csv << kSchemaVersion << ',' << r.d << ',' << r.h << ',' << fmt_real(r.log_eps) << ',' << fmt_real(r.period)
        << ',' << fmt_real(r.target) << ',' << fmt_real(r.deviation) << '\n';
  }
  save(g, "duke.csv", csv.str());
  emit_report(g, report, csv.str());
  return status;
}

// --- verify -------------------------------------------------------------------------

struct VerifyArgs {
  std::string which;
  std::size_t samples = 0;
  double delta = 0.05;
  double theta1 = 0;
  double theta2 = kPi;
  Int d = 5;
  Int d1 = 5;
  Int d2 = 8;
  std::vector<Int> ds;
  std::vector<double> s_values{1.5, 2, 3};
  std::size_t grid = 8;
  Int dmax = 10000;
  std::vector<double> heights{10, 20, 40, 80};
  std::vector<double> bump{0, 1.5, 0.3};
  double tol = 0.05;
  SegmentSpec segment;
};

KernelParams kernel_params(const VerifyArgs& a) {
  KernelParams p{a.delta, a.theta1, a.theta2};
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

int verify_jacobian(const Globals& g, const VerifyArgs& a) {
  const std::size_t n = a.samples ? a.samples : 1000;
  constexpr Real tol = 1e-6L;
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> ut(-1.0, 1.0), uphi(0.0, 2 * static_cast<double>(kPi));
  Real worst = 0, worst_value = 0, worst_target = 0;
  std::size_t used = 0;
  while (used < n) {
    const Real t1 = ut(rng), phi = uphi(rng), t2 = ut(rng);
    if (std::fabs(std::sin(phi)) < 1e-3L) continue;
    ++used;
    const Real value = psi_density(t1, phi, t2).value;
    const Real target = std::fabs(std::sin(phi)) / 2;
    if (std::fabs(value - target) >= worst) {
      worst = std::fabs(value - target);
      worst_value = value;
      worst_target = target;
    }
  }
  IdentityReport r;
  r.identity = "jacobian";
  r.parameters = {{"samples", static_cast<Real>(n)}, {"tolerance", tol}};
  r.lhs = worst_value;
  r.rhs = worst_target;
  r.abs_err = worst;
  r.rel_err = worst_target > 0 ? worst / worst_target : worst;
  r.passed = worst < tol;
  emit_report(g, as_json(r, g.seed, true));
  return r.passed ? kPass : kFail;
}

int verify_kernel_volume(const Globals& g, const VerifyArgs& a) {
  const auto p = kernel_params(a);
  const auto mc = check_volume_identity(p, a.samples ? a.samples : 1000000, g.seed);
  const auto psi = check_volume_identity_psi(p);
  const bool ok = mc.passed && psi.passed;
  emit_report(g, json{{"schema_version", kSchemaVersion},
                      {"identity", "kernel_volume"},
                      {"monte_carlo", as_json(mc, g.seed, true)},
                      {"psi_chart", as_json(psi)},
                      {"seed", g.seed},
                      {"passed", ok}});
  return ok ? kPass : kFail;
}

int verify_count_identity(const Globals& g, const VerifyArgs& a) {
  const auto p = kernel_params(a);
  if (a.grid < 8) throw UsageError("--grid needs at least 8 cells per delta");
  const auto d1 = discriminant_or_usage(a.d1), d2 = discriminant_or_usage(a.d2);
  if (d1.d == d2.d) throw UsageError("count-identity needs two different discriminants");
  const auto r = check_count_identity(d1, d2, p, {a.grid, true});
  emit_report(g, as_json(r));
  return r.passed ? kPass : kFail;
}

int verify_weighted_identity(const Globals& g, const VerifyArgs& a) {
  const auto p = kernel_params(a);
  const auto beta = a.segment.build();
  const auto d = discriminant_or_usage(a.d);
  IdentityReport r;
  try {
    r = check_weighted_identity(beta, d, p, a.grid);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  emit_report(g, as_json(r));
  return r.passed ? kPass : kFail;
}

int verify_cnf(const Globals& g, const VerifyArgs& a) {
  constexpr Real tol = 1e-8L;
  std::vector<Int> list;
  if (!a.ds.empty()) {
    for (Int d : a.ds) list.push_back(discriminant_or_usage(d).d);
  } else {
    for (Int n = 5; n <= a.dmax; ++n) {
      if (valid_discriminant(n)) list.push_back(n);
    }
  }
  std::vector<ClassNumberReport> reports(list.size());
  const long n = static_cast<long>(list.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    reports[k] = class_number_formula_check(validate_discriminant(list[k]));
  }
  std::size_t worst = 0;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].rel_err > reports[worst].rel_err) worst = i;
    failures += reports[i].rel_err < tol ? 0 : 1;
  }
  json report{{"schema_version", kSchemaVersion},
              {"identity", "class_number_formula"},
              {"parameters", {{"dmax", a.ds.empty() ? a.dmax : 0}, {"tolerance", round_sig(tol)}}},
              {"count", reports.size()},
              {"failures", failures},
              {"worst", as_json(reports[worst])},
              {"passed", failures == 0}};
  std::ostringstream csv;
  csv << "schema_version,d,h,log_eps,lhs,rhs,rel_err\n";
  for (const auto& r : reports) {
    csv << kSchemaVersion << ',' << r.d << ',' << r.h << ',' << fmt_real(r.log_eps) << ',' << fmt_real(r.lhs) << ','
        << fmt_real(r.rhs) << ',' << fmt_real(r.rel_err) << '\n';
  }
  save(g, "cnf.csv", csv.str());
  emit_report(g, report, csv.str());
  return failures == 0 ? kPass : kFail;
}

int verify_eisenstein(const Globals& g, const VerifyArgs& a) {
  constexpr Real tol = 1e-4L;
  const std::vector<Int> ds = a.ds.empty() ? std::vector<Int>{5, 8, 12, 13} : a.ds;
  json rows = json::array();
  bool ok = true;
  for (Int dv : ds) {
    const auto d = discriminant_or_usage(dv);
    for (double s : a.s_values) {
      if (!(s > 1) || s > 4) throw UsageError("--s values must lie in (1, 4]");
      const auto r = eisenstein_period_check(d, s);
      ok = ok && r.rel_err < tol;
      rows.push_back(as_json(r));
    }
  }
  emit_report(g, json{{"schema_version", kSchemaVersion},
                      {"identity", "eisenstein_period"},
                      {"tolerance", round_sig(tol)},
                      {"rows", rows},
                      {"passed", ok}});
  return ok ? kPass : kFail;
}

int verify_duke(const Globals& g, const VerifyArgs& a) {
  const std::vector<Int> ds = a.ds.empty() ? std::vector<Int>{5, 101, 1009, 10009, 100049} : a.ds;
  return cmd_duke(g, ds, "", a.bump, a.tol);
}

int verify_blowup(const Globals& g, const VerifyArgs& a) {
  const auto p = kernel_params(a);
  std::vector<Real> heights(a.heights.begin(), a.heights.end());
  const auto r = blowup_check(p, heights);
  emit_report(g, as_json(r));
  return r.passed ? kPass : kFail;
}

int cmd_verify(const Globals& g, const VerifyArgs& a) {
  if (a.which == "jacobian") return verify_jacobian(g, a);
  if (a.which == "kernel-volume") return verify_kernel_volume(g, a);
  if (a.which == "count-identity") return verify_count_identity(g, a);
  if (a.which == "weighted-identity") return verify_weighted_identity(g, a);
  if (a.which == "cnf") return verify_cnf(g, a);
  if (a.which == "eisenstein") return verify_eisenstein(g, a);
  if (a.which == "duke") return verify_duke(g, a);
  if (a.which == "blowup") return verify_blowup(g, a);
  throw UsageError("unknown check " + a.which);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed geodesics of the modular surface: classes, intersections and identity checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "seed for stochastic commands");
  app.add_option("--threads", g.threads, "cap on parallel width (default: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--precision", g.precision, "significant digits in artifacts")->check(CLI::Range(6, 18));
  app.add_option("--out-dir", g.out_dir, "directory for CSV/JSON artifacts");
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));

  std::optional<Int> classes_d;
  std::string classes_range;
  auto* classes = app.add_subcommand("classes", "reduced class representatives and fundamental units");
  classes->add_option("--d", classes_d, "discriminant");
  classes->add_option("--range", classes_range, "inclusive range a..b");

  SegmentSpec seg;
  Int inter_d = 0;
  double t1 = 0, t2 = kPi;
  std::size_t bins = 12;
  auto* inter = app.add_subcommand("intersect", "crossings of a segment with the geodesics of discriminant d");
  seg.add(inter);
  inter->add_option("--d", inter_d, "discriminant")->required();
  inter->add_option("--theta1", t1, "lower end of the angle window");
  inter->add_option("--theta2", t2, "upper end of the angle window");
  inter->add_option("--bins", bins, "histogram bins");

  Int pd1 = 0, pd2 = 0;
  bool allow_self = false;
  auto* pair = app.add_subcommand("pair", "crossings of two families of closed geodesics");
  pair->add_option("--d1", pd1, "first discriminant")->required();
  pair->add_option("--d2", pd2, "second discriminant")->required();
  pair->add_option("--theta1", t1, "lower end of the angle window");
  pair->add_option("--theta2", t2, "upper end of the angle window");
  pair->add_flag("--allow-self", allow_self, "allow d1 = d2, excluding a geodesic against itself and its reverse");

  std::vector<Int> duke_d;
  std::string duke_range;
  std::vector<double> bump{0, 1.5, 0.3};
  std::optional<double> duke_tol;
  auto* duke = app.add_subcommand("duke", "normalised periods of a bump function against its space average");
  duke->add_option("--d", duke_d, "discriminants")->delimiter(',');
  duke->add_option("--range", duke_range, "inclusive range a..b");
  duke->add_option("--bump", bump, "bump centre and hyperbolic radius: x y r")->expected(3)->delimiter(',');
  duke->add_option("--tol", duke_tol, "fail if the last deviation exceeds this");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "check an identity; exit code 1 when outside tolerance");
  verify->add_option("which", va.which, "check name")
      ->required()
      ->check(CLI::IsMember({"jacobian", "kernel-volume", "count-identity", "weighted-identity", "cnf", "eisenstein",
                             "duke", "blowup"}));
  verify->add_option("--samples", va.samples, "sample count");
  verify->add_option("--delta", va.delta, "arc length delta");
  verify->add_option("--theta1", va.theta1, "lower end of the angle window");
  verify->add_option("--theta2", va.theta2, "upper end of the angle window");
  verify->add_option("--d", va.ds, "discriminant(s)")->delimiter(',');
  verify->add_option("--d1", va.d1, "first discriminant");
  verify->add_option("--d2", va.d2, "second discriminant");
  verify->add_option("--s", va.s_values, "real s values in (1, 4]")->delimiter(',');
  verify->add_option("--grid", va.grid, "quadrature cells per delta");
  verify->add_option("--dmax", va.dmax, "largest discriminant for cnf");
  verify->add_option("--heights", va.heights, "heights for blowup")->delimiter(',');
  verify->add_option("--bump", va.bump, "bump centre and hyperbolic radius: x y r")->expected(3)->delimiter(',');
  verify->add_option("--tol", va.tol, "tolerance for duke");
  va.segment.add(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  output_digits() = g.precision;
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*classes) return cmd_classes(g, classes_d, classes_range);
    if (*inter) return cmd_intersect(g, seg, inter_d, t1, t2, bins);
    if (*pair) return cmd_pair(g, pd1, pd2, t1, t2, allow_self);
    if (*duke) return cmd_duke(g, duke_d, duke_range, bump, duke_tol);
    if (*verify) {
      if (va.which == "weighted-identity" || va.which == "count-identity") {
        if (va.which == "weighted-identity" && va.ds.size() > 1) throw UsageError("weighted-identity takes one --d");
        if (!va.ds.empty()) va.d = va.ds.front();
      }
      if (va.which == "blowup" && !verify->get_option("--delta")->count()) va.delta = 0.5;
      if (va.which == "blowup" && !verify->get_option("--theta2")->count()) va.theta2 = kPi / 2;
      return cmd_verify(g, va);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
