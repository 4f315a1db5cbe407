// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <cmath>

#include "geoint/kernel.hpp"

using namespace geoint;

namespace {

const Discriminant& large_d() {
  static const Discriminant d = validate_discriminant(3000017);
  return d;
}

void BM_CandidateForms(benchmark::State& state) {
  const Box box{-0.5L, 0.5L, 0.05L, 2};
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto forms = parallel ? candidate_forms(large_d(), box) : candidate_forms_serial(large_d(), box);
    benchmark::DoNotOptimize(forms);
  }
}
BENCHMARK(BM_CandidateForms)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_IntegrateAlong(benchmark::State& state) {
  const auto fam = family(validate_discriminant(100005));
  const TangentFunction f = [](const UnitTangent& u) { return u.y * std::cos(u.theta); };
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    Real v = parallel ? integrate_along(f, fam) : integrate_along_serial(f, fam);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_IntegrateAlong)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SegmentVsFamily(benchmark::State& state) {
  const auto beta = segment_from_tangent({-0.2L, 1.3L, 0.3L}, 0.5L);
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto r = parallel ? segment_vs_family(beta, large_d()) : segment_vs_family_serial(beta, large_d());
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_SegmentVsFamily)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FamilyVsFamily(benchmark::State& state) {
  const auto d1 = validate_discriminant(1001), d2 = validate_discriminant(2021);
  PairOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto r = family_vs_family(d1, d2, opt);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_FamilyVsFamily)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CountIdentity(benchmark::State& state) {
  const auto d1 = validate_discriminant(13), d2 = validate_discriminant(17);
  KernelParams p;
  CountIdentityOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto r = check_count_identity(d1, d2, p, opt);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_CountIdentity)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
