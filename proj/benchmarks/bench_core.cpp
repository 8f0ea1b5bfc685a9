#include <benchmark/benchmark.h>

#include "hom/profile_fit.hpp"
#include "hom/uncertainty.hpp"

namespace {

hom::CoincidenceScan preset_scan() {
  const auto p = hom::reference_preset();
  return hom::sample_scan(p.config, hom::make_profile(p.model), p.visibility, 1);
}

void BM_InterpolatedWeights(benchmark::State& state) {
  const auto scan = preset_scan();
  const auto spec = hom::ParameterSpec::hermite_gauss(hom::HGSpec(4, static_cast<double>(state.range(0))),
                                                      scan.delay_step_fs, scan.baseline);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hom::build_estimator(scan.delays_fs, spec, hom::EstimatorMethod::interpolated));
  }
}
BENCHMARK(BM_InterpolatedWeights)->Arg(10)->Arg(40)->Arg(160);

void BM_Bootstrap(benchmark::State& state) {
  const auto scan = preset_scan();
  const auto spec = hom::ParameterSpec::hermite_gauss(hom::HGSpec(4, 40.0), scan.delay_step_fs, scan.baseline);
  const auto est = hom::build_estimator(scan.delays_fs, spec, hom::EstimatorMethod::interpolated);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hom::bootstrap_many(scan, std::span(&est, 1), 1000, 1));
  }
}
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond);

void BM_MarginalSymmetrised(benchmark::State& state) {
  const auto p = hom::separable_preset();
  const auto grid = hom::default_omega_grid(p.model);
  for (auto _ : state) benchmark::DoNotOptimize(hom::marginal_symmetrised(p.model, grid));
}
BENCHMARK(BM_MarginalSymmetrised)->Unit(benchmark::kMillisecond);

void BM_ProfileFit(benchmark::State& state) {
  const auto scan = preset_scan();
  for (auto _ : state) benchmark::DoNotOptimize(hom::fit_profile(scan));
}
BENCHMARK(BM_ProfileFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
