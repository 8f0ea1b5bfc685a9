#include <doctest.h>

#include <cmath>

#include "hom/error.hpp"
#include "hom/uncertainty.hpp"

using namespace hom;

namespace {

CoincidenceScan preset_scan(std::uint64_t seed) {
  const auto p = reference_preset();
  return sample_scan(p.config, make_profile(p.model), p.visibility, seed);
}

}  // namespace

TEST_CASE("reliability threshold") {
  CHECK(reliability_threshold(0.0) == 0.0);
  CHECK(reliability_threshold(std::sqrt(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(reliability_threshold(13.4) == doctest::Approx(9.475230867899737).epsilon(1e-14));
  CHECK_THROWS_AS(reliability_threshold(-1.0), ValidationError);
}

TEST_CASE("summarize") {
  const auto r = summarize({1.0, 2.0, 3.0, 4.0}, 0.0);
  CHECK(r.mean == 2.5);
  CHECK(r.variance() == doctest::Approx(5.0 / 3.0));
  CHECK_FALSE(r.bias_flag);
  std::vector<double> many(100);
  for (std::size_t i = 0; i < many.size(); ++i) many[i] = static_cast<double>(i);
  CHECK(summarize(many, 2000.0).bias_flag);  // variance 841.7 < 2000 (1 - 0.3)
  CHECK_FALSE(summarize(many, 1000.0).bias_flag);
  const auto z = summarize({0.0, 0.0}, 0.0);
  CHECK(z.stddev == 0.0);
  CHECK_FALSE(z.bias_flag);
  CHECK_THROWS_AS(summarize({1.0}, 0.0), ValidationError);
}

TEST_CASE("bootstrap of an all-zero scan has no spread") {
  auto scan = preset_scan(1);
  std::fill(scan.counts.begin(), scan.counts.end(), 0);
  const auto spec = ParameterSpec::hermite_gauss(HGSpec(0, 40.0), scan.delay_step_fs, scan.baseline);
  const auto r = bootstrap(scan, spec, EstimatorMethod::interpolated, 50, 3);
  CHECK(r.stddev == 0.0);
  CHECK(r.crb == 0.0);
  CHECK_FALSE(r.bias_flag);
}

TEST_CASE("bootstrap is deterministic") {
  const auto scan = preset_scan(1);
  const auto spec = ParameterSpec::hermite_gauss(HGSpec(2, 40.0), scan.delay_step_fs, scan.baseline);
  const auto a = bootstrap(scan, spec, EstimatorMethod::interpolated, 200, 5);
  const auto b = bootstrap(scan, spec, EstimatorMethod::interpolated, 200, 5);
  const auto c = bootstrap(scan, spec, EstimatorMethod::interpolated, 200, 6);
  CHECK(a.estimates == b.estimates);
  CHECK(a.stddev == b.stddev);
  CHECK(a.estimates != c.estimates);
  CHECK_THROWS_AS(bootstrap(scan, spec, EstimatorMethod::discrete, 1, 5), ValidationError);
}

TEST_CASE("bootstrap replicates do not depend on the estimator set") {
  const auto scan = preset_scan(1);
  const auto s1 = ParameterSpec::hermite_gauss(HGSpec(0, 20.0), scan.delay_step_fs, scan.baseline);
  const auto s2 = ParameterSpec::hermite_gauss(HGSpec(4, 60.0), scan.delay_step_fs, scan.baseline);
  const std::vector<LinearEstimator> both{build_estimator(scan.delays_fs, s1, EstimatorMethod::discrete),
                                          build_estimator(scan.delays_fs, s2, EstimatorMethod::discrete)};
  const auto joint = bootstrap_many(scan, both, 100, 9);
  const auto single = bootstrap_many(scan, std::span(both).subspan(1), 100, 9);
  CHECK(joint[1].estimates == single[0].estimates);
}

TEST_CASE("discrete bootstrap matches the variance formula at the observed counts") {
  const auto scan = preset_scan(2);
  const auto spec = ParameterSpec::hermite_gauss(HGSpec(0, 40.0), scan.delay_step_fs, scan.baseline);
  const auto r = bootstrap(scan, spec, EstimatorMethod::discrete, 1000, 1);
  const double formula = variance_discrete(scan.delays_fs, scan.counts_as_double(), spec);
  CHECK(std::abs(r.variance() / formula - 1.0) < 0.10);
}

TEST_CASE("witness verdicts") {
  const auto xs = xi_grid(10.0, 300.0, 16);
  SUBCASE("entangled preset shows a negative fourth-order component") {
    const auto rep = witness_scan(preset_scan(1), 4, xs, 0.81, {.replicates = 300});
    CHECK(rep.witnessed);
    REQUIRE_FALSE(rep.intervals.empty());
    CHECK(rep.intervals.front().first > rep.reliability_threshold_fs);
    for (std::size_t k = 0; k < rep.xi_fs.size(); ++k) {
      CHECK(rep.r[k] == doctest::Approx(rep.h[k] / rep.dh[k]).epsilon(1e-14));
    }
  }
  SUBCASE("zeroth order is never negative") {
    const auto rep = witness_scan(preset_scan(1), 0, xs, 0.81, {.replicates = 300});
    CHECK_FALSE(rep.witnessed);
  }
  SUBCASE("separable photons are not witnessed") {
    const auto p = separable_preset();
    const auto scan = sample_scan(p.config, make_profile(p.model), p.visibility, 4);
    for (int n : {0, 2, 4}) {
      CHECK_FALSE(witness_scan(scan, n, xs, p.visibility, {.replicates = 300}).witnessed);
    }
  }
  SUBCASE("input checks") {
    const auto scan = preset_scan(1);
    CHECK_THROWS_AS(witness_scan(scan, 3, xs, 0.81), ValidationError);
    const std::vector<double> bad{10.0, 10.0};
    CHECK_THROWS_AS(witness_scan(scan, 2, bad, 0.81), ValidationError);
  }
}

TEST_CASE("reliability only grows as the step shrinks") {
  const auto xs = xi_grid(1.0, 100.0, 30);
  std::size_t prev = 0;
  for (double step : {40.0, 20.0, 13.4, 5.0, 1.0}) {
    std::size_t count = 0;
    for (double xi : xs) count += ParameterSpec::hermite_gauss(HGSpec(0, xi), step, 1.0).reliable() ? 1 : 0;
    CHECK(count >= prev);
    prev = count;
  }
}

TEST_CASE("bias probe") {
  const auto p = reference_preset();
  const auto f = make_profile(p.model);
  const auto scan = sample_scan(p.config, f, p.visibility, 1);
  BiasProbeOptions opt;
  opt.replicates = 400;
  opt.crb_reference = [&](double t) { return 4653.0 * (1 - 0.81 * f(t)); };
  const std::vector<int> factors{1, 8};
  const std::vector<double> xs{20.0, 200.0};
  const auto rows = bias_probe(scan, 0, factors, xs, opt);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].factor == 1);
  CHECK(rows[0].crb_source == "true");
  CHECK(rows[4].delay_step_fs == doctest::Approx(8 * 13.4));
  for (const auto& r : rows) {
    CHECK(r.reliable == (r.xi_fs > r.delay_step_fs / std::sqrt(2.0)));
    if (r.factor == 1 && r.xi_fs == 200.0) CHECK_FALSE(r.violation);
  }
  // interpolated, factor 8, xi = 20 fs: far below the threshold and the bound is violated
  CHECK(rows[4].method == EstimatorMethod::interpolated);
  CHECK_FALSE(rows[4].reliable);
  CHECK(rows[4].violation);
  CHECK_THROWS_AS(bias_probe(scan, 0, std::vector<int>{0}, xs, opt), ValidationError);
  CHECK_THROWS_AS(bias_probe(scan, 0, std::vector<int>{80}, xs, opt), ValidationError);
}

TEST_CASE("zero kernel has zero variance and bound") {
  const auto scan = preset_scan(1);
  const auto spec = ParameterSpec::custom([](double) { return 0.0; }, 10.0, scan.delay_step_fs, scan.baseline);
  const auto r = bootstrap(scan, spec, EstimatorMethod::interpolated, 50, 1);
  CHECK(r.variance() == 0.0);
  CHECK(r.crb == 0.0);
  CHECK_FALSE(r.bias_flag);
}

TEST_CASE("re-estimating C0 per replicate widens the fourth-order spread") {
  const auto p = separable_preset();
  const auto scan = sample_scan(p.config, make_profile(p.model), p.visibility, 1);
  const std::vector<double> xs{40.0, 160.0};
  WitnessOptions fixed;
  fixed.replicates = 400;
  fixed.baseline = ReplicateBaseline::fixed;
  WitnessOptions tail = fixed;
  tail.baseline = ReplicateBaseline::tail_average;
  const auto a = witness_scan(scan, 4, xs, p.visibility, fixed);
  const auto b = witness_scan(scan, 4, xs, p.visibility, tail);
  CHECK(a.h == b.h);
  for (std::size_t k = 0; k < xs.size(); ++k) CHECK(b.dh[k] > a.dh[k]);
  // order-4 kernel integral is 12, the tail mean of 40 points at C0 = 4653
  // has relative spread 1 / sqrt(40 C0); the C0 term alone gives about
  const double c0_term = 12.0 / std::sqrt(40.0 * scan.baseline) / p.visibility;
  CHECK(b.dh[1] * b.dh[1] == doctest::Approx(a.dh[1] * a.dh[1] + c0_term * c0_term).epsilon(0.25));
}
