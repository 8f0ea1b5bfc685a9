#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hom/dip_model.hpp"
#include "hom/error.hpp"

using namespace hom;

TEST_CASE("visibility of a beam splitter") {
  CHECK(visibility(BeamSplitter(0.5)) == 1.0);
  CHECK(std::abs(visibility(BeamSplitter(2.0 / 3.0)) - 0.8) <= 1e-15);
  CHECK(visibility(BeamSplitter(0.3)) == doctest::Approx(visibility(BeamSplitter(0.7))).epsilon(1e-15));
  CHECK_THROWS_AS(BeamSplitter(0.0), ValidationError);
  CHECK_THROWS_AS(BeamSplitter(1.0), ValidationError);
  CHECK_NOTHROW(check_visibility(0.81));
  CHECK_NOTHROW(check_visibility(1.0));
  CHECK_THROWS_AS(check_visibility(0.0), ValidationError);
  CHECK_THROWS_AS(check_visibility(1.2), ValidationError);
}

TEST_CASE("preset grid") {
  const auto p = reference_preset();
  CHECK(p.visibility == 0.81);
  CHECK(p.config.points() == 201);
  const auto d = p.config.delays();
  CHECK(d[100] == 0.0);
  CHECK(d.front() == -1340.0);
  CHECK(d[101] == 13.4);
  ScanConfig bad = p.config;
  bad.half_range_fs = 1000.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("expected profile reaches C0(1 - v) at the centre") {
  const auto p = reference_preset();
  const auto f = make_profile(p.model);
  const auto c = expected_profile(p.config, f, p.visibility);
  CHECK(*std::min_element(c.begin(), c.end()) == doctest::Approx(4653.0 * (1 - 0.81)).epsilon(1e-12));
  CHECK(c.front() == doctest::Approx(4653.0).epsilon(1e-9));
}

TEST_CASE("sample_scan is deterministic and point-wise streamed") {
  const auto p = reference_preset();
  const auto f = make_profile(p.model);
  const auto a = sample_scan(p.config, f, p.visibility, 11);
  const auto b = sample_scan(p.config, f, p.visibility, 11);
  const auto c = sample_scan(p.config, f, p.visibility, 12);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
  CHECK(a.provenance.kind == "simulated");
  CHECK(a.provenance.seed == 11);
  ScanConfig longer = p.config;
  longer.half_range_fs = 2 * p.config.half_range_fs;
  const auto d = sample_scan(longer, f, p.visibility, 11);
  CHECK(d.size() == 401);
  CHECK(a.baseline == doctest::Approx(tail_average(a.counts_as_double())));
  const auto n = sample_scan(p.config, f, p.visibility, 11, BaselineMode::nominal);
  CHECK(n.baseline == 4653.0);
}

TEST_CASE("sample mean converges to the expected profile") {
  const auto p = reference_preset();
  const auto f = make_profile(p.model);
  const auto mean = expected_profile(p.config, f, p.visibility);
  const int reps = 400;
  std::vector<double> acc(mean.size(), 0.0);
  for (int s = 0; s < reps; ++s) {
    const auto scan = sample_scan(p.config, f, p.visibility, 1000 + s);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += static_cast<double>(scan.counts[i]);
  }
  for (std::size_t i = 0; i < acc.size(); i += 10) {
    CHECK(std::abs(acc[i] / reps - mean[i]) < 5 * std::sqrt(mean[i] / reps));
  }
}

TEST_CASE("tail average uses the outer tenth") {
  std::vector<double> y(20, 5.0);
  y[0] = 7.0;
  y[19] = 3.0;
  y[10] = -100.0;
  CHECK(tail_average(y) == 5.0);
  CHECK_THROWS_AS(tail_average(std::vector<double>{}), ValidationError);
}

TEST_CASE("decimation keeps the zero-delay point") {
  const auto p = reference_preset();
  const auto scan = sample_scan(p.config, make_profile(p.model), p.visibility, 3);
  const auto d = decimate(scan, 4);
  CHECK(d.delay_step_fs == doctest::Approx(53.6));
  CHECK(std::find(d.delays_fs.begin(), d.delays_fs.end(), 0.0) != d.delays_fs.end());
  CHECK(d.size() == 51);
  CHECK_NOTHROW(d.validate());
  CHECK_THROWS_AS(decimate(scan, 60), ValidationError);
  CHECK_THROWS_AS(decimate(scan, 0), ValidationError);
  CHECK(decimate(scan, 1).counts == scan.counts);
}

TEST_CASE("recentering shifts the axis") {
  const auto p = reference_preset();
  const auto scan = sample_scan(p.config, make_profile(p.model), p.visibility, 3);
  const auto r = recenter(scan, 5.0);
  CHECK(r.delays_fs[100] == -5.0);
  CHECK(r.counts == scan.counts);
}

TEST_CASE("scan validation") {
  CoincidenceScan s;
  s.delays_fs = {0, 1, 2.5};
  s.counts = {1, 2, 3};
  s.delay_step_fs = 1;
  s.baseline = 3;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.delays_fs = {0, 1, 2};
  CHECK_NOTHROW(s.validate());
  s.counts[1] = -1;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}
