#include "hom/delay_metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hom/error.hpp"
#include "hom/uncertainty.hpp"

namespace hom {
namespace {

void check_step(double step_fs) {
  if (!(step_fs >= kMinDifferenceStep)) {
    throw ValidationError("central-difference step must be at least 1e-6 fs for double precision");
  }
}

double central_difference(const ShiftFn& h, double x, double s) { return (h(x + s) - h(x - s)) / (2.0 * s); }

double simpson_on_nodes(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size() - 1;
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < n; ++i) (i % 2 ? odd : even) += f[i];
  return dx / 3.0 * (f.front() + f.back() + 4.0 * odd + 2.0 * even);
}

}  // namespace

DelayPoint delay_uncertainty(const ShiftFn& h_of_shift, double dh, double offset_fs, double step_fs) {
  check_step(step_fs);
  if (dh < 0.0) throw ValidationError("delta h must be non-negative");
  DelayPoint p;
  p.derivative = central_difference(h_of_shift, offset_fs, step_fs);
  p.defined = p.derivative != 0.0;
  p.dtau0_fs = p.defined ? std::abs(dh / p.derivative) : std::numeric_limits<double>::infinity();
  return p;
}

double richardson_ratio(const ShiftFn& h_of_shift, double offset_fs, double step_fs) {
  check_step(step_fs / 4.0);
  const double d1 = central_difference(h_of_shift, offset_fs, step_fs);
  const double d2 = central_difference(h_of_shift, offset_fs, step_fs / 2.0);
  const double d4 = central_difference(h_of_shift, offset_fs, step_fs / 4.0);
  return (d1 - d2) / (d2 - d4);
}

ShiftedParameter::ShiftedParameter(ProfileFn profile, const HGSpec& hg, double half_range_fs,
                                   double reference_shift_fs)
    : profile_(std::move(profile)), hg_(hg.order, hg.xi_fs) {
  if (!(half_range_fs > 0.0)) throw ValidationError("half range must be positive");
  const double limit = std::min(half_range_fs, 40.0 * hg_.xi_fs);
  a_ = -limit;
  b_ = limit;
  long n = std::max<long>(64, 2 * static_cast<long>(limit / hg_.xi_fs) + 2);
  n += n % 2;
  const auto kernel_nodes = [&](long m) {
    std::vector<double> k(static_cast<std::size_t>(m) + 1);
    const double dx = (b_ - a_) / static_cast<double>(m);
    for (long i = 0; i <= m; ++i) {
      k[static_cast<std::size_t>(i)] = hg_time_kernel(hg_, a_ + dx * static_cast<double>(i)) / (2.0 * std::numbers::pi);
    }
    return k;
  };
  const auto eval = [&](long m, const std::vector<double>& k, double shift) {
    const double dx = (b_ - a_) / static_cast<double>(m);
    std::vector<double> f(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) f[i] = profile_(a_ + dx * static_cast<double>(i) - shift) * k[i];
    return simpson_on_nodes(f, dx);
  };
  auto k = kernel_nodes(n);
  double prev = eval(n, k, reference_shift_fs);
  for (int d = 0; d < 14; ++d) {
    const long m = 2 * n;
    auto km = kernel_nodes(m);
    const double cur = eval(m, km, reference_shift_fs);
    n = m;
    k = std::move(km);
    const double scale = std::max(std::abs(cur), 1e-300);
    if (std::abs(cur - prev) <= 1e-12 * scale) break;
    prev = cur;
  }
  intervals_ = n;
  kernel_ = std::move(k);
}

double ShiftedParameter::operator()(double tau0_fs) const {
  const double dx = (b_ - a_) / static_cast<double>(intervals_);
  std::vector<double> f(kernel_.size());
  for (std::size_t i = 0; i < kernel_.size(); ++i) f[i] = profile_(a_ + dx * static_cast<double>(i) - tau0_fs) * kernel_[i];
  return simpson_on_nodes(f, dx);
}

std::string_view delta_h_source_name(DeltaHSource s) { return s == DeltaHSource::analytic ? "analytic" : "bootstrap"; }

DeltaHSource parse_delta_h_source(std::string_view name) {
  if (name == "analytic") return DeltaHSource::analytic;
  if (name == "bootstrap") return DeltaHSource::bootstrap;
  throw ValidationError("unknown delta-h source '" + std::string(name) + "' (analytic|bootstrap)");
}

double analytic_delta_h(const ScanConfig& config, const ProfileFn& profile, double v, const HGSpec& hg,
                        EstimatorMethod method) {
  const auto expected = expected_profile(config, profile, v);
  const auto delays = config.delays();
  const auto spec = ParameterSpec::hermite_gauss(hg, config.delay_step_fs, config.baseline_counts);
  const auto est = build_estimator(delays, spec, method);
  return std::sqrt(est.variance(expected)) / v;
}

double bootstrap_delta_h(const CoincidenceScan& scan, double v, const HGSpec& hg, EstimatorMethod method,
                         std::size_t replicates, std::uint64_t seed) {
  check_visibility(v);
  const auto spec = ParameterSpec::hermite_gauss(hg, scan.delay_step_fs, scan.baseline);
  const auto est = build_estimator(scan.delays_fs, spec, method);
  const auto r = bootstrap_many(scan, std::span<const LinearEstimator>(&est, 1), replicates, seed);
  return r.front().stddev / v;
}

double DelaySensitivity::min_dtau0() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dtau0_fs.size(); ++i) {
    if (defined[i]) m = std::min(m, dtau0_fs[i]);
  }
  return m;
}

DelaySensitivity delay_sensitivity(const ProfileFn& profile, int hg_order, std::span<const double> xi_fs,
                                   std::span<const double> dh, double working_offset_fs, double step_fs,
                                   double half_range_fs) {
  check_step(step_fs);
  if (xi_fs.size() != dh.size()) throw ValidationError("one delta h per xi expected");
  DelaySensitivity out;
  out.order = hg_order;
  out.working_offset_fs = working_offset_fs;
  out.step_fs = step_fs;
  out.xi_fs.assign(xi_fs.begin(), xi_fs.end());
  out.dh.assign(dh.begin(), dh.end());
  double largest = 0.0;
  std::vector<bool> above_roundoff;
  for (std::size_t k = 0; k < xi_fs.size(); ++k) {
    const ShiftedParameter h(profile, HGSpec(hg_order, xi_fs[k]), half_range_fs, working_offset_fs);
    const double hp = h(working_offset_fs + step_fs);
    const double hm = h(working_offset_fs - step_fs);
    const double d = (hp - hm) / (2.0 * step_fs);
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(hp), std::abs(hm)) / step_fs;
    out.derivative.push_back(d);
    above_roundoff.push_back(std::abs(d) > roundoff);
    if (above_roundoff.back()) largest = std::max(largest, std::abs(d));
  }
  for (std::size_t k = 0; k < xi_fs.size(); ++k) {
    const bool ok = above_roundoff[k] && std::abs(out.derivative[k]) >= 1e-3 * largest;
    out.defined.push_back(ok);
    out.dtau0_fs.push_back(ok ? std::abs(dh[k] / out.derivative[k]) : std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace hom
