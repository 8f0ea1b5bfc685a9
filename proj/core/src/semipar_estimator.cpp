#include "hom/semipar_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "hom/error.hpp"

namespace hom {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_scan_matches(const CoincidenceScan& scan, const ParameterSpec& spec) {
  if (std::abs(scan.delay_step_fs - spec.delay_step_fs()) > 1e-9 * spec.delay_step_fs()) {
    std::ostringstream msg;
    msg << "scan delay step " << scan.delay_step_fs << " fs differs from the parameter step "
        << spec.delay_step_fs() << " fs";
    throw ValidationError(msg.str());
  }
  if (std::abs(scan.baseline - spec.baseline()) > 1e-12 * spec.baseline()) {
    std::ostringstream msg;
    msg << "scan baseline " << scan.baseline << " differs from the parameter baseline " << spec.baseline();
    throw ValidationError(msg.str());
  }
}

double half_range_of(std::span<const double> delays) {
  return std::min(std::abs(delays.front()), std::abs(delays.back()));
}

}  // namespace

std::string_view method_name(EstimatorMethod m) {
  return m == EstimatorMethod::discrete ? "discrete" : "interpolated";
}

EstimatorMethod parse_method(std::string_view name) {
  if (name == "discrete") return EstimatorMethod::discrete;
  if (name == "interpolated") return EstimatorMethod::interpolated;
  throw ValidationError("unknown estimator method '" + std::string(name) + "' (discrete|interpolated)");
}

ParameterSpec ParameterSpec::hermite_gauss(const HGSpec& hg, double delay_step_fs, double baseline) {
  if (!(delay_step_fs > 0.0)) throw ValidationError("delay step must be positive");
  if (!(baseline > 0.0)) throw ValidationError("baseline C0 must be positive");
  const HGSpec checked(hg.order, hg.xi_fs);
  ParameterSpec p;
  p.hg_ = checked;
  p.kernel_ = [checked](double tau) { return hg_time_kernel(checked, tau) / kTwoPi; };
  p.feature_scale_ = checked.xi_fs;
  p.step_ = delay_step_fs;
  p.baseline_ = baseline;
  return p;
}

ParameterSpec ParameterSpec::custom(RealFn kernel, double feature_scale, double delay_step_fs, double baseline) {
  if (!kernel) throw ValidationError("custom kernel is empty");
  if (!(delay_step_fs > 0.0)) throw ValidationError("delay step must be positive");
  if (!(baseline > 0.0)) throw ValidationError("baseline C0 must be positive");
  ParameterSpec p;
  p.kernel_ = std::move(kernel);
  p.feature_scale_ = std::max(feature_scale, 0.0);
  p.step_ = delay_step_fs;
  p.baseline_ = baseline;
  return p;
}

double ParameterSpec::discretized_kernel(double tau_fs) const { return kernel_(tau_fs) * step_ / baseline_; }

std::complex<double> ParameterSpec::frequency_weight(double omega_rad_fs) const {
  if (!hg_) throw ValidationError("frequency weight is only defined for Hermite-Gauss parameters");
  return hg_kernel_phase(hg_->order) * hg_function(*hg_, omega_rad_fs);
}

double ParameterSpec::support_half_width() const {
  // tau^(2n) exp(-tau^2 / 2 xi^2) is below 1e-300 of its peak well inside 40 xi for n <= 20
  return hg_ ? 40.0 * hg_->xi_fs : std::numeric_limits<double>::infinity();
}

bool ParameterSpec::truncated_at(double half_range_fs) const {
  if (!hg_) return false;
  const double s = half_range_fs / hg_->xi_fs;
  return std::exp(-0.25 * s * s) >= kTruncationLevel;
}

bool ParameterSpec::reliable() const {
  return !hg_ || hg_->xi_fs > step_ / std::numbers::sqrt2;
}

void raw_moment_parameter(int n) {
  throw ValidationError("raw moment of order " + std::to_string(n) +
                        " has a kernel made of Dirac-delta derivatives at tau = 0; it cannot be "
                        "estimated semiparametrically from a sampled scan. Use a Hermite-Gauss "
                        "component instead.");
}

double LinearEstimator::apply(std::span<const double> counts) const {
  if (counts.size() != weights.size()) throw ValidationError("count vector length differs from estimator");
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) s += weights[i] * counts[i];
  return s;
}

double LinearEstimator::apply(std::span<const std::int64_t> counts) const {
  if (counts.size() != weights.size()) throw ValidationError("count vector length differs from estimator");
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) s += weights[i] * static_cast<double>(counts[i]);
  return s;
}

double LinearEstimator::variance(std::span<const double> expected_counts) const {
  if (expected_counts.size() != weights.size()) throw ValidationError("count vector length differs from estimator");
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (expected_counts[i] < 0.0) throw ValidationError("expected counts must be non-negative");
    s += expected_counts[i] * weights[i] * weights[i];
  }
  return s;
}

LinearEstimator build_estimator(std::span<const double> delays_fs, const ParameterSpec& spec,
                                EstimatorMethod method, SplineBoundary boundary) {
  LinearEstimator est;
  est.method = method;
  if (method == EstimatorMethod::discrete) {
    est.weights.resize(delays_fs.size());
    for (std::size_t i = 0; i < delays_fs.size(); ++i) est.weights[i] = spec.discretized_kernel(delays_fs[i]);
  } else {
    if (delays_fs.size() < 4) throw ValidationError("interpolated estimator needs at least 4 scan points");
    const ParameterSpec* s = &spec;
    const double scale = 1.0 / (spec.delay_step_fs());
    RealFn k = [s, scale](double t) { return s->discretized_kernel(t) * scale; };
    est.weights = spline_integral_weights(delays_fs, k, boundary, spec.feature_scale());
  }
  double sum = 0.0;
  for (double w : est.weights) sum += w;
  est.kernel_integral = sum * spec.baseline();
  return est;
}

double estimate_discrete(const CoincidenceScan& scan, const ParameterSpec& spec) {
  scan.validate();
  check_scan_matches(scan, spec);
  double s = 0.0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    s += static_cast<double>(scan.counts[i]) * spec.discretized_kernel(scan.delays_fs[i]);
  }
  return s;
}

double variance_discrete(std::span<const double> delays_fs, std::span<const double> expected_counts,
                         const ParameterSpec& spec) {
  if (delays_fs.size() != expected_counts.size()) throw ValidationError("delay and count vectors differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < delays_fs.size(); ++i) {
    if (expected_counts[i] < 0.0) throw ValidationError("expected counts must be non-negative");
    const double w = spec.discretized_kernel(delays_fs[i]);
    s += expected_counts[i] * w * w;
  }
  return s;
}

double estimate_interpolated(const CoincidenceScan& scan, const ParameterSpec& spec, SplineBoundary boundary) {
  scan.validate();
  check_scan_matches(scan, spec);
  const auto est = build_estimator(scan.delays_fs, spec, EstimatorMethod::interpolated, boundary);
  return est.apply(std::span<const std::int64_t>(scan.counts));
}

ThetaEstimate to_theta(double theta_prime, double variance_prime, double v, double kernel_integral) {
  check_visibility(v);
  return {(kernel_integral - theta_prime) / v, variance_prime / (v * v)};
}

double crb_continuous(const ProfileFn& expected_counts, const ParameterSpec& spec, double half_range_fs) {
  if (!(half_range_fs > 0.0)) throw ValidationError("CRB half range must be positive");
  const double limit = std::min(half_range_fs, spec.support_half_width());
  const double step = spec.delay_step_fs();
  RealFn integrand = [&](double t) {
    const double w = spec.discretized_kernel(t);
    return expected_counts(t) * w * w / step;
  };
  QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  opts.abs_tol = 1e-300;
  if (spec.feature_scale() > 0.0) {
    const double n = std::ceil(4.0 * limit / spec.feature_scale());
    opts.initial_intervals = std::max<long>(64, 2 * static_cast<long>(std::min(n, 1e6) / 2 + 1));
  }
  return integrate_doubling(integrand, -limit, limit, opts).value;
}

EstimateReport hg_parameter(const CoincidenceScan& scan, int hg_order, double xi_fs, double v,
                            EstimatorMethod method, const EstimatorOptions& options) {
  scan.validate();
  check_visibility(v);
  const auto spec = ParameterSpec::hermite_gauss(HGSpec(hg_order, xi_fs), scan.delay_step_fs, scan.baseline);
  const auto est = build_estimator(scan.delays_fs, spec, method, options.boundary);
  const auto counts = scan.counts_as_double();

  EstimateReport r;
  r.order = hg_order;
  r.xi_fs = xi_fs;
  r.method = method;
  r.theta_prime = est.apply(counts);
  r.variance_prime = est.variance(counts);
  r.kernel_integral = est.kernel_integral;
  const auto th = to_theta(r.theta_prime, r.variance_prime, v, est.kernel_integral);
  r.theta = th.theta;
  r.variance = th.variance;
  r.reliable = spec.reliable();
  r.truncation_warning = spec.truncated_at(half_range_of(scan.delays_fs));
  if (options.compute_crb) {
    const double lo = scan.delays_fs.front();
    const double hi = scan.delays_fs.back();
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    ProfileFn reference = options.crb_reference;
    if (!reference) {
      auto spline = std::make_shared<CubicSpline>(scan.delays_fs, counts, options.boundary);
      reference = [spline](double t) {
        return std::max(0.0, (*spline)(std::clamp(t, spline->lower(), spline->upper())));
      };
    }
    // integrate over the scan range, which need not be centred on zero
    ProfileFn shifted = [&](double t) { return reference(t + centre); };
    const auto shifted_spec = ParameterSpec::custom(
        [&spec, centre](double t) { return spec.kernel(t + centre); }, spec.feature_scale(),
        spec.delay_step_fs(), spec.baseline());
    r.crb_prime = std::abs(centre) < 1e-12 * half ? crb_continuous(reference, spec, half)
                                                  : crb_continuous(shifted, shifted_spec, half);
    r.crb = r.crb_prime / (v * v);
  }
  return r;
}

std::vector<EstimateReport> estimate_sweep(const CoincidenceScan& scan, std::span<const int> orders,
                                           std::span<const double> xi_fs, double v,
                                           EstimatorMethod method, const EstimatorOptions& options) {
  std::vector<EstimateReport> out;
  out.reserve(orders.size() * xi_fs.size());
  for (int n : orders) {
    for (double xi : xi_fs) out.push_back(hg_parameter(scan, n, xi, v, method, options));
  }
  return out;
}

std::vector<double> xi_grid(double lo, double hi, std::size_t steps) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ValidationError("xi range must satisfy 0 < xi_min <= xi_max");
  if (steps == 0) throw ValidationError("xi grid needs at least one step");
  if (steps == 1) return {lo};
  if (hi == lo) throw ValidationError("xi range is empty but more than one step was requested");
  std::vector<double> out(steps);
  const double r = std::log(hi / lo) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) out[i] = lo * std::exp(r * static_cast<double>(i));
  out.back() = hi;
  return out;
}

double frequency_domain_theta(const SpectralFunction& f, const HGSpec& hg) {
  const auto phase = hg_kernel_phase(hg.order);
  std::vector<double> integrand(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    integrand[i] = (f.values[i] * phase * hg_function(hg, f.omega.at(i))).real();
  }
  return trapezoid(integrand, f.omega.step);
}

double time_domain_theta(const ProfileFn& profile, const HGSpec& hg, double half_range_fs) {
  const double limit = std::min(half_range_fs, 40.0 * hg.xi_fs);
  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-300;
  opts.initial_intervals = std::max<long>(64, 2 * static_cast<long>(2.0 * limit / hg.xi_fs) + 2);
  RealFn g = [&](double t) { return profile(t) * hg_time_kernel(hg, t) / kTwoPi; };
  return integrate_doubling(g, -limit, limit, opts).value;
}

}  // namespace hom
