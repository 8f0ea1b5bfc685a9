#include "hom/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "hom/error.hpp"
#include "hom/profile_fit.hpp"
#include "hom/random.hpp"

namespace hom {
namespace {

unsigned worker_count(std::size_t jobs) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(1, jobs / 16)));
}

template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
  const unsigned workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::size_t failed_index = n;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (i < failed_index) {
            failed_index = i;
            failure = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double crb_at_interpolant(const CoincidenceScan& scan, const ParameterSpec& spec, SplineBoundary boundary) {
  const auto counts = scan.counts_as_double();
  const CubicSpline spline(scan.delays_fs, counts, boundary);
  const double lo = scan.delays_fs.front();
  const double hi = scan.delays_fs.back();
  const double centre = 0.5 * (lo + hi);
  const ProfileFn c = [&](double t) { return std::max(0.0, spline(std::clamp(t + centre, lo, hi))); };
  const auto shifted = ParameterSpec::custom([&spec, centre](double t) { return spec.kernel(t + centre); },
                                             spec.feature_scale(), spec.delay_step_fs(), spec.baseline());
  return crb_continuous(c, shifted, 0.5 * (hi - lo));
}

double crb_with_reference(const CoincidenceScan& scan, const ParameterSpec& spec, const ProfileFn& reference) {
  const double lo = scan.delays_fs.front();
  const double hi = scan.delays_fs.back();
  const double centre = 0.5 * (lo + hi);
  const ProfileFn c = [&](double t) { return std::max(0.0, reference(t + centre)); };
  const auto shifted = ParameterSpec::custom([&spec, centre](double t) { return spec.kernel(t + centre); },
                                             spec.feature_scale(), spec.delay_step_fs(), spec.baseline());
  return crb_continuous(c, shifted, 0.5 * (hi - lo));
}

}  // namespace

BootstrapResult summarize(std::vector<double> estimates, double crb) {
  BootstrapResult r;
  r.replicates = estimates.size();
  if (r.replicates < 2) throw ValidationError("bootstrap needs at least 2 replicates");
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(r.replicates);
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  r.mean = mean;
  r.stddev = std::sqrt(ss / static_cast<double>(r.replicates - 1));
  r.crb = crb;
  r.bias_flag = crb > 0.0 && r.variance() < crb * (1.0 - 3.0 / std::sqrt(static_cast<double>(r.replicates)));
  r.estimates = std::move(estimates);
  return r;
}

std::vector<BootstrapResult> bootstrap_many(const CoincidenceScan& scan, std::span<const LinearEstimator> estimators,
                                            std::size_t replicates, std::uint64_t seed, std::span<const double> crbs,
                                            ReplicateBaseline baseline) {
  if (replicates < 2) throw ValidationError("bootstrap needs at least 2 replicates");
  if (!crbs.empty() && crbs.size() != estimators.size()) throw ValidationError("one CRB per estimator expected");
  scan.validate();
  for (const auto& e : estimators) {
    if (e.weights.size() != scan.size()) throw ValidationError("estimator and scan differ in length");
  }
  const auto observed = scan.counts_as_double();
  std::vector<std::vector<double>> est(estimators.size(), std::vector<double>(replicates));
  parallel_for(replicates, [&](std::size_t r) {
    try {
      CounterRng rng(seed, r);
      std::vector<double> counts(observed.size());
      for (std::size_t i = 0; i < observed.size(); ++i) counts[i] = static_cast<double>(sample_poisson(rng, observed[i]));
      double scale = 1.0;
      if (baseline == ReplicateBaseline::tail_average) {
        const double c0 = tail_average(counts);
        if (c0 > 0.0) scale = scan.baseline / c0;
      }
      for (std::size_t k = 0; k < estimators.size(); ++k) est[k][r] = scale * estimators[k].apply(counts);
    } catch (const std::exception& e) {
      throw NumericError("bootstrap replicate " + std::to_string(r) + " failed: " + e.what());
    }
  });
  std::vector<BootstrapResult> out;
  out.reserve(estimators.size());
  for (std::size_t k = 0; k < estimators.size(); ++k) {
    out.push_back(summarize(std::move(est[k]), crbs.empty() ? 0.0 : crbs[k]));
  }
  return out;
}

BootstrapResult bootstrap(const CoincidenceScan& scan, const ParameterSpec& spec, EstimatorMethod method,
                          std::size_t replicates, std::uint64_t seed, SplineBoundary boundary) {
  const auto est = build_estimator(scan.delays_fs, spec, method, boundary);
  const double crb = crb_at_interpolant(scan, spec, boundary);
  auto res = bootstrap_many(scan, std::span<const LinearEstimator>(&est, 1), replicates, seed,
                            std::span<const double>(&crb, 1));
  return std::move(res.front());
}

double reliability_threshold(double delay_step_fs) {
  if (delay_step_fs < 0.0) throw ValidationError("delay step must be non-negative");
  return delay_step_fs / std::numbers::sqrt2;
}

WitnessReport witness_scan(const CoincidenceScan& scan, int hg_order, std::span<const double> xi_fs, double v,
                           const WitnessOptions& options) {
  if (hg_order < 0 || hg_order % 2 != 0) throw ValidationError("witness needs an even Hermite-Gauss order");
  if (xi_fs.empty()) throw ValidationError("witness xi grid is empty");
  for (std::size_t i = 1; i < xi_fs.size(); ++i) {
    if (!(xi_fs[i] > xi_fs[i - 1])) throw ValidationError("witness xi grid must be strictly increasing");
  }
  if (!(options.threshold > 0.0)) throw ValidationError("witness threshold must be positive");
  scan.validate();
  check_visibility(v);

  WitnessReport rep;
  rep.order = hg_order;
  rep.method = options.method;
  rep.threshold = options.threshold;
  rep.replicates = options.replicates;
  rep.seed = options.seed;
  rep.baseline = options.baseline;
  rep.reliability_threshold_fs = reliability_threshold(scan.delay_step_fs);
  rep.xi_fs.assign(xi_fs.begin(), xi_fs.end());

  const auto counts = scan.counts_as_double();
  std::vector<LinearEstimator> ests;
  ests.reserve(xi_fs.size());
  for (double xi : xi_fs) {
    const auto spec = ParameterSpec::hermite_gauss(HGSpec(hg_order, xi), scan.delay_step_fs, scan.baseline);
    ests.push_back(build_estimator(scan.delays_fs, spec, options.method, options.boundary));
    rep.reliable.push_back(spec.reliable());
  }
  const auto boot = bootstrap_many(scan, ests, options.replicates, options.seed, {}, options.baseline);
  for (std::size_t k = 0; k < ests.size(); ++k) {
    const auto th = to_theta(ests[k].apply(counts), ests[k].variance(counts), v, ests[k].kernel_integral);
    const double dh = boot[k].stddev / v;
    rep.h.push_back(th.theta);
    rep.dh.push_back(dh);
    rep.dh_formula.push_back(std::sqrt(th.variance));
    double r = 0.0;
    if (dh > 0.0) {
      r = th.theta / dh;
    } else if (th.theta != 0.0) {
      r = std::copysign(std::numeric_limits<double>::infinity(), th.theta);
    }
    rep.r.push_back(r);
  }
  bool open = false;
  for (std::size_t k = 0; k < rep.xi_fs.size(); ++k) {
    const bool hit = rep.reliable[k] && rep.r[k] < -options.threshold;
    if (hit && !open) {
      rep.intervals.emplace_back(rep.xi_fs[k], rep.xi_fs[k]);
      open = true;
    } else if (hit) {
      rep.intervals.back().second = rep.xi_fs[k];
    } else {
      open = false;
    }
  }
  rep.witnessed = !rep.intervals.empty();
  return rep;
}

std::vector<BiasRow> bias_probe(const CoincidenceScan& scan, int hg_order, std::span<const int> factors,
                                std::span<const double> xi_fs, const BiasProbeOptions& options) {
  scan.validate();
  ProfileFn reference = options.crb_reference;
  std::string source = options.crb_source;
  if (!reference) {
    const auto fit = fit_profile(scan);
    reference = fit.expected_counts();
    source = "fit";
  }
  std::vector<BiasRow> rows;
  for (int factor : factors) {
    if (factor < 1) throw ValidationError("downsampling factors must be >= 1");
    const auto dec = decimate(scan, factor);
    std::vector<LinearEstimator> ests;
    std::vector<double> crbs;
    std::vector<BiasRow> block;
    for (double xi : xi_fs) {
      const auto spec = ParameterSpec::hermite_gauss(HGSpec(hg_order, xi), dec.delay_step_fs, dec.baseline);
      const double crb = crb_with_reference(dec, spec, reference);
      for (auto m : options.methods) {
        ests.push_back(build_estimator(dec.delays_fs, spec, m, options.boundary));
        crbs.push_back(crb);
        BiasRow row;
        row.factor = factor;
        row.delay_step_fs = dec.delay_step_fs;
        row.xi_fs = xi;
        row.method = m;
        row.crb = crb;
        row.reliable = spec.reliable();
        row.crb_source = source;
        block.push_back(row);
      }
    }
    const auto boot = bootstrap_many(dec, ests, options.replicates, options.seed, crbs);
    const auto counts = dec.counts_as_double();
    for (std::size_t k = 0; k < block.size(); ++k) {
      block[k].bootstrap_variance = boot[k].variance();
      block[k].formula_variance = ests[k].variance(counts);
      block[k].violation = boot[k].bias_flag;
      rows.push_back(block[k]);
    }
  }
  return rows;
}

}  // namespace hom
