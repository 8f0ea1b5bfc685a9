#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hom/dip_model.hpp"
#include "hom/semipar_estimator.hpp"

namespace hom {

struct BootstrapResult {
  std::size_t replicates = 0;
  std::vector<double> estimates;
  double mean = 0.0;
  double stddev = 0.0;
  double crb = 0.0;
  /// stddev^2 < crb (1 - 3 / sqrt M).
  bool bias_flag = false;

  [[nodiscard]] double variance() const { return stddev * stddev; }
};

/// How the C0 estimate enters a bootstrap replicate.
enum class ReplicateBaseline {
  fixed,        ///< the scan's recorded C0 is reused, so estimators stay linear
  tail_average  ///< C0 is re-estimated from the replicate's tails
};

/// Replicate r draws Poisson counts with means equal to the observed counts
/// from the stream (seed, r).  With ReplicateBaseline::fixed every estimator
/// is a fixed linear functional; with tail_average each replicate estimate is
/// rescaled by C0 / C0_r.  Each estimator is applied to the
/// same replicates; estimates are returned on the theta' scale, and `crbs`
/// (theta' scale, one per estimator, may be empty) sets the bias flags.
/// Replicates run in parallel; results do not depend on the thread count.
std::vector<BootstrapResult> bootstrap_many(const CoincidenceScan& scan,
                                            std::span<const LinearEstimator> estimators,
                                            std::size_t replicates, std::uint64_t seed,
                                            std::span<const double> crbs = {},
                                            ReplicateBaseline baseline = ReplicateBaseline::fixed);

/// Single-parameter bootstrap on the theta' scale with the CRB evaluated at the
/// cubic interpolant of the observed counts.
BootstrapResult bootstrap(const CoincidenceScan& scan, const ParameterSpec& spec, EstimatorMethod method,
                          std::size_t replicates, std::uint64_t seed,
                          SplineBoundary boundary = SplineBoundary::natural);

/// Summary statistics and bias flag for a set of replicate estimates.
BootstrapResult summarize(std::vector<double> estimates, double crb);

/// dtau / sqrt 2.
double reliability_threshold(double delay_step_fs);

struct WitnessOptions {
  double threshold = 3.0;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  EstimatorMethod method = EstimatorMethod::interpolated;
  SplineBoundary boundary = SplineBoundary::natural;
  /// The C0 estimate is part of h, so by default its spread enters dh.
  ReplicateBaseline baseline = ReplicateBaseline::tail_average;
};

struct WitnessReport {
  int order = 0;
  EstimatorMethod method = EstimatorMethod::interpolated;
  double threshold = 3.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  ReplicateBaseline baseline = ReplicateBaseline::tail_average;
  double reliability_threshold_fs = 0.0;
  std::vector<double> xi_fs;
  std::vector<double> h;
  std::vector<double> dh;
  std::vector<double> r;
  /// Formula standard deviation at the observed counts, theta scale.
  std::vector<double> dh_formula;
  std::vector<bool> reliable;
  bool witnessed = false;
  /// Closed xi ranges of consecutive grid points that witness.
  std::vector<std::pair<double, double>> intervals;
};

/// Sweep of the even HG component `hg_order` over a strictly increasing xi
/// grid with bootstrap uncertainties.  Witnessed where reliable and
/// h / dh < -threshold.
WitnessReport witness_scan(const CoincidenceScan& scan, int hg_order, std::span<const double> xi_fs, double v,
                           const WitnessOptions& options = {});

struct BiasRow {
  int factor = 1;
  double delay_step_fs = 0.0;
  double xi_fs = 0.0;
  EstimatorMethod method = EstimatorMethod::interpolated;
  /// theta' scale.
  double bootstrap_variance = 0.0;
  double formula_variance = 0.0;
  double crb = 0.0;
  bool violation = false;
  bool reliable = false;
  std::string crb_source;
};

struct BiasProbeOptions {
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  std::vector<EstimatorMethod> methods{EstimatorMethod::interpolated, EstimatorMethod::discrete};
  SplineBoundary boundary = SplineBoundary::natural;
  /// Expected counts C(tau) for the CRB.  When empty a profile fit of the
  /// scan is used and rows are labelled "fit".
  ProfileFn crb_reference;
  std::string crb_source = "true";
};

/// Bootstrap vs CRB on scans decimated by each factor (every k-th point,
/// dtau -> k dtau).  Violation: bootstrap variance < CRB (1 - 3 / sqrt M).
std::vector<BiasRow> bias_probe(const CoincidenceScan& scan, int hg_order, std::span<const int> factors,
                                std::span<const double> xi_fs, const BiasProbeOptions& options = {});

}  // namespace hom
