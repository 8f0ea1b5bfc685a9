#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hom/spdc_model.hpp"

namespace hom {

/// Library version string (also embedded in every emitted file).
const char* version();

/// Lossless beam splitter with reflectivity R and transmissivity T = 1 - R.
class BeamSplitter {
 public:
  /// Throws ValidationError unless 0 < R < 1.
  explicit BeamSplitter(double reflectivity);

  [[nodiscard]] double reflectivity() const { return r_; }
  [[nodiscard]] double transmissivity() const { return 1.0 - r_; }

 private:
  double r_;
};

/// Dip visibility 2RT / (R^2 + T^2).
double visibility(const BeamSplitter& bs);

/// Throws ValidationError naming `field` unless v lies in (0, 1].
void check_visibility(double v, const char* field = "visibility");

/// Delay scan settings.  The grid is {-T, ..., -dtau, 0, dtau, ..., T}.
struct ScanConfig {
  double delay_step_fs = 13.4;
  double half_range_fs = 1340.0;
  /// Expected counts per acquisition window far from the dip.
  double baseline_counts = 4653.0;
  double integration_window_s = 5.0;
  double dip_offset_fs = 0.0;

  void validate() const;
  [[nodiscard]] std::size_t points() const;
  /// Exact grid: delays are integer multiples of the step.
  [[nodiscard]] std::vector<double> delays() const;
};

struct Provenance {
  std::string kind = "ingested";  ///< "simulated" or "ingested"
  std::uint64_t seed = 0;
  std::string source;
  std::string rng;
};

/// Observed coincidence counts on a uniform delay grid.
struct CoincidenceScan {
  std::vector<double> delays_fs;
  std::vector<std::int64_t> counts;
  double delay_step_fs = 0.0;
  /// Recorded estimate of C0 used to normalize estimators.
  double baseline = 0.0;
  Provenance provenance;

  /// Throws ValidationError on non-uniform grids, negative counts or size mismatch.
  void validate() const;
  [[nodiscard]] std::size_t size() const { return counts.size(); }
  [[nodiscard]] std::vector<double> counts_as_double() const;
  /// Index of the grid point closest to zero delay.
  [[nodiscard]] std::size_t center_index() const;
};

/// C0 (1 - v f~(tau - tau0)).
double expected_counts(double baseline, double v, const ProfileFn& profile, double tau0, double tau);

/// Expected counts at every grid point of `config`.
std::vector<double> expected_profile(const ScanConfig& config, const ProfileFn& profile, double v);

/// Mean of the outermost 10 % of points on each side of the grid.
double tail_average(std::span<const double> counts);

enum class BaselineMode { tail_average, nominal };

/// Independent Poisson draw at every delay, mean expected_counts(tau_i).
/// Grid point i draws from the stream (seed, i), so the result depends only on
/// (config, profile, v, seed).
CoincidenceScan sample_scan(const ScanConfig& config, const ProfileFn& profile, double v,
                            std::uint64_t seed, BaselineMode baseline = BaselineMode::tail_average,
                            std::string source = {});

/// Keeps every k-th point counted from the point nearest zero delay.
/// Throws ValidationError when fewer than 4 points would remain.
CoincidenceScan decimate(const CoincidenceScan& scan, int factor);

/// Shifts the delay axis so that `tau0` becomes zero.
CoincidenceScan recenter(const CoincidenceScan& scan, double tau0);

/// Shipped reference configuration: dtau = 13.4 fs, C0 = 4653, v = 0.81 and
/// the approximate profile fitted to 7.3 nm fourth-order filters.
struct ScanPreset {
  ScanConfig config;
  double visibility = 0.81;
  SpectralModel model;
};

ScanPreset reference_preset();
/// Same scan settings with identical Gaussian photons (no spectral entanglement).
ScanPreset separable_preset();

}  // namespace hom
