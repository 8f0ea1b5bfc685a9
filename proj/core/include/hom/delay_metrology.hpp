#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "hom/dip_model.hpp"
#include "hom/semipar_estimator.hpp"

namespace hom {

/// Smallest admissible central-difference step (fs).
inline constexpr double kMinDifferenceStep = 1e-6;

using ShiftFn = std::function<double(double)>;

struct DelayPoint {
  double derivative = 0.0;
  double dtau0_fs = 0.0;
  bool defined = false;
};

/// Central difference of h at `offset` with half-step `step`, and |dh / h'|.
/// Undefined (dtau0 = +inf) when the derivative is exactly zero.
DelayPoint delay_uncertainty(const ShiftFn& h_of_shift, double dh, double offset_fs, double step_fs);

/// (D(s) - D(s/2)) / (D(s/2) - D(s/4)) for the central difference D; about 4
/// for smooth h.
double richardson_ratio(const ShiftFn& h_of_shift, double offset_fs, double step_fs);

/// Noiseless h(tau0) = int f~(tau - tau0) vartheta~(tau) dtau over [-T, T].
/// The Simpson node set is fixed once per call so the result is smooth in tau0.
class ShiftedParameter {
 public:
  ShiftedParameter(ProfileFn profile, const HGSpec& hg, double half_range_fs, double reference_shift_fs = 0.0);
  double operator()(double tau0_fs) const;
  [[nodiscard]] long intervals() const { return intervals_; }

 private:
  ProfileFn profile_;
  HGSpec hg_;
  double a_ = 0.0;
  double b_ = 0.0;
  long intervals_ = 0;
  std::vector<double> kernel_;
};

enum class DeltaHSource { analytic, bootstrap };
std::string_view delta_h_source_name(DeltaHSource s);
DeltaHSource parse_delta_h_source(std::string_view name);

/// Standard deviation of h (theta scale) from the Poisson variance formula at the expected counts of
/// the configuration.
double analytic_delta_h(const ScanConfig& config, const ProfileFn& profile, double v, const HGSpec& hg,
                        EstimatorMethod method = EstimatorMethod::discrete);

/// Bootstrap standard deviation of h (theta scale) about a scan.
double bootstrap_delta_h(const CoincidenceScan& scan, double v, const HGSpec& hg, EstimatorMethod method,
                         std::size_t replicates, std::uint64_t seed);

struct DelaySensitivity {
  int order = 0;
  double working_offset_fs = 0.0;
  double step_fs = 0.0;
  std::vector<double> xi_fs;
  std::vector<double> dh;
  std::vector<double> derivative;
  std::vector<double> dtau0_fs;
  std::vector<bool> defined;

  /// Minimum dtau0 over defined points (+inf if none).
  [[nodiscard]] double min_dtau0() const;
};

/// For each xi: h(tau0) from ShiftedParameter, central difference at the
/// working offset, dtau0 = |dh / h'|.  Derivatives below 1e-3 of the largest
/// magnitude in the sweep, or at the rounding level of h, are marked undefined.
DelaySensitivity delay_sensitivity(const ProfileFn& profile, int hg_order, std::span<const double> xi_fs,
                                   std::span<const double> dh, double working_offset_fs, double step_fs,
                                   double half_range_fs);

}  // namespace hom
