#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hom/dip_model.hpp"
#include "hom/hg_basis.hpp"
#include "hom/quadrature.hpp"
#include "hom/spline.hpp"

namespace hom {

enum class EstimatorMethod { discrete, interpolated };

std::string_view method_name(EstimatorMethod m);
/// Accepts "discrete" or "interpolated".
EstimatorMethod parse_method(std::string_view name);

/// Kernel envelope level at the scan edge above which a truncation warning is raised.
inline constexpr double kTruncationLevel = 1e-6;

/// Parameter definition theta = int f(w) vartheta(w) dw = int f~(tau) vartheta~(tau) dtau
/// together with the scan constants that enter the discretized kernel.
///
/// For a Hermite-Gauss spec of order m the frequency weight is i^m HG_m(w), so
/// the time kernel is the real function hg_time_kernel / (2 pi) and, for even
/// m, theta equals (-1)^(m/2) int HG_m f dw.
class ParameterSpec {
 public:
  static ParameterSpec hermite_gauss(const HGSpec& hg, double delay_step_fs, double baseline);
  /// Arbitrary real kernel.  `feature_scale` is the narrowest width (fs) of its structure.
  static ParameterSpec custom(RealFn kernel, double feature_scale, double delay_step_fs, double baseline);

  /// vartheta~(tau).
  [[nodiscard]] double kernel(double tau_fs) const { return kernel_(tau_fs); }
  /// vartheta~(tau) dtau / C0.
  [[nodiscard]] double discretized_kernel(double tau_fs) const;
  /// vartheta(w); only available for Hermite-Gauss specs.
  [[nodiscard]] std::complex<double> frequency_weight(double omega_rad_fs) const;

  [[nodiscard]] const std::optional<HGSpec>& hg() const { return hg_; }
  [[nodiscard]] double delay_step_fs() const { return step_; }
  [[nodiscard]] double baseline() const { return baseline_; }
  [[nodiscard]] double feature_scale() const { return feature_scale_; }
  /// Half-width beyond which the kernel is negligible (infinite for custom kernels).
  [[nodiscard]] double support_half_width() const;

  /// Kernel envelope exp(-T^2 / 4 xi^2) at half-range T exceeds kTruncationLevel.
  [[nodiscard]] bool truncated_at(double half_range_fs) const;
  /// xi > dtau / sqrt 2 (always true for custom kernels).
  [[nodiscard]] bool reliable() const;

 private:
  ParameterSpec() = default;
  RealFn kernel_;
  std::optional<HGSpec> hg_;
  double feature_scale_ = 0.0;
  double step_ = 0.0;
  double baseline_ = 0.0;
};

/// Raw moments int w^n f dw have distributional kernels; always throws ValidationError.
[[noreturn]] void raw_moment_parameter(int n);

/// Linear functional theta' = sum_i w_i C_i of the observed counts.
struct LinearEstimator {
  EstimatorMethod method = EstimatorMethod::discrete;
  std::vector<double> weights;
  /// int vartheta~ dtau under the same quadrature rule as the weights (= C0 sum w_i).
  double kernel_integral = 0.0;

  [[nodiscard]] double apply(std::span<const double> counts) const;
  [[nodiscard]] double apply(std::span<const std::int64_t> counts) const;
  /// sum_i C_i w_i^2 for independent Poisson counts with means C_i.
  [[nodiscard]] double variance(std::span<const double> expected_counts) const;
};

LinearEstimator build_estimator(std::span<const double> delays_fs, const ParameterSpec& spec,
                                EstimatorMethod method,
                                SplineBoundary boundary = SplineBoundary::natural);

/// sum_i C_i vartheta~'(tau_i).  Throws when step or C0 differ from the spec.
double estimate_discrete(const CoincidenceScan& scan, const ParameterSpec& spec);

/// sum_i C(tau_i) vartheta~'(tau_i)^2.  Throws on negative expected counts.
double variance_discrete(std::span<const double> delays_fs, std::span<const double> expected_counts,
                         const ParameterSpec& spec);

/// Integral of the piecewise-cubic interpolant of the counts against vartheta~' / dtau,
/// clipped to the grid range.  Needs at least 4 points.
double estimate_interpolated(const CoincidenceScan& scan, const ParameterSpec& spec,
                             SplineBoundary boundary = SplineBoundary::natural);

struct ThetaEstimate {
  double theta = 0.0;
  double variance = 0.0;
};

/// theta = (int vartheta~ - theta') / v and variance / v^2.
ThetaEstimate to_theta(double theta_prime, double variance_prime, double v, double kernel_integral);

/// int_{-T}^{T} C(tau) vartheta~'(tau)^2 / dtau  dtau, by Simpson grid doubling to 1e-8.
double crb_continuous(const ProfileFn& expected_counts, const ParameterSpec& spec, double half_range_fs);

struct EstimateReport {
  int order = 0;
  double xi_fs = 0.0;
  EstimatorMethod method = EstimatorMethod::discrete;
  double theta_prime = 0.0;
  double variance_prime = 0.0;
  double crb_prime = 0.0;
  double theta = 0.0;
  /// On the theta scale (divided by v^2).
  double variance = 0.0;
  double crb = 0.0;
  double kernel_integral = 0.0;
  bool reliable = false;
  bool truncation_warning = false;
};

struct EstimatorOptions {
  SplineBoundary boundary = SplineBoundary::natural;
  /// Expected counts C(tau) used for the CRB.  When empty the cubic interpolant
  /// of the observed counts is used.
  ProfileFn crb_reference;
  /// Skip the CRB quadrature (reported as 0).
  bool compute_crb = true;
};

/// Estimate of the Hermite-Gauss component of order `hg_order` (0, 2, 4, ...)
/// at scale xi.  The variance is evaluated at the observed counts.
EstimateReport hg_parameter(const CoincidenceScan& scan, int hg_order, double xi_fs, double v,
                            EstimatorMethod method, const EstimatorOptions& options = {});

/// hg_parameter over every (order, xi) pair, orders outermost.
std::vector<EstimateReport> estimate_sweep(const CoincidenceScan& scan, std::span<const int> orders,
                                           std::span<const double> xi_fs, double v,
                                           EstimatorMethod method, const EstimatorOptions& options = {});

/// Geometric grid of `steps` values from lo to hi inclusive.
std::vector<double> xi_grid(double lo, double hi, std::size_t steps);

/// Reference value theta = int f(w) vartheta(w) dw by quadrature on the spectral grid.
double frequency_domain_theta(const SpectralFunction& f, const HGSpec& hg);

/// Reference value theta = int f~(tau) vartheta~(tau) dtau by Simpson doubling over [-L, L].
double time_domain_theta(const ProfileFn& profile, const HGSpec& hg, double half_range_fs);

}  // namespace hom
