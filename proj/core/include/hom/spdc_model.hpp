#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hom/grid.hpp"
#include "hom/spline.hpp"

namespace hom {

inline constexpr double kSpeedOfLightNmPerFs = 299.792458;

/// Angular-frequency width (rad/fs) of a filter of width `width_nm` centred at
/// `center_nm`:  2 pi c dlambda / lambda^2.
double angular_bandwidth(double width_nm, double center_nm);

/// Carrier angular frequency (rad/fs) of a wavelength in nm.
double angular_frequency(double wavelength_nm);

/// Delay (fs) produced by a double-pass stage displacement: tau = 2 dx / c.
double stage_delay_fs(double displacement_um);

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

enum class AmplitudeShape { gaussian, super_gaussian };

/// Single-photon spectral amplitude.
///
///   gaussian:        exp(-(w - c)^2 / (4 s^2))      (|phi|^2 has rms width s)
///   super_gaussian:  exp(-(w - c)^p / (2 s^p))      (p even, filter-like)
///
/// An optional linear phase exp(i w delay) displaces the photon in time.
struct SinglePhotonAmplitude {
  AmplitudeShape shape = AmplitudeShape::gaussian;
  double center_rad_fs = 0.0;
  double width_rad_fs = 0.02;
  int order = 4;
  double delay_fs = 0.0;

  std::complex<double> operator()(double omega) const;
  /// Distance from the centre beyond which |amplitude| < 1e-17.
  [[nodiscard]] double reach() const;
  void validate() const;
};

/// Phi(w1, w2) = phi1(w1) phi2(w2).
struct SeparableProduct {
  SinglePhotonAmplitude signal;
  SinglePhotonAmplitude idler;
};

/// Monochromatic pump (delta in w1 + w2) and identical super-Gaussian filters.
struct CWFiltered {
  double filter_width_rad_fs = 0.02;
  int filter_order = 4;
};

/// Approximate profile f~(tau) = exp(-tau^2 / (2 sigma^2)) sinc(pi B tau / sigma).
struct ApproxSincGauss {
  double sigma_fs = 100.0;
  double bandwidth_b = 0.5;
};

/// Sampled joint spectral amplitude, row-major in (w1, w2).  Both axes must
/// coincide; sum |Phi|^2 dw1 dw2 must equal 1 within 1e-6.
struct NumericGrid {
  UniformGrid omega1;
  UniformGrid omega2;
  std::vector<std::complex<double>> samples;

  [[nodiscard]] std::complex<double> at(std::size_t i1, std::size_t i2) const {
    return samples[i1 * omega2.count + i2];
  }
  [[nodiscard]] double norm() const;
  void validate() const;

  /// Samples an arbitrary JSA on the square grid and normalizes it.
  static NumericGrid sample(const std::function<std::complex<double>(double, double)>& jsa,
                            const UniformGrid& axis);
};

using SpectralModel = std::variant<SeparableProduct, CWFiltered, ApproxSincGauss, NumericGrid>;

void validate(const SpectralModel& model);
std::string model_name(const SpectralModel& model);

/// f(w) sampled on a uniform grid, normalized so that int f dw = 1 (f~(0) = 1).
struct SpectralFunction {
  UniformGrid omega;
  std::vector<std::complex<double>> values;
  bool real_valued = true;
  /// int f dw before normalization.
  double raw_integral = 0.0;

  /// max |f(-w) - conj f(w)| / max |f|.
  [[nodiscard]] double hermitian_defect() const;
};

/// f~(tau) on a uniform delay grid.  Between nodes the profile is
/// interpolated; outside the grid it is taken as zero.
class TimeProfile {
 public:
  TimeProfile(UniformGrid tau, std::vector<double> values);

  double operator()(double tau_fs) const;
  [[nodiscard]] const UniformGrid& tau() const { return tau_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  /// Value at tau = 0 (interpolated when 0 is not a node).
  [[nodiscard]] double peak() const { return (*this)(0.0); }
  /// max |f~| over the outer 5 % of the grid, relative to max |f~|.
  [[nodiscard]] double edge_level() const;
  /// max(0, -min f~) / f~(0).
  [[nodiscard]] double negativity() const;

 private:
  UniformGrid tau_;
  std::vector<double> values_;
  CubicSpline interp_;
};

/// Real-valued delay profile, f~(tau) normalized to f~(0) = 1.
using ProfileFn = std::function<double(double)>;

/// Marginal symmetrised wavefunction
///
///   f(w) = 1/2 int dW Phi*((W+w)/2, (W-w)/2) Phi((W-w)/2, (W+w)/2)
///
/// on the requested grid (uniform and symmetric about 0).  Closed forms are
/// used for CWFiltered and ApproxSincGauss; SeparableProduct integrates over W
/// with a self-consistency check; NumericGrid sums the sampled anti-diagonals.
SpectralFunction marginal_symmetrised(const SpectralModel& model, const UniformGrid& omega);

/// Span +-10 sigma_0 (or the model equivalent) with 2049 points.
UniformGrid default_omega_grid(const SpectralModel& model);

/// f~(tau) = int exp(i w tau) f(w) dw by trapezoid summation.  Throws
/// ValidationError when |tau| reaches the alias period pi / dw, NumericError
/// when the imaginary residue exceeds 1e-9 of the peak.
TimeProfile time_profile(const SpectralFunction& f, const UniformGrid& tau);

/// Delay grid whose edges lie where the profile has decayed below 1e-8.
UniformGrid default_tau_grid(const SpectralFunction& f);

/// exp(-tau^2 / (2 sigma^2)) sinc(pi B tau / sigma).
double approx_profile(double sigma_fs, double b, double tau_fs);

/// Inverse transform of approx_profile: the f(w) whose f~ it is.
double approx_spectrum(double sigma_fs, double b, double omega_rad_fs);

/// Normalized f~ for any model: analytic for ApproxSincGauss, otherwise
/// computed on the default grids and interpolated.
ProfileFn make_profile(const SpectralModel& model);

/// 7.3 nm fourth-order super-Gaussian filters at 810 nm.
CWFiltered default_filters();

}  // namespace hom
