#pragma once

#include <complex>

namespace hom {

/// Highest Hermite order supported in double precision.
inline constexpr int kMaxHermiteOrder = 20;

/// Hermite-Gauss component definition: order n and scale xi (fs).
struct HGSpec {
  int order = 0;
  double xi_fs = 1.0;

  HGSpec() = default;
  /// Throws ValidationError unless 0 <= order <= kMaxHermiteOrder and xi > 0.
  HGSpec(int order, double xi_fs);

  [[nodiscard]] bool even() const noexcept { return order % 2 == 0; }
};

/// Physicists' Hermite polynomial H_n(x), evaluated by three-term recurrence.
double hermite(int n, double x);

/// exp(-xi^2 w^2) H_n(xi w).
double hg_function(const HGSpec& spec, double omega_rad_fs);

/// Real part of the exact transform  int exp(i w tau) HG_n(w) dw  with the
/// phase i^n removed:
///
///   sqrt(pi) tau^n / xi^(n+1) exp(-tau^2 / (4 xi^2)).
///
/// Multiply by hg_kernel_phase(n) to recover the full transform.  For even n
/// the phase is (-1)^(n/2) and the transform is real.
double hg_time_kernel(const HGSpec& spec, double tau_fs);

/// i^n.
std::complex<double> hg_kernel_phase(int n);

}  // namespace hom
