#pragma once

#include <functional>
#include <span>

namespace hom {

using RealFn = std::function<double(double)>;

/// Composite trapezoid over uniformly spaced samples.
double trapezoid(std::span<const double> samples, double step);

/// Composite Simpson rule with `intervals` (even) subintervals on [a, b].
double simpson(const RealFn& f, double a, double b, long intervals);

struct QuadratureOptions {
  double rel_tol = 1e-8;
  /// Absolute floor below which the integral is treated as zero.
  double abs_tol = 0.0;
  long initial_intervals = 64;
  int max_doublings = 18;
};

struct QuadratureResult {
  double value = 0.0;
  long intervals = 0;
  double last_change = 0.0;
};

/// Composite Simpson with successive grid doubling until two consecutive
/// results agree to rel_tol.  Throws NumericError on non-convergence.
QuadratureResult integrate_doubling(const RealFn& f, double a, double b,
                                    const QuadratureOptions& opts = {});

/// 20-point Gauss-Legendre on [a, b].
double gauss_legendre(const RealFn& f, double a, double b);

}  // namespace hom
