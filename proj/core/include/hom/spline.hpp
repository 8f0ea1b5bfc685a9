#pragma once

#include <span>
#include <vector>

#include "hom/quadrature.hpp"

namespace hom {

enum class SplineBoundary { natural, not_a_knot };

/// Piecewise-cubic C2 interpolant through (x_i, y_i).
///
/// Evaluation outside [x_0, x_{n-1}] throws ValidationError: the interpolant
/// is never extrapolated.
class CubicSpline {
 public:
  CubicSpline(std::span<const double> x, std::span<const double> y,
              SplineBoundary boundary = SplineBoundary::natural);

  double operator()(double t) const;
  [[nodiscard]] double lower() const { return x_.front(); }
  [[nodiscard]] double upper() const { return x_.back(); }
  [[nodiscard]] const std::vector<double>& second_derivatives() const { return m_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

/// Linear functional of the interpolant.  Returns w such that, for every data
/// vector y on the knots x,
///
///   int_{x_0}^{x_{n-1}} S_y(t) kernel(t) dt = sum_i w_i y_i.
///
/// Per-interval moments use composite 20-point Gauss-Legendre, refined by
/// doubling until max |dw| <= rel_tol * max |w|.  `feature_scale` (the
/// narrowest structure of the kernel, 0 if unknown) sets the initial panel
/// width so that refinement cannot stall on a kernel missed by every node.
std::vector<double> spline_integral_weights(std::span<const double> x, const RealFn& kernel,
                                            SplineBoundary boundary,
                                            double feature_scale = 0.0,
                                            double rel_tol = 1e-10);

}  // namespace hom
