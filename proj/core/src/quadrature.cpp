#include "hom/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "hom/error.hpp"

namespace hom {

double trapezoid(std::span<const double> samples, double step) {
  if (samples.size() < 2) return 0.0;
  double sum = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) sum += samples[i];
  return sum * step;
}

double simpson(const RealFn& f, double a, double b, long intervals) {
  if (intervals < 2 || intervals % 2 != 0) {
    throw ValidationError("simpson: interval count must be even and >= 2");
  }
  const double h = (b - a) / static_cast<double>(intervals);
  double odd = 0.0;
  double even = 0.0;
  for (long i = 1; i < intervals; ++i) {
    const double v = f(a + h * static_cast<double>(i));
    (i % 2 ? odd : even) += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

QuadratureResult integrate_doubling(const RealFn& f, double a, double b,
                                    const QuadratureOptions& opts) {
  long n = opts.initial_intervals + (opts.initial_intervals % 2);
  double prev = simpson(f, a, b, n);
  for (int level = 0; level < opts.max_doublings; ++level) {
    n *= 2;
    const double cur = simpson(f, a, b, n);
    const double change = std::abs(cur - prev);
    if (change <= opts.rel_tol * std::abs(cur) || change <= opts.abs_tol ||
        (cur == 0.0 && prev == 0.0)) {
      return {cur, n, change};
    }
    prev = cur;
  }
  std::ostringstream msg;
  msg << "quadrature did not converge on [" << a << ", " << b << "] after " << n
      << " intervals";
  throw NumericError(msg.str());
}

double gauss_legendre(const RealFn& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

}  // namespace hom
