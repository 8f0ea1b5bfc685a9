#include "hom/hg_basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hom/error.hpp"

namespace hom {

HGSpec::HGSpec(int order_, double xi) : order(order_), xi_fs(xi) {
  if (order < 0 || order > kMaxHermiteOrder) {
    throw ValidationError("HG order must lie in [0, " + std::to_string(kMaxHermiteOrder) +
                          "], got " + std::to_string(order));
  }
  if (!(xi > 0.0) || !std::isfinite(xi)) {
    throw ValidationError("HG scale xi must be positive and finite");
  }
}

double hermite(int n, double x) {
  if (n < 0 || n > kMaxHermiteOrder) {
    throw ValidationError("Hermite order out of range: " + std::to_string(n));
  }
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hg_function(const HGSpec& spec, double omega) {
  const double x = spec.xi_fs * omega;
  return std::exp(-x * x) * hermite(spec.order, x);
}

double hg_time_kernel(const HGSpec& spec, double tau) {
  const double xi = spec.xi_fs;
  const double s = tau / xi;
  return std::sqrt(std::numbers::pi) * std::pow(s, spec.order) / xi * std::exp(-0.25 * s * s);
}

std::complex<double> hg_kernel_phase(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace hom
