#include "hom/grid.hpp"

#include <cmath>

#include "hom/error.hpp"

namespace hom {

std::vector<double> UniformGrid::points() const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = at(i);
  return out;
}

bool UniformGrid::symmetric_about_zero(double rel_tol) const {
  if (count == 0) return false;
  return std::abs(start + back()) <= rel_tol * std::abs(start) + 1e-300;
}

UniformGrid UniformGrid::symmetric(double half_span, std::size_t count) {
  if (!(half_span > 0.0)) throw ValidationError("grid half-span must be positive");
  if (count < 3) throw ValidationError("symmetric grid needs at least 3 points");
  if (count % 2 == 0) ++count;
  const auto mid = static_cast<double>((count - 1) / 2);
  const double step = half_span / mid;
  return {-mid * step, step, count};
}

}  // namespace hom
