#pragma once

#include <cstddef>
#include <vector>

namespace hom {

/// Uniform sampling start + i * step, i = 0 .. count-1.
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  [[nodiscard]] double at(std::size_t i) const { return start + step * static_cast<double>(i); }
  [[nodiscard]] double back() const { return at(count - 1); }
  [[nodiscard]] std::vector<double> points() const;
  /// True when the grid is a mirror image of itself about zero.
  [[nodiscard]] bool symmetric_about_zero(double rel_tol = 1e-12) const;

  /// Odd-count grid spanning [-half_span, half_span] with zero as a node.
  static UniformGrid symmetric(double half_span, std::size_t count);
};

}  // namespace hom
