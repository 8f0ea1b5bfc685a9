#include "hom/spline.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "hom/error.hpp"

namespace hom {
namespace {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

void check_knots(std::span<const double> x, SplineBoundary boundary) {
  const std::size_t min_pts = boundary == SplineBoundary::not_a_knot ? 4 : 3;
  if (x.size() < min_pts) {
    throw ValidationError("cubic spline needs at least " + std::to_string(min_pts) + " knots");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ValidationError("spline knots must be strictly increasing");
  }
}

// A m = R y relates knot second derivatives m to data y.
struct SecondDerivativeSystem {
  SparseMat a;
  SparseMat r;
};

SecondDerivativeSystem build_system(std::span<const double> x, SplineBoundary boundary) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Triplets ta;
  Triplets tr;
  ta.reserve(static_cast<std::size_t>(3 * n));
  tr.reserve(static_cast<std::size_t>(3 * n));
  auto h = [&](Eigen::Index j) { return x[static_cast<std::size_t>(j + 1)] - x[static_cast<std::size_t>(j)]; };

  for (Eigen::Index j = 1; j + 1 < n; ++j) {
    const double hl = h(j - 1);
    const double hr = h(j);
    ta.emplace_back(j, j - 1, hl);
    ta.emplace_back(j, j, 2.0 * (hl + hr));
    ta.emplace_back(j, j + 1, hr);
    tr.emplace_back(j, j - 1, 6.0 / hl);
    tr.emplace_back(j, j, -6.0 / hl - 6.0 / hr);
    tr.emplace_back(j, j + 1, 6.0 / hr);
  }
  if (boundary == SplineBoundary::natural) {
    ta.emplace_back(0, 0, 1.0);
    ta.emplace_back(n - 1, n - 1, 1.0);
  } else {
    // Continuous third derivative across the second and second-to-last knots.
    const double h0 = h(0), h1 = h(1);
    ta.emplace_back(0, 0, -h1);
    ta.emplace_back(0, 1, h0 + h1);
    ta.emplace_back(0, 2, -h0);
    const double ha = h(n - 3), hb = h(n - 2);
    ta.emplace_back(n - 1, n - 3, -hb);
    ta.emplace_back(n - 1, n - 2, ha + hb);
    ta.emplace_back(n - 1, n - 1, -ha);
  }
  SecondDerivativeSystem sys{SparseMat(n, n), SparseMat(n, n)};
  sys.a.setFromTriplets(ta.begin(), ta.end());
  sys.r.setFromTriplets(tr.begin(), tr.end());
  sys.a.makeCompressed();
  sys.r.makeCompressed();
  return sys;
}

Eigen::VectorXd solve(const SparseMat& a, const Eigen::VectorXd& rhs) {
  Eigen::SparseLU<SparseMat> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw NumericError("spline system is singular");
  return lu.solve(rhs);
}

// Moments of the kernel against the four local basis functions of interval
// [x0, x0 + h], using `pieces` Gauss-Legendre panels.
std::array<double, 4> interval_moments(double x0, double h, const RealFn& kernel, int pieces) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& nodes = GL::abscissa();
  const auto& weights = GL::weights();
  std::array<double, 4> mom{};
  const double piece = h / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double mid = x0 + (p + 0.5) * piece;
    const double half = 0.5 * piece;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      for (const double sign : {-1.0, 1.0}) {
        if (sign < 0 && nodes[k] == 0.0) continue;
        const double xx = mid + sign * half * nodes[k];
        const double wk = half * weights[k] * kernel(xx);
        const double t = (xx - x0) / h;
        const double u = 1.0 - t;
        mom[0] += wk * u;
        mom[1] += wk * t;
        mom[2] += wk * (u * u * u - u);
        mom[3] += wk * (t * t * t - t);
      }
    }
  }
  const double c = h * h / 6.0;
  mom[2] *= c;
  mom[3] *= c;
  return mom;
}

std::vector<double> weights_with_pieces(std::span<const double> x, const RealFn& kernel,
                                        const SparseMat& a_transposed_rhs_map,
                                        const SecondDerivativeSystem& sys, int pieces) {
  const std::size_t n = x.size();
  Eigen::VectorXd wy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const auto m = interval_moments(x[j], x[j + 1] - x[j], kernel, pieces);
    const auto jj = static_cast<Eigen::Index>(j);
    wy[jj] += m[0];
    wy[jj + 1] += m[1];
    g[jj] += m[2];
    g[jj + 1] += m[3];
  }
  // w = wy + R^T A^{-T} g
  const Eigen::VectorXd z = solve(a_transposed_rhs_map, g);
  const Eigen::VectorXd w = wy + sys.r.transpose() * z;
  return {w.data(), w.data() + w.size()};
}

}  // namespace

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y,
                         SplineBoundary boundary)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  check_knots(x, boundary);
  if (x.size() != y.size()) throw ValidationError("spline x and y sizes differ");
  const auto sys = build_system(x, boundary);
  const Eigen::Map<const Eigen::VectorXd> yv(y_.data(), static_cast<Eigen::Index>(y_.size()));
  const Eigen::VectorXd rhs = sys.r * yv;
  const Eigen::VectorXd m = solve(sys.a, rhs);
  m_.assign(m.data(), m.data() + m.size());
}

double CubicSpline::operator()(double t) const {
  if (t < x_.front() || t > x_.back()) {
    std::ostringstream msg;
    msg << "spline evaluation at " << t << " outside [" << x_.front() << ", " << x_.back() << "]";
    throw ValidationError(msg.str());
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t j = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (j + 1 >= x_.size()) j = x_.size() - 2;
  const double h = x_[j + 1] - x_[j];
  const double s = (t - x_[j]) / h;
  const double u = 1.0 - s;
  return u * y_[j] + s * y_[j + 1] +
         h * h / 6.0 * ((u * u * u - u) * m_[j] + (s * s * s - s) * m_[j + 1]);
}

std::vector<double> spline_integral_weights(std::span<const double> x, const RealFn& kernel,
                                            SplineBoundary boundary, double feature_scale,
                                            double rel_tol) {
  check_knots(x, boundary);
  const auto sys = build_system(x, boundary);
  const SparseMat at = SparseMat(sys.a.transpose());
  constexpr int kMaxPieces = 1 << 12;
  int pieces = 1;
  if (feature_scale > 0.0) {
    double widest = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) widest = std::max(widest, x[i] - x[i - 1]);
    pieces = static_cast<int>(std::clamp(std::ceil(widest / feature_scale), 1.0, 256.0));
  }
  auto prev = weights_with_pieces(x, kernel, at, sys, pieces);
  while (pieces < kMaxPieces) {
    pieces *= 2;
    auto cur = weights_with_pieces(x, kernel, at, sys, pieces);
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      scale = std::max(scale, std::abs(cur[i]));
      diff = std::max(diff, std::abs(cur[i] - prev[i]));
    }
    if (diff <= rel_tol * scale || scale == 0.0) return cur;
    prev = std::move(cur);
  }
  throw NumericError("spline kernel moments did not converge");
}

}  // namespace hom
