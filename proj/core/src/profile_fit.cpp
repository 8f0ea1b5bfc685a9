#include "hom/profile_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "hom/error.hpp"

namespace hom {
namespace {

constexpr double kPi = std::numbers::pi;

// sinc(x) and its derivative
void sinc_and_slope(double x, double& s, double& ds) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    s = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    ds = -x / 3.0 + x * x2 / 30.0;
  } else {
    s = std::sin(x) / x;
    ds = (std::cos(x) - s) / x;
  }
}

struct DipFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  std::span<const double> tau;
  std::span<const double> counts;
  Eigen::VectorXd sqrt_w;

  [[nodiscard]] int inputs() const { return 5; }
  [[nodiscard]] int values() const { return static_cast<int>(tau.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const auto d = DipParameters{p[0], p[1], p[2], p[3], p[4]};
    for (std::size_t i = 0; i < tau.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = sqrt_w[static_cast<Eigen::Index>(i)] * (counts[i] - d.counts(tau[i]));
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    const double c0 = p[0], v = p[1], sg = p[2], b = p[3], t0 = p[4];
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double u = tau[i] - t0;
      const double g = std::exp(-u * u / (2.0 * sg * sg));
      const double x = kPi * b * u / sg;
      double s = 0.0, ds = 0.0;
      sinc_and_slope(x, s, ds);
      const double gs = g * s;
      const double dm_dc0 = 1.0 - v * gs;
      const double dm_dv = -c0 * gs;
      const double dm_dsigma = -c0 * v * (g * u * u / (sg * sg * sg) * s + g * ds * (-x / sg));
      const double dm_db = -c0 * v * g * ds * (kPi * u / sg);
      const double dm_dtau0 = -c0 * v * (g * u / (sg * sg) * s + g * ds * (-kPi * b / sg));
      const double w = -sqrt_w[k];
      j(k, 0) = w * dm_dc0;
      j(k, 1) = w * dm_dv;
      j(k, 2) = w * dm_dsigma;
      j(k, 3) = w * dm_db;
      j(k, 4) = w * dm_dtau0;
    }
    return 0;
  }
};

// half-depth abscissa c of exp(-c^2/2) sinc(pi B c) = 1/2
double half_depth_abscissa(double b) {
  auto h = [b](double c) {
    double s = 0.0, ds = 0.0;
    sinc_and_slope(kPi * b * c, s, ds);
    return std::exp(-0.5 * c * c) * s - 0.5;
  };
  double lo = 0.0;
  double hi = std::sqrt(2.0 * std::log(2.0));
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Attempt {
  FitResult result;
  bool ok = false;
};

Attempt run_fit(std::span<const double> tau, std::span<const double> counts, const DipParameters& start,
                const FitOptions& options) {
  DipFunctor functor{tau, counts, Eigen::VectorXd(static_cast<Eigen::Index>(tau.size()))};
  for (std::size_t i = 0; i < tau.size(); ++i) {
    functor.sqrt_w[static_cast<Eigen::Index>(i)] =
        options.poisson_weights ? 1.0 / std::sqrt(std::max(counts[i], 1.0)) : 1.0;
  }
  Eigen::VectorXd x(5);
  const auto a = start.as_array();
  for (int i = 0; i < 5; ++i) x[i] = a[static_cast<std::size_t>(i)];

  Eigen::LevenbergMarquardt<DipFunctor> lm(functor);
  lm.parameters.xtol = options.rel_step_tol;
  lm.parameters.ftol = 1e-16;
  lm.parameters.gtol = 0.0;
  lm.parameters.maxfev = 100 * options.max_iterations;

  Attempt out;
  auto status = lm.minimizeInit(x);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters) return out;
  int iterations = 0;
  Eigen::VectorXd previous = x;
  double step_norm = 0.0;
  do {
    previous = x;
    status = lm.minimizeOneStep(x);
    ++iterations;
    step_norm = (x - previous).norm();
  } while (status == Eigen::LevenbergMarquardtSpace::Running && iterations < options.max_iterations);
  if (!x.allFinite()) return out;

  FitResult& r = out.result;
  r.iterations = iterations;
  r.final_step_norm = step_norm;
  r.status = status == Eigen::LevenbergMarquardtSpace::Running ||
                     status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation
                 ? FitStatus::max_iterations
                 : FitStatus::converged;
  if (status == Eigen::LevenbergMarquardtSpace::UserAsked) return out;

  // sigma and B enter only through |sigma| and |B/sigma|
  x[2] = std::abs(x[2]);
  x[3] = std::abs(x[3]);
  r.params = DipParameters{x[0], x[1], x[2], x[3], x[4]};

  Eigen::VectorXd res(functor.values());
  functor(x, res);
  r.rss = res.squaredNorm();
  r.max_abs_residual = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    r.max_abs_residual = std::max(r.max_abs_residual, std::abs(counts[i] - r.params.counts(tau[i])));
  }

  Eigen::MatrixXd jac(functor.values(), 5);
  functor.df(x, jac);
  const Eigen::MatrixXd info = jac.transpose() * jac;
  Eigen::MatrixXd cov = info.completeOrthogonalDecomposition().pseudoInverse();
  if (!options.poisson_weights) {
    const double dof = std::max(1.0, static_cast<double>(tau.size()) - 5.0);
    cov *= r.rss / dof;
  }
  for (int i = 0; i < 5; ++i) r.std_errors[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, cov(i, i)));
  out.ok = true;
  return out;
}

}  // namespace

double DipParameters::counts(double tau_fs) const {
  const double u = tau_fs - tau0_fs;
  double s = 0.0, ds = 0.0;
  sinc_and_slope(kPi * b * u / sigma_fs, s, ds);
  return c0 * (1.0 - v * std::exp(-u * u / (2.0 * sigma_fs * sigma_fs)) * s);
}

std::string_view fit_status_name(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::no_dip: return "no_dip";
  }
  return "unknown";
}

ProfileFn FitResult::expected_counts() const {
  const auto p = params;
  return [p](double t) { return p.counts(t); };
}

ProfileFn FitResult::profile() const {
  const auto p = params;
  return [p](double t) {
    const double u = t - p.tau0_fs;
    double s = 0.0, ds = 0.0;
    sinc_and_slope(kPi * p.b * u / p.sigma_fs, s, ds);
    return std::exp(-u * u / (2.0 * p.sigma_fs * p.sigma_fs)) * s;
  };
}

DipParameters initial_guess(std::span<const double> tau, std::span<const double> counts, double b) {
  if (tau.size() != counts.size() || tau.size() < 3) throw ValidationError("initial guess needs matching data");
  DipParameters p;
  p.c0 = tail_average(counts);
  if (!(p.c0 > 0.0)) p.c0 = std::max(1.0, *std::max_element(counts.begin(), counts.end()));
  const auto imin = static_cast<std::size_t>(std::min_element(counts.begin(), counts.end()) - counts.begin());
  p.tau0_fs = tau[imin];
  p.v = std::clamp(1.0 - counts[imin] / p.c0, 0.05, 1.0);
  const double half = p.c0 * (1.0 - 0.5 * p.v);
  std::size_t lo = imin, hi = imin;
  while (lo > 0 && counts[lo] < half) --lo;
  while (hi + 1 < counts.size() && counts[hi] < half) ++hi;
  double width = 0.5 * (tau[hi] - tau[lo]);
  const double step = std::abs(tau[1] - tau[0]);
  width = std::max(width, step);
  p.b = b;
  p.sigma_fs = width / half_depth_abscissa(b);
  return p;
}

FitResult fit_profile(std::span<const double> tau, std::span<const double> counts, const FitOptions& options) {
  if (tau.size() != counts.size()) throw ValidationError("fit data lengths differ");
  if (tau.size() < 10) throw ValidationError("profile fit needs at least 10 points");
  for (double c : counts) {
    if (!std::isfinite(c) || c < 0.0) throw ValidationError("fit counts must be finite and non-negative");
  }
  if (options.max_iterations < 1) throw ValidationError("max_iterations must be positive");

  std::vector<DipParameters> starts;
  if (options.initial) {
    starts.push_back(*options.initial);
  } else {
    starts.push_back(initial_guess(tau, counts, 0.5));
  }
  if (options.multistart) {
    for (double b : {0.05, 1.0, 1.5}) {
      auto s = initial_guess(tau, counts, b);
      if (options.initial) {
        s.c0 = options.initial->c0;
        s.v = options.initial->v;
        s.tau0_fs = options.initial->tau0_fs;
      }
      starts.push_back(s);
    }
  }

  std::optional<FitResult> best;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    auto a = run_fit(tau, counts, starts[k], options);
    if (!a.ok) continue;
    a.result.start_index = k;
    const bool better = !best || (a.result.status == FitStatus::converged && best->status != FitStatus::converged) ||
                        (a.result.status == best->status && a.result.rss < best->rss);
    if (better) best = a.result;
  }
  if (!best) throw NumericError("profile fit failed from every starting point");
  const double se_v = best->std_errors[1];
  if (std::isfinite(se_v) && !(best->params.v > 2.0 * se_v)) {
    best->status = FitStatus::no_dip;
  }
  return *best;
}

FitResult fit_profile(const CoincidenceScan& scan, const FitOptions& options) {
  scan.validate();
  const auto c = scan.counts_as_double();
  return fit_profile(scan.delays_fs, c, options);
}

DipCenter dip_center(const CoincidenceScan& scan, const FitOptions& options) {
  const auto fit = fit_profile(scan, options);
  if (fit.status != FitStatus::converged) {
    throw NumericError(std::string("dip center unavailable: fit status ") + std::string(fit_status_name(fit.status)));
  }
  return {fit.params.tau0_fs, fit.std_errors[4]};
}

}  // namespace hom
