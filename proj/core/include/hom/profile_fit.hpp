#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "hom/dip_model.hpp"

namespace hom {

/// C0 (1 - v exp(-u^2 / 2 sigma^2) sinc(pi B u / sigma)),  u = tau - tau0.
struct DipParameters {
  double c0 = 0.0;
  double v = 0.0;
  double sigma_fs = 0.0;
  double b = 0.0;
  double tau0_fs = 0.0;

  [[nodiscard]] std::array<double, 5> as_array() const { return {c0, v, sigma_fs, b, tau0_fs}; }
  static DipParameters from_array(const std::array<double, 5>& p) { return {p[0], p[1], p[2], p[3], p[4]}; }
  [[nodiscard]] double counts(double tau_fs) const;
};

enum class FitStatus { converged, max_iterations, no_dip };
std::string_view fit_status_name(FitStatus s);

struct FitOptions {
  std::optional<DipParameters> initial;
  /// Weights 1 / max(C_i, 1); unweighted least squares otherwise.
  bool poisson_weights = true;
  int max_iterations = 500;
  double rel_step_tol = 1e-10;
  /// Extra starting values of B tried after the default start.
  bool multistart = true;
};

struct FitResult {
  DipParameters params;
  /// Standard errors in the order c0, v, sigma, b, tau0.
  std::array<double, 5> std_errors{};
  double rss = 0.0;
  /// Largest |residual| (unweighted, in counts).
  double max_abs_residual = 0.0;
  int iterations = 0;
  double final_step_norm = 0.0;
  FitStatus status = FitStatus::converged;
  std::size_t start_index = 0;

  [[nodiscard]] ProfileFn expected_counts() const;
  /// Normalized f~: exp(-u^2 / 2 sigma^2) sinc(pi B u / sigma) about tau0.
  [[nodiscard]] ProfileFn profile() const;
};

/// Initial guesses: C0 from the tails, v from the depth, tau0 at the minimum,
/// sigma from the half-depth width for the given B.
DipParameters initial_guess(std::span<const double> delays_fs, std::span<const double> counts, double b = 0.5);

/// Damped least squares.  Needs at least 10 points.  Throws NumericError when
/// the optimizer breaks down.
FitResult fit_profile(std::span<const double> delays_fs, std::span<const double> counts,
                      const FitOptions& options = {});
FitResult fit_profile(const CoincidenceScan& scan, const FitOptions& options = {});

struct DipCenter {
  double tau0_fs = 0.0;
  double std_error = 0.0;
};

/// tau0 from a converged fit; throws NumericError otherwise.
DipCenter dip_center(const CoincidenceScan& scan, const FitOptions& options = {});

}  // namespace hom
