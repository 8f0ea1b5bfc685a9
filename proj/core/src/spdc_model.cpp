#include "hom/spdc_model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "hom/error.hpp"
#include "hom/quadrature.hpp"

namespace hom {
namespace {

constexpr double kPi = std::numbers::pi;
// -ln(1e-17)
constexpr double kDecayExponent = 39.14;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + " must be positive and finite");
  }
}

void check_even_order(int order, const char* what) {
  if (order < 2 || order % 2 != 0) {
    throw ValidationError(std::string(what) + " must be a positive even integer");
  }
}

double max_abs(const std::vector<std::complex<double>>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// f(w) = int du S*(u + w/2) S(u - w/2),  S = phi1 conj(phi2).
std::complex<double> separable_point(const SeparableProduct& m, double omega, double lo,
                                     double hi, long intervals) {
  const double half = 0.5 * std::abs(omega);
  const double a = lo + half;
  const double b = hi - half;
  if (!(b > a)) return {0.0, 0.0};
  auto s = [&](double x) { return m.signal(x) * std::conj(m.idler(x)); };
  const double h = (b - a) / static_cast<double>(intervals);
  std::complex<double> sum{0.0, 0.0};
  for (long i = 0; i <= intervals; ++i) {
    const double u = a + h * static_cast<double>(i);
    const double w = (i == 0 || i == intervals) ? 0.5 : 1.0;
    sum += w * std::conj(s(u + 0.5 * omega)) * s(u - 0.5 * omega);
  }
  return sum * h;
}

std::pair<double, double> separable_support(const SeparableProduct& m) {
  const double lo = std::max(m.signal.center_rad_fs - m.signal.reach(),
                             m.idler.center_rad_fs - m.idler.reach());
  const double hi = std::min(m.signal.center_rad_fs + m.signal.reach(),
                             m.idler.center_rad_fs + m.idler.reach());
  return {lo, hi};
}

std::vector<std::complex<double>> separable_values(const SeparableProduct& m,
                                                   const UniformGrid& omega) {
  const auto [lo, hi] = separable_support(m);
  std::vector<std::complex<double>> out(omega.count, {0.0, 0.0});
  if (!(hi > lo)) return out;
  const double narrowest = std::min(m.signal.width_rad_fs, m.idler.width_rad_fs);
  const double fastest_phase = std::max(std::abs(m.signal.delay_fs), std::abs(m.idler.delay_fs));
  double du = narrowest / 8.0;
  if (fastest_phase > 0.0) du = std::min(du, 0.5 / fastest_phase);
  long base = std::max(64L, static_cast<long>(std::ceil((hi - lo) / du)));

  constexpr int kMaxRefinements = 4;
  for (int attempt = 0; attempt <= kMaxRefinements; ++attempt, base *= 2) {
    std::vector<std::complex<double>> coarse(omega.count);
    for (std::size_t i = 0; i < omega.count; ++i) {
      const double w = omega.at(i);
      coarse[i] = separable_point(m, w, lo, hi, base);
      out[i] = separable_point(m, w, lo, hi, 2 * base);
    }
    const double scale = max_abs(out);
    double diff = 0.0;
    for (std::size_t i = 0; i < omega.count; ++i) diff = std::max(diff, std::abs(out[i] - coarse[i]));
    if (diff <= 1e-10 * scale) return out;
  }
  throw NumericError("grid too coarse: W quadrature of the separable JSA failed its self-consistency check");
}

std::vector<std::complex<double>> numeric_grid_values(const NumericGrid& g,
                                                      const UniformGrid& omega) {
  const std::size_t n = g.omega1.count;
  const double d = g.omega1.step;
  // Anti-diagonal sums on the difference lattice w_k = k d, k = -(n-1)..(n-1).
  std::vector<double> lattice(2 * n - 1);
  std::vector<double> re(2 * n - 1);
  std::vector<double> im(2 * n - 1);
  for (std::size_t idx = 0; idx < 2 * n - 1; ++idx) {
    const long k = static_cast<long>(idx) - static_cast<long>(n - 1);
    lattice[idx] = static_cast<double>(k) * d;
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const long i = static_cast<long>(j) + k;
      if (i < 0 || i >= static_cast<long>(n)) continue;
      const auto iu = static_cast<std::size_t>(i);
      sum += std::conj(g.at(iu, j)) * g.at(j, iu);
    }
    // dW = 2d along the anti-diagonal, times the leading 1/2.
    const auto f = sum * d;
    re[idx] = f.real();
    im[idx] = f.imag();
  }
  const CubicSpline sre(lattice, re, SplineBoundary::not_a_knot);
  const CubicSpline sim(lattice, im, SplineBoundary::not_a_knot);
  std::vector<std::complex<double>> out(omega.count);
  for (std::size_t i = 0; i < omega.count; ++i) {
    const double w = omega.at(i);
    const double pos = w / d;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) < 1e-9 && std::abs(nearest) <= static_cast<double>(n - 1)) {
      const auto idx = static_cast<std::size_t>(nearest + static_cast<double>(n - 1));
      out[i] = {re[idx], im[idx]};
    } else if (w < lattice.front() || w > lattice.back()) {
      out[i] = {0.0, 0.0};
    } else {
      out[i] = {sre(w), sim(w)};
    }
  }
  return out;
}

}  // namespace

double angular_bandwidth(double width_nm, double center_nm) {
  check_positive(width_nm, "filter width");
  check_positive(center_nm, "centre wavelength");
  return 2.0 * kPi * kSpeedOfLightNmPerFs * width_nm / (center_nm * center_nm);
}

double angular_frequency(double wavelength_nm) {
  check_positive(wavelength_nm, "wavelength");
  return 2.0 * kPi * kSpeedOfLightNmPerFs / wavelength_nm;
}

double stage_delay_fs(double displacement_um) {
  return 2.0 * displacement_um * 1000.0 / kSpeedOfLightNmPerFs;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

std::complex<double> SinglePhotonAmplitude::operator()(double omega) const {
  const double d = (omega - center_rad_fs) / width_rad_fs;
  const double mag = shape == AmplitudeShape::gaussian
                         ? std::exp(-0.25 * d * d)
                         : std::exp(-0.5 * std::pow(std::abs(d), order));
  if (delay_fs == 0.0) return {mag, 0.0};
  return std::polar(mag, omega * delay_fs);
}

double SinglePhotonAmplitude::reach() const {
  if (shape == AmplitudeShape::gaussian) return width_rad_fs * std::sqrt(4.0 * kDecayExponent);
  return width_rad_fs * std::pow(2.0 * kDecayExponent, 1.0 / order);
}

void SinglePhotonAmplitude::validate() const {
  check_positive(width_rad_fs, "amplitude width");
  if (!std::isfinite(center_rad_fs) || !std::isfinite(delay_fs)) {
    throw ValidationError("amplitude centre and delay must be finite");
  }
  if (shape == AmplitudeShape::super_gaussian) check_even_order(order, "super-Gaussian order");
}

double NumericGrid::norm() const {
  double s = 0.0;
  for (const auto& z : samples) s += std::norm(z);
  return s * omega1.step * omega2.step;
}

void NumericGrid::validate() const {
  if (omega1.count < 4 || omega2.count < 4) throw ValidationError("JSA grid needs at least 4x4 samples");
  check_positive(omega1.step, "JSA grid step");
  check_positive(omega2.step, "JSA grid step");
  if (samples.size() != omega1.count * omega2.count) {
    throw ValidationError("JSA sample count does not match the grid dimensions");
  }
  if (omega1.count != omega2.count || std::abs(omega1.step - omega2.step) > 1e-12 * omega1.step ||
      std::abs(omega1.start - omega2.start) > 1e-9 * omega1.step) {
    throw ValidationError("JSA grid must use identical w1 and w2 axes");
  }
  for (const auto& z : samples) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ValidationError("JSA samples must be finite");
    }
  }
  const double n = norm();
  if (std::abs(n - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "JSA grid is not normalized: sum |Phi|^2 dw1 dw2 = " << n;
    throw ValidationError(msg.str());
  }
}

NumericGrid NumericGrid::sample(const std::function<std::complex<double>(double, double)>& jsa,
                                const UniformGrid& axis) {
  NumericGrid g{axis, axis, std::vector<std::complex<double>>(axis.count * axis.count)};
  for (std::size_t i = 0; i < axis.count; ++i) {
    for (std::size_t j = 0; j < axis.count; ++j) g.samples[i * axis.count + j] = jsa(axis.at(i), axis.at(j));
  }
  const double n = g.norm();
  if (!(n > 0.0)) throw ValidationError("JSA has zero norm on the sampling grid");
  const double scale = 1.0 / std::sqrt(n);
  for (auto& z : g.samples) z *= scale;
  return g;
}

void validate(const SpectralModel& model) {
  std::visit(Overloaded{
                 [](const SeparableProduct& m) {
                   m.signal.validate();
                   m.idler.validate();
                 },
                 [](const CWFiltered& m) {
                   check_positive(m.filter_width_rad_fs, "filter width");
                   check_even_order(m.filter_order, "filter order");
                 },
                 [](const ApproxSincGauss& m) {
                   check_positive(m.sigma_fs, "sigma");
                   if (!(m.bandwidth_b >= 0.0) || !std::isfinite(m.bandwidth_b)) {
                     throw ValidationError("B must be finite and non-negative");
                   }
                 },
                 [](const NumericGrid& m) { m.validate(); },
             },
             model);
}

std::string model_name(const SpectralModel& model) {
  return std::visit(Overloaded{
                        [](const SeparableProduct&) { return std::string("separable_product"); },
                        [](const CWFiltered&) { return std::string("cw_filtered"); },
                        [](const ApproxSincGauss&) { return std::string("approx_sinc_gauss"); },
                        [](const NumericGrid&) { return std::string("numeric_grid"); },
                    },
                    model);
}

double SpectralFunction::hermitian_defect() const {
  const double scale = max_abs(values);
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    d = std::max(d, std::abs(values[values.size() - 1 - i] - std::conj(values[i])));
  }
  return d / scale;
}

TimeProfile::TimeProfile(UniformGrid tau, std::vector<double> values)
    : tau_(tau),
      values_(std::move(values)),
      interp_(tau_.points(), values_, SplineBoundary::not_a_knot) {}

double TimeProfile::operator()(double t) const {
  if (t < tau_.start || t > tau_.back()) return 0.0;
  return interp_(t);
}

double TimeProfile::edge_level() const {
  double peak = 0.0;
  for (double v : values_) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  const std::size_t edge = std::max<std::size_t>(1, values_.size() / 20);
  double e = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    e = std::max({e, std::abs(values_[i]), std::abs(values_[values_.size() - 1 - i])});
  }
  return e / peak;
}

double TimeProfile::negativity() const {
  const double p = peak();
  if (p == 0.0) return 0.0;
  const double lowest = *std::min_element(values_.begin(), values_.end());
  return std::max(0.0, -lowest) / p;
}

SpectralFunction marginal_symmetrised(const SpectralModel& model, const UniformGrid& omega) {
  validate(model);
  if (omega.count < 3 || !(omega.step > 0.0) || !omega.symmetric_about_zero()) {
    throw ValidationError("w grid must be uniform, increasing and symmetric about 0");
  }
  SpectralFunction f;
  f.omega = omega;
  f.values = std::visit(
      Overloaded{
          [&](const SeparableProduct& m) { return separable_values(m, omega); },
          [&](const CWFiltered& m) {
            std::vector<std::complex<double>> v(omega.count);
            for (std::size_t i = 0; i < omega.count; ++i) {
              const double x = 0.5 * omega.at(i) / m.filter_width_rad_fs;
              v[i] = std::exp(-2.0 * std::pow(std::abs(x), m.filter_order));
            }
            return v;
          },
          [&](const ApproxSincGauss& m) {
            std::vector<std::complex<double>> v(omega.count);
            for (std::size_t i = 0; i < omega.count; ++i) {
              v[i] = approx_spectrum(m.sigma_fs, m.bandwidth_b, omega.at(i));
            }
            return v;
          },
          [&](const NumericGrid& m) { return numeric_grid_values(m, omega); },
      },
      model);

  std::vector<double> re(f.values.size());
  std::transform(f.values.begin(), f.values.end(), re.begin(), [](auto z) { return z.real(); });
  f.raw_integral = trapezoid(re, omega.step);
  if (!(f.raw_integral > 0.0)) {
    throw NumericError("marginal wavefunction integrates to a non-positive value; cannot normalize");
  }
  const double scale = max_abs(f.values);
  double imag = 0.0;
  for (auto& z : f.values) {
    z /= f.raw_integral;
    imag = std::max(imag, std::abs(z.imag()));
  }
  f.real_valued = imag <= 1e-12 * scale / f.raw_integral;
  if (f.hermitian_defect() > 1e-9) {
    throw NumericError("marginal wavefunction violates Hermitian symmetry f(-w) = conj f(w)");
  }
  return f;
}

UniformGrid default_omega_grid(const SpectralModel& model) {
  constexpr std::size_t kPoints = 2049;
  return std::visit(
      Overloaded{
          [&](const SeparableProduct& m) {
            const auto [lo, hi] = separable_support(m);
            const double span = hi > lo ? hi - lo : std::min(m.signal.width_rad_fs, m.idler.width_rad_fs);
            return UniformGrid::symmetric(span, kPoints);
          },
          [&](const CWFiltered& m) { return UniformGrid::symmetric(10.0 * m.filter_width_rad_fs, kPoints); },
          [&](const ApproxSincGauss& m) {
            const double a = kPi * m.bandwidth_b / m.sigma_fs;
            return UniformGrid::symmetric(a + 12.0 / m.sigma_fs, kPoints);
          },
          [&](const NumericGrid& m) {
            const std::size_t n = m.omega1.count;
            return UniformGrid::symmetric(static_cast<double>(n - 1) * m.omega1.step, 2 * n - 1);
          },
      },
      model);
}

TimeProfile time_profile(const SpectralFunction& f, const UniformGrid& tau) {
  if (tau.count < 4 || !(tau.step > 0.0)) throw ValidationError("tau grid must be uniform with >= 4 points");
  if (f.hermitian_defect() > 1e-9) throw ValidationError("time_profile requires a Hermitian f(w)");
  const double alias = kPi / f.omega.step;
  const double reach = std::max(std::abs(tau.start), std::abs(tau.back()));
  if (reach >= alias) {
    std::ostringstream msg;
    msg << "w grid step " << f.omega.step << " rad/fs aliases delays beyond " << alias
        << " fs; requested |tau| up to " << reach;
    throw ValidationError(msg.str());
  }
  const std::size_t nw = f.values.size();
  std::vector<double> out(tau.count);
  double peak = 0.0;
  double residue = 0.0;
  constexpr std::size_t kReanchor = 256;
  for (std::size_t k = 0; k < tau.count; ++k) {
    const double t = tau.at(k);
    const std::complex<double> rot = std::polar(1.0, f.omega.step * t);
    std::complex<double> phase;
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t i = 0; i < nw; ++i) {
      if (i % kReanchor == 0) phase = std::polar(1.0, f.omega.at(i) * t);
      const double w = (i == 0 || i + 1 == nw) ? 0.5 : 1.0;
      sum += w * phase * f.values[i];
      phase *= rot;
    }
    sum *= f.omega.step;
    out[k] = sum.real();
    peak = std::max(peak, std::abs(sum.real()));
    residue = std::max(residue, std::abs(sum.imag()));
  }
  if (residue > 1e-9 * std::max(peak, 1e-300) && peak > 0.0) {
    throw NumericError("time profile has a non-negligible imaginary residue");
  }
  return TimeProfile(tau, std::move(out));
}

UniformGrid default_tau_grid(const SpectralFunction& f) {
  double m0 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double a = std::abs(f.values[i]);
    const double w = f.omega.at(i);
    m0 += a;
    m2 += a * w * w;
  }
  const double rms = m0 > 0.0 && m2 > 0.0 ? std::sqrt(m2 / m0) : f.omega.step;
  const double alias = 0.95 * kPi / f.omega.step;
  double half = std::min(8.0 / rms, alias);
  constexpr std::size_t kPoints = 2049;
  for (;;) {
    const auto grid = UniformGrid::symmetric(half, kPoints);
    if (half >= alias) return grid;
    const auto prof = time_profile(f, grid);
    if (prof.edge_level() < 1e-8) return grid;
    half = std::min(half * 1.5, alias);
  }
}

double approx_profile(double sigma, double b, double tau) {
  const double x = tau / sigma;
  return std::exp(-0.5 * x * x) * sinc(kPi * b * x);
}

double approx_spectrum(double sigma, double b, double omega) {
  const double w = std::abs(omega);
  if (b < 1e-9) {
    return sigma / std::sqrt(2.0 * kPi) * std::exp(-0.5 * sigma * sigma * w * w);
  }
  // Gaussian-smoothed box of half-width a = pi B / sigma.
  const double a = kPi * b / sigma;
  const double r = sigma / std::numbers::sqrt2;
  return (std::erfc(r * (w - a)) - std::erfc(r * (w + a))) / (4.0 * a);
}

ProfileFn make_profile(const SpectralModel& model) {
  validate(model);
  if (const auto* approx = std::get_if<ApproxSincGauss>(&model)) {
    return [sigma = approx->sigma_fs, b = approx->bandwidth_b](double t) {
      return approx_profile(sigma, b, t);
    };
  }
  const auto f = marginal_symmetrised(model, default_omega_grid(model));
  auto prof = std::make_shared<const TimeProfile>(time_profile(f, default_tau_grid(f)));
  const double peak = prof->peak();
  return [prof, peak](double t) { return (*prof)(t) / peak; };
}

CWFiltered default_filters() {
  return CWFiltered{angular_bandwidth(7.3, 810.0), 4};
}

}  // namespace hom
