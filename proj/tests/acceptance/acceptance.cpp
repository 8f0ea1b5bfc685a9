// Acceptance suite: one PASS/FAIL line per criterion.
//
// The exit status counts failures that are not listed in kKnownFailures.
// Known failures still print FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hom/delay_metrology.hpp"
#include "hom/error.hpp"
#include "hom/file_util.hpp"
#include "hom/profile_fit.hpp"
#include "hom/uncertainty.hpp"

namespace fs = std::filesystem;
using namespace hom;

namespace {

const std::set<int> kKnownFailures{6, 8};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

// ---------------------------------------------------------------- 1

Outcome visibility_anchor() {
  bool ok = visibility(BeamSplitter(0.5)) == 1.0;
  const double v23 = visibility(BeamSplitter(2.0 / 3.0));
  ok = ok && std::abs(v23 - 0.8) <= 1e-15;
  const auto p = reference_preset();
  try {
    check_visibility(p.visibility);
    const auto scan = sample_scan(p.config, make_profile(p.model), p.visibility, 1);
    ok = ok && p.visibility == 0.81 && scan.size() == 201;
  } catch (const Error&) {
    ok = false;
  }
  return {ok, "v(1/2)=" + num(visibility(BeamSplitter(0.5)), 17) + ", |v(2/3)-0.8|=" + num(std::abs(v23 - 0.8), 3) +
                  ", preset v=0.81 accepted"};
}

// ---------------------------------------------------------------- 2

Outcome parseval_suite() {
  double worst_theta = 0.0;
  double worst_kernel = 0.0;
  const std::vector<SpectralModel> models{reference_preset().model, default_filters()};
  for (const auto& model : models) {
    const auto spectrum = marginal_symmetrised(model, default_omega_grid(model));
    const auto profile = make_profile(model);
    for (int n : {0, 2, 4}) {
      for (double xi : {10.0, 40.0, 160.0}) {
        const HGSpec hg(n, xi);
        const double a = frequency_domain_theta(spectrum, hg);
        const double b = time_domain_theta(profile, hg, 4000.0);
        worst_theta = std::max(worst_theta, std::abs(a - b) / std::abs(a));
      }
    }
  }
  for (int n : {0, 1, 2, 3, 4}) {
    for (double xi : {10.0, 40.0, 160.0}) {
      const HGSpec hg(n, xi);
      for (double tau : {0.0, 0.5 * xi, 2.0 * xi, 5.0 * xi}) {
        const auto integrand = [&](double w) {
          return (std::exp(std::complex<double>(0.0, w * tau)) * hg_function(hg, w)).real() +
                 (std::exp(std::complex<double>(0.0, w * tau)) * hg_function(hg, w)).imag();
        };
        const double lim = 12.0 / xi;
        const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -lim, lim, 12, 1e-14);
        // the exact transform is i^n times the real kernel; fold the phase into re + im
        const auto phase = hg_kernel_phase(n);
        const double exact = hg_time_kernel(hg, tau) * (phase.real() + phase.imag());
        const double scale = std::sqrt(std::numbers::pi) / xi;
        worst_kernel = std::max(worst_kernel, std::abs(q - exact) / scale);
      }
    }
  }
  return {worst_theta <= 1e-6 && worst_kernel <= 1e-8,
          "max rel diff omega vs tau " + num(worst_theta, 3) + ", kernel vs quadrature " + num(worst_kernel, 3)};
}

// ---------------------------------------------------------------- 3

Outcome estimator_exactness() {
  const auto p = reference_preset();
  const auto f = make_profile(p.model);
  const auto d = p.config.delays();
  const auto mean = expected_profile(p.config, f, p.visibility);
  bool ok = true;
  std::string detail;
  for (auto [n, xi] : {std::pair{0, 40.0}, std::pair{4, 30.0}}) {
    const auto spec = ParameterSpec::hermite_gauss(HGSpec(n, xi), p.config.delay_step_fs, p.config.baseline_counts);
    const auto est = build_estimator(d, spec, EstimatorMethod::discrete);
    const double target = est.apply(mean);
    const double formula = variance_discrete(d, mean, spec);
    const std::size_t reps = 100000;
    long double s1 = 0.0L, s2 = 0.0L, s1_first = 0.0L;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto scan = sample_scan(p.config, f, p.visibility, 1000000 + r, BaselineMode::nominal);
      const double x = estimate_discrete(scan, spec);
      s1 += x;
      s2 += static_cast<long double>(x) * x;
      if (r + 1 == 10000) s1_first = s1;
    }
    const double m4 = static_cast<double>(s1_first / 10000);
    const double z = (m4 - target) / std::sqrt(formula / 10000);
    const double m = static_cast<double>(s1 / reps);
    const double var = static_cast<double>((s2 - reps * static_cast<long double>(m) * m) / (reps - 1));
    const double ratio = var / formula;
    ok = ok && std::abs(z) < 3.0 && std::abs(ratio - 1.0) <= 0.03;
    detail += "(n=" + std::to_string(n) + ", xi=" + num(xi) + "): bias z=" + num(z, 3) + " over 1e4, var ratio " +
              num(ratio, 5) + " over 1e5; ";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 4

Outcome crb_limit() {
  const auto p = reference_preset();
  const auto f = make_profile(p.model);
  const auto spec = ParameterSpec::hermite_gauss(HGSpec(0, 40.0), 13.4, 4653.0);
  const ProfileFn mean = [&](double t) { return 4653.0 * (1.0 - 0.81 * f(t)); };
  const double crb = crb_continuous(mean, spec, 1340.0);
  ScanConfig fine = p.config;
  fine.delay_step_fs = 13.4 / 16;
  fine.baseline_counts = 4653.0 / 16;
  const auto c = expected_profile(fine, f, p.visibility);
  const auto fine_spec = ParameterSpec::hermite_gauss(HGSpec(0, 40.0), fine.delay_step_fs, fine.baseline_counts);
  const double var = variance_discrete(fine.delays(), c, fine_spec);
  const double coarse = variance_discrete(p.config.delays(), expected_profile(p.config, f, p.visibility), spec);
  const double rel = std::abs(var / crb - 1.0);
  return {rel <= 1e-3, "refined/CRB - 1 = " + num(var / crb - 1.0, 3) + " (unrefined " + num(coarse / crb - 1.0, 3) + ")"};
}

// ---------------------------------------------------------------- 5

Outcome witness_soundness_completeness() {
  const auto preset = reference_preset();
  const auto xs = xi_grid(10.0, 180.0, 20);
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> width(0.008, 0.03);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double center = angular_frequency(810.0);
  int false_flags = 0;
  int sound_checks = 0;
  double most_negative = std::numeric_limits<double>::infinity();
  for (int fixture = 0; fixture < 20; ++fixture) {
    SinglePhotonAmplitude s, i;
    s.shape = unit(gen) < 0.5 ? AmplitudeShape::gaussian : AmplitudeShape::super_gaussian;
    i.shape = unit(gen) < 0.5 ? AmplitudeShape::gaussian : AmplitudeShape::super_gaussian;
    s.order = unit(gen) < 0.5 ? 4 : 6;
    i.order = unit(gen) < 0.5 ? 4 : 6;
    s.width_rad_fs = width(gen);
    i.width_rad_fs = width(gen);
    s.center_rad_fs = center;
    i.center_rad_fs = center + 0.3 * (unit(gen) - 0.5) * std::min(s.width_rad_fs, i.width_rad_fs);
    const SpectralModel model = SeparableProduct{s, i};
    const auto profile = make_profile(model);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto scan = sample_scan(preset.config, profile, preset.visibility, 100 * fixture + seed);
      for (int n : {0, 2, 4}) {
        WitnessOptions o;
        o.seed = seed;
        const auto rep = witness_scan(scan, n, xs, preset.visibility, o);
        ++sound_checks;
        if (rep.witnessed) ++false_flags;
        for (std::size_t k = 0; k < rep.r.size(); ++k) {
          if (rep.reliable[k]) most_negative = std::min(most_negative, rep.r[k]);
        }
      }
    }
  }
  // completeness on the preset scan (default seed 1) across the plausible B range
  int complete = 0;
  std::string comp;
  auto min_reliable_r = [](const WitnessReport& rep) {
    double rmin = 0.0;
    for (std::size_t k = 0; k < rep.r.size(); ++k) {
      if (rep.reliable[k]) rmin = std::min(rmin, rep.r[k]);
    }
    return rmin;
  };
  for (double b : {1.0, 1.125, 1.25}) {
    const auto scan = sample_scan(preset.config, make_profile(ApproxSincGauss{110.3, b}), preset.visibility, 1);
    const auto rep = witness_scan(scan, 4, xs, preset.visibility, WitnessOptions{});
    if (rep.witnessed) ++complete;
    comp += "B=" + num(b) + " min R4 " + num(min_reliable_r(rep), 3) + "; ";
  }
  // informational: the same verdict on other seeds of the shipped preset
  int stable = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto scan = sample_scan(preset.config, make_profile(preset.model), preset.visibility, seed);
    WitnessOptions o;
    o.seed = seed;
    stable += witness_scan(scan, 4, xs, preset.visibility, o).witnessed;
  }
  const bool ok = false_flags == 0 && complete == 3;
  return {ok, "separable: " + std::to_string(false_flags) + " flagged of " + std::to_string(sound_checks) +
                  " sweeps (lowest reliable R " + num(most_negative, 3) + "); preset seed 1: " +
                  std::to_string(complete) + "/3 B values witnessed; " + comp + "preset witnessed on " +
                  std::to_string(stable) + "/5 seeds (informational)"};
}

// ---------------------------------------------------------------- 6

Outcome bias_phenomenology() {
  const auto p = reference_preset();
  const auto f = make_profile(p.model);
  const auto scan = sample_scan(p.config, f, p.visibility, 1);
  BiasProbeOptions opt;
  opt.replicates = 1000;
  opt.seed = 1;
  opt.crb_reference = [&](double t) { return expected_counts(4653.0, 0.81, f, 0.0, t); };
  const std::vector<int> factors{1, 2, 4, 8};
  const auto xs = xi_grid(5.0, 180.0, 24);
  const double tol = 1.0 - 3.0 / std::sqrt(1000.0);
  int interp_below = 0, interp_above = 0, discrete_above = 0;
  double worst_discrete = std::numeric_limits<double>::infinity();
  // noise-free counterpart: variance formula at the observed counts over the CRB
  double formula_discrete = std::numeric_limits<double>::infinity();
  double formula_interp_above = std::numeric_limits<double>::infinity();
  double formula_interp_below = std::numeric_limits<double>::infinity();
  for (int n : {0, 2, 4}) {
    for (const auto& r : bias_probe(scan, n, factors, xs, opt)) {
      const bool below = r.xi_fs <= r.delay_step_fs / std::numbers::sqrt2;
      const double fr = r.crb > 0.0 ? r.formula_variance / r.crb : 1.0;
      if (r.method == EstimatorMethod::interpolated) {
        if (r.violation) (below ? interp_below : interp_above)++;
        double& slot = below ? formula_interp_below : formula_interp_above;
        slot = std::min(slot, fr);
      }
      if (r.method == EstimatorMethod::discrete && !below) {
        if (r.violation) ++discrete_above;
        if (r.crb > 0.0) worst_discrete = std::min(worst_discrete, r.bootstrap_variance / r.crb);
        formula_discrete = std::min(formula_discrete, fr);
      }
    }
  }
  const bool ok = interp_below > 0 && interp_above == 0 && discrete_above == 0;
  return {ok, "interpolated violations below/above threshold " + std::to_string(interp_below) + "/" +
                  std::to_string(interp_above) + ", discrete violations above threshold " +
                  std::to_string(discrete_above) + " (lowest bootstrap/CRB " + num(worst_discrete, 3) +
                  ", tolerance " + num(tol, 3) + "); formula/CRB minima: discrete above " +
                  num(formula_discrete, 3) + ", interpolated above " + num(formula_interp_above, 3) +
                  ", interpolated below " + num(formula_interp_below, 3)};
}

// ---------------------------------------------------------------- 7

Outcome fit_recovery() {
  const DipParameters truth{4653.0, 0.81, 60.0, 0.8, 5.0};
  ScanConfig cfg;
  cfg.dip_offset_fs = truth.tau0_fs;
  const auto d = cfg.delays();
  std::vector<double> clean;
  for (double t : d) clean.push_back(truth.counts(t));
  const auto fit = fit_profile(d, clean);
  const auto a = fit.params.as_array();
  const auto t = truth.as_array();
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(a[k] / t[k] - 1.0));
  worst = std::max(worst, std::abs(a[4] - t[4]) / t[4]);
  const ProfileFn profile = [&](double u) { return approx_profile(truth.sigma_fs, truth.b, u); };
  int covered = 0;
  std::array<int, 5> per{};
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    const auto scan = sample_scan(cfg, profile, truth.v, seed, BaselineMode::nominal);
    const auto f = fit_profile(scan);
    const auto e = f.params.as_array();
    bool all = f.status == FitStatus::converged;
    for (int k = 0; k < 5; ++k) {
      const bool in = std::abs(e[k] - t[k]) <= 3.0 * f.std_errors[k];
      per[k] += in;
      all = all && in;
    }
    covered += all;
  }
  const bool ok = worst <= 1e-6 && covered >= 475;
  std::string pp;
  for (int k = 0; k < 5; ++k) pp += std::to_string(per[k]) + (k < 4 ? "," : "");
  return {ok, "noiseless max rel err " + num(worst, 3) + "; joint 3SE coverage " + std::to_string(covered) +
                  "/500 (per parameter " + pp + ")"};
}

// ---------------------------------------------------------------- 8

Outcome delay_ordering() {
  const auto p = reference_preset();
  const auto f = make_profile(p.model);
  const double sigma = 110.3;
  const double offset = 0.05 * sigma;
  const double step = 0.5;
  const double xi_max = std::min(10 * sigma, 1340.0 / (2 * std::sqrt(std::log(1.0 / kTruncationLevel))));
  const auto xs = xi_grid(13.4 / 2, xi_max, 40);
  std::vector<double> mins;
  std::vector<double> mins_reliable;
  double worst_ratio = 0.0;
  for (int n : {0, 2, 4}) {
    std::vector<double> dh;
    for (double xi : xs) dh.push_back(analytic_delta_h(p.config, f, p.visibility, HGSpec(n, xi)));
    const auto s = delay_sensitivity(f, n, xs, dh, offset, step, 1340.0);
    mins.push_back(s.min_dtau0());
    double mr = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (s.defined[k] && xs[k] > reliability_threshold(13.4)) mr = std::min(mr, s.dtau0_fs[k]);
    }
    mins_reliable.push_back(mr);
    for (double xi : {20.0, 40.0, 80.0}) {
      const ShiftedParameter h(f, HGSpec(n, xi), 1340.0, offset);
      worst_ratio = std::max(worst_ratio, std::abs(richardson_ratio(h, offset, 2.0) - 4.0));
    }
  }
  const bool ordered = mins[1] <= mins[0] && mins[2] <= mins[1];
  const bool ok = ordered && worst_ratio <= 0.1;
  return {ok, "min dtau0 (fs) h0 " + num(mins[0]) + ", h2 " + num(mins[1]) + ", h4 " + num(mins[2]) +
                  " (reliable xi only: " + num(mins_reliable[0]) + ", " + num(mins_reliable[1]) + ", " +
                  num(mins_reliable[2]) + "); max |Richardson - 4| " + num(worst_ratio, 3)};
}

// ---------------------------------------------------------------- 9

int run_script(const fs::path& dir) {
  const std::string cmd = "HOM=\"" HOM_CLI_PATH "\" sh \"" HOM_REPRO_SCRIPT "\" \"" + dir.string() + "\" >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end_determinism() {
  const auto base = fs::temp_directory_path() / "hom_acceptance_repro";
  fs::remove_all(base);
  const auto a = base / "a";
  const auto b = base / "b";
  const int ca = run_script(a);
  const int cb = run_script(b);
  if (ca != 0 || cb != 0) return {false, "script exit codes " + std::to_string(ca) + ", " + std::to_string(cb)};
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  int differ = 0;
  for (const auto& n : names) {
    if (!fs::exists(b / n) || read_text_file(a / n) != read_text_file(b / n)) ++differ;
  }
  int count_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count_b;
  const bool ok = differ == 0 && !names.empty() && count_b == static_cast<int>(names.size());
  fs::remove_all(base);
  return {ok, std::to_string(names.size()) + " files, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "visibility anchor", visibility_anchor},
      {2, "Fourier/Parseval suite", parseval_suite},
      {3, "estimator exactness", estimator_exactness},
      {4, "CRB continuum limit", crb_limit},
      {5, "witness soundness and completeness", witness_soundness_completeness},
      {6, "bias phenomenology", bias_phenomenology},
      {7, "fit recovery", fit_recovery},
      {8, "delay-metrology ordering", delay_ordering},
      {9, "end-to-end determinism", end_to_end_determinism},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = kKnownFailures.count(c.id) > 0;
    std::string verdict = o.pass ? "PASS" : (known ? "FAIL (known, see decisions ledger)" : "FAIL");
    if (!o.pass && !known) ++unexpected;
    std::cout << "criterion " << c.id << " " << verdict << ": " << c.name << "; " << o.detail << " [" << num(secs, 3)
              << " s]" << std::endl;
  }
  return unexpected;
}
