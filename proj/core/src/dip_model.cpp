#include "hom/dip_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hom/error.hpp"
#include "hom/random.hpp"

#ifndef HOM_VERSION
#define HOM_VERSION "0.0.0"
#endif

namespace hom {

const char* version() { return HOM_VERSION; }

BeamSplitter::BeamSplitter(double reflectivity) : r_(reflectivity) {
  if (!(reflectivity > 0.0 && reflectivity < 1.0)) {
    throw ValidationError("reflectivity must lie in (0, 1)");
  }
}

double visibility(const BeamSplitter& bs) {
  const double r = bs.reflectivity();
  const double t = bs.transmissivity();
  return 2.0 * r * t / (r * r + t * t);
}

void check_visibility(double v, const char* field) {
  if (!(v > 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << field << " must lie in (0, 1], got " << v;
    throw ValidationError(msg.str());
  }
}

void ScanConfig::validate() const {
  if (!(delay_step_fs > 0.0) || !std::isfinite(delay_step_fs)) {
    throw ValidationError("delay_step_fs must be positive");
  }
  if (!(half_range_fs > 0.0) || !std::isfinite(half_range_fs)) {
    throw ValidationError("half_range_fs must be positive");
  }
  if (!(baseline_counts > 0.0) || !std::isfinite(baseline_counts)) {
    throw ValidationError("baseline_counts must be positive");
  }
  if (!(integration_window_s > 0.0)) throw ValidationError("integration_window_s must be positive");
  if (!std::isfinite(dip_offset_fs)) throw ValidationError("dip_offset_fs must be finite");
  const double ratio = half_range_fs / delay_step_fs;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || ratio < 1.5) {
    throw ValidationError("delay_step_fs must divide half_range_fs into at least two steps");
  }
}

std::size_t ScanConfig::points() const {
  return 2 * static_cast<std::size_t>(std::llround(half_range_fs / delay_step_fs)) + 1;
}

std::vector<double> ScanConfig::delays() const {
  const auto half = static_cast<long>(std::llround(half_range_fs / delay_step_fs));
  std::vector<double> out;
  out.reserve(points());
  for (long i = -half; i <= half; ++i) out.push_back(static_cast<double>(i) * delay_step_fs);
  return out;
}

void CoincidenceScan::validate() const {
  if (delays_fs.size() != counts.size()) throw ValidationError("scan delays and counts differ in length");
  if (delays_fs.size() < 2) throw ValidationError("scan needs at least two points");
  if (!(delay_step_fs > 0.0)) throw ValidationError("scan delay step must be positive");
  for (std::size_t i = 1; i < delays_fs.size(); ++i) {
    const double d = delays_fs[i] - delays_fs[i - 1];
    if (!(d > 0.0)) throw ValidationError("scan delays must be strictly increasing");
    if (std::abs(d - delay_step_fs) > 1e-6 * delay_step_fs) {
      std::ostringstream msg;
      msg << "scan grid is not uniform with step " << delay_step_fs << " fs (spacing " << d
          << " fs at point " << i << ")";
      throw ValidationError(msg.str());
    }
  }
  for (auto c : counts) {
    if (c < 0) throw ValidationError("counts must be non-negative");
  }
  if (!(baseline > 0.0) || !std::isfinite(baseline)) {
    throw ValidationError("scan baseline (C0 estimate) must be positive");
  }
}

std::vector<double> CoincidenceScan::counts_as_double() const {
  return {counts.begin(), counts.end()};
}

std::size_t CoincidenceScan::center_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < delays_fs.size(); ++i) {
    if (std::abs(delays_fs[i]) < std::abs(delays_fs[best])) best = i;
  }
  return best;
}

double expected_counts(double baseline, double v, const ProfileFn& profile, double tau0, double tau) {
  return baseline * (1.0 - v * profile(tau - tau0));
}

std::vector<double> expected_profile(const ScanConfig& config, const ProfileFn& profile, double v) {
  config.validate();
  check_visibility(v);
  const auto delays = config.delays();
  std::vector<double> out(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i) {
    out[i] = expected_counts(config.baseline_counts, v, profile, config.dip_offset_fs, delays[i]);
  }
  return out;
}

double tail_average(std::span<const double> counts) {
  if (counts.empty()) throw ValidationError("tail average of an empty scan");
  const std::size_t k = std::max<std::size_t>(1, counts.size() / 10);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += counts[i] + counts[counts.size() - 1 - i];
  return sum / static_cast<double>(2 * k);
}

CoincidenceScan sample_scan(const ScanConfig& config, const ProfileFn& profile, double v,
                            std::uint64_t seed, BaselineMode baseline, std::string source) {
  const auto mean = expected_profile(config, profile, v);
  CoincidenceScan scan;
  scan.delays_fs = config.delays();
  scan.delay_step_fs = config.delay_step_fs;
  scan.counts.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (mean[i] < 0.0) throw ValidationError("expected counts are negative; check visibility and profile");
    CounterRng rng(seed, i);
    scan.counts[i] = sample_poisson(rng, mean[i]);
  }
  if (baseline == BaselineMode::nominal) {
    scan.baseline = config.baseline_counts;
  } else {
    const auto c = scan.counts_as_double();
    scan.baseline = tail_average(c);
    if (!(scan.baseline > 0.0)) scan.baseline = config.baseline_counts;
  }
  scan.provenance = Provenance{"simulated", seed, std::move(source), std::string(kRngAlgorithm)};
  return scan;
}

CoincidenceScan decimate(const CoincidenceScan& scan, int factor) {
  if (factor < 1) throw ValidationError("decimation factor must be >= 1");
  CoincidenceScan out;
  out.baseline = scan.baseline;
  out.provenance = scan.provenance;
  out.delay_step_fs = scan.delay_step_fs * factor;
  const auto c = static_cast<long>(scan.center_index());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if ((static_cast<long>(i) - c) % factor == 0) {
      out.delays_fs.push_back(scan.delays_fs[i]);
      out.counts.push_back(scan.counts[i]);
    }
  }
  if (out.size() < 4) {
    throw ValidationError("decimation by " + std::to_string(factor) + " leaves fewer than 4 points");
  }
  return out;
}

CoincidenceScan recenter(const CoincidenceScan& scan, double tau0) {
  CoincidenceScan out = scan;
  for (auto& d : out.delays_fs) d -= tau0;
  return out;
}

ScanPreset reference_preset() {
  ScanPreset p;
  p.config = ScanConfig{13.4, 1340.0, 4653.0, 5.0, 0.0};
  p.visibility = 0.81;
  p.model = ApproxSincGauss{110.3, 1.125};
  return p;
}

ScanPreset separable_preset() {
  ScanPreset p = reference_preset();
  const double center = angular_frequency(810.0);
  const SinglePhotonAmplitude photon{AmplitudeShape::gaussian, center, 0.012, 2, 0.0};
  p.model = SeparableProduct{photon, photon};
  return p;
}

}  // namespace hom
