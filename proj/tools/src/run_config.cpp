#include "run_config.hpp"

#include <cstdlib>

#include "hom/error.hpp"
#include "hom/file_util.hpp"
#include "hom/jsa_io.hpp"

namespace homcli {

json default_config() {
  return json{
      {"format_version", "v1"},
      {"model", "approx"},
      {"sigma_fs", 110.3},
      {"bandwidth_b", 1.125},
      {"filter_width_nm", 7.3},
      {"filter_center_nm", 810.0},
      {"filter_order", 4},
      {"photon_center_nm", 810.0},
      {"photon_width_rad_fs", 0.012},
      {"idler_width_rad_fs", nullptr},
      {"jsa_file", ""},
      {"delay_step_fs", 13.4},
      {"half_range_fs", 1340.0},
      {"baseline_counts", 4653.0},
      {"visibility", 0.81},
      {"dip_offset_fs", 0.0},
      {"integration_window_s", 5.0},
      {"input", ""},
      {"stage_positions", false},
      {"output_dir", ""},
      {"scan_name", "scan"},
      {"method", "interpolated"},
      {"orders", json::array({0, 2, 4})},
      {"xi_min", nullptr},
      {"xi_max", nullptr},
      {"xi_steps", 40},
      {"boundary", "natural"},
      {"replicates", 1000},
      {"seed", 1},
      {"threshold", 3.0},
      {"bootstrap_baseline", "tail_average"},
      {"factors", json::array({1, 2, 4, 8, 16})},
      {"crb_reference", "fit"},
      {"working_offset_fs", nullptr},
      {"difference_step_fs", 0.5},
      {"delta_h_source", "analytic"},
      {"weighted", true},
      {"figure", 0},
  };
}

namespace {

bool compatible(const json& def, const json& val) {
  if (val.is_null()) return def.is_null() || def.is_number();
  if (def.is_null() || def.is_number_float()) return val.is_number();
  if (def.is_number_integer()) return val.is_number_integer();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) {
    if (!val.is_array()) return false;
    for (const auto& e : val) {
      if (!e.is_number_integer()) return false;
    }
    return true;
  }
  return false;
}

}  // namespace

void merge_config(json& base, const json& overrides, const std::string& origin) {
  if (!overrides.is_object()) throw hom::ValidationError(origin + ": configuration must be a JSON object");
  const auto defaults = default_config();
  for (const auto& [key, val] : overrides.items()) {
    if (!defaults.contains(key)) throw hom::ValidationError(origin + ": unknown configuration key '" + key + "'");
    if (!compatible(defaults.at(key), val)) {
      throw hom::ValidationError(origin + ": configuration key '" + key + "' has the wrong type");
    }
    base[key] = val;
  }
}

json load_config_file(const std::filesystem::path& path) {
  const auto text = hom::read_text_file(path);
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw hom::IoError(path.string() + ": not valid JSON");
  return j;
}

void validate_config(const json& cfg) {
  if (cfg.at("format_version") != "v1") throw hom::ValidationError("format_version must be \"v1\"");
  hom::check_visibility(cfg.at("visibility").get<double>(), "visibility");
  scan_from_config(cfg).validate();
  const auto method = cfg.at("method").get<std::string>();
  hom::parse_method(method);
  boundary_from_config(cfg);
  for (const auto& o : cfg.at("orders")) {
    const int n = o.get<int>();
    if (n < 0 || n > hom::kMaxHermiteOrder) throw hom::ValidationError("orders must lie in [0, 20]");
  }
  if (cfg.at("orders").empty()) throw hom::ValidationError("orders must not be empty");
  if (cfg.at("xi_steps").get<long>() < 1) throw hom::ValidationError("xi_steps must be at least 1");
  for (const char* k : {"xi_min", "xi_max"}) {
    if (!cfg.at(k).is_null() && !(cfg.at(k).get<double>() > 0.0)) {
      throw hom::ValidationError(std::string(k) + " must be positive");
    }
  }
  if (cfg.at("replicates").get<long>() < 2) throw hom::ValidationError("replicates must be at least 2");
  if (cfg.at("seed").get<long long>() < 0) throw hom::ValidationError("seed must be non-negative");
  if (!(cfg.at("threshold").get<double>() > 0.0)) throw hom::ValidationError("threshold must be positive");
  replicate_baseline_from_config(cfg);
  for (const auto& f : cfg.at("factors")) {
    if (f.get<int>() < 1) throw hom::ValidationError("factors must be >= 1");
  }
  const auto ref = cfg.at("crb_reference").get<std::string>();
  if (ref != "fit" && ref != "model") throw hom::ValidationError("crb_reference must be \"fit\" or \"model\"");
  const auto src = cfg.at("delta_h_source").get<std::string>();
  if (src != "analytic" && src != "bootstrap") {
    throw hom::ValidationError("delta_h_source must be \"analytic\" or \"bootstrap\"");
  }
  if (!(cfg.at("difference_step_fs").get<double>() >= 1e-6)) {
    throw hom::ValidationError("difference_step_fs must be at least 1e-6 fs");
  }
  const auto name = cfg.at("scan_name").get<std::string>();
  if (name.empty() || name.find('/') != std::string::npos) throw hom::ValidationError("scan_name must be a plain file stem");
}

hom::SpectralModel model_from_config(const json& cfg) {
  const auto kind = cfg.at("model").get<std::string>();
  hom::SpectralModel m;
  if (kind == "approx") {
    m = hom::ApproxSincGauss{cfg.at("sigma_fs").get<double>(), cfg.at("bandwidth_b").get<double>()};
  } else if (kind == "cw") {
    m = hom::CWFiltered{hom::angular_bandwidth(cfg.at("filter_width_nm").get<double>(),
                                               cfg.at("filter_center_nm").get<double>()),
                        cfg.at("filter_order").get<int>()};
  } else if (kind == "separable") {
    const double center = hom::angular_frequency(cfg.at("photon_center_nm").get<double>());
    const double ws = cfg.at("photon_width_rad_fs").get<double>();
    const double wi = cfg.at("idler_width_rad_fs").is_null() ? ws : cfg.at("idler_width_rad_fs").get<double>();
    m = hom::SeparableProduct{hom::SinglePhotonAmplitude{hom::AmplitudeShape::gaussian, center, ws, 2, 0.0},
                              hom::SinglePhotonAmplitude{hom::AmplitudeShape::gaussian, center, wi, 2, 0.0}};
  } else if (kind == "jsa") {
    const auto file = cfg.at("jsa_file").get<std::string>();
    if (file.empty()) throw hom::ValidationError("model \"jsa\" requires jsa_file");
    m = hom::read_jsa(file);
  } else {
    throw hom::ValidationError("model must be one of approx, cw, separable, jsa");
  }
  hom::validate(m);
  return m;
}

hom::ScanConfig scan_from_config(const json& cfg) {
  hom::ScanConfig s;
  s.delay_step_fs = cfg.at("delay_step_fs").get<double>();
  s.half_range_fs = cfg.at("half_range_fs").get<double>();
  s.baseline_counts = cfg.at("baseline_counts").get<double>();
  s.integration_window_s = cfg.at("integration_window_s").get<double>();
  s.dip_offset_fs = cfg.at("dip_offset_fs").get<double>();
  return s;
}

hom::ReplicateBaseline replicate_baseline_from_config(const json& cfg) {
  const auto b = cfg.at("bootstrap_baseline").get<std::string>();
  if (b == "tail_average") return hom::ReplicateBaseline::tail_average;
  if (b == "fixed") return hom::ReplicateBaseline::fixed;
  throw hom::ValidationError("bootstrap_baseline must be \"tail_average\" or \"fixed\"");
}

hom::SplineBoundary boundary_from_config(const json& cfg) {
  const auto b = cfg.at("boundary").get<std::string>();
  if (b == "natural") return hom::SplineBoundary::natural;
  if (b == "not_a_knot") return hom::SplineBoundary::not_a_knot;
  throw hom::ValidationError("boundary must be \"natural\" or \"not_a_knot\"");
}

std::filesystem::path output_dir(const json& cfg) {
  if (const auto d = cfg.at("output_dir").get<std::string>(); !d.empty()) return d;
  if (const char* env = std::getenv("HOM_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace homcli
