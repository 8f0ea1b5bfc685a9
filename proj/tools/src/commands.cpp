#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <map>

#include "hom/delay_metrology.hpp"
#include "hom/error.hpp"
#include "hom/file_util.hpp"
#include "hom/profile_fit.hpp"
#include "hom/random.hpp"
#include "hom/scan_io.hpp"
#include "hom/uncertainty.hpp"

namespace homcli {
namespace {

namespace fs = std::filesystem;
using hom::format_double;

std::string fmt(double x) { return format_double(x); }

json envelope(const std::string& format, const json& cfg) {
  return json{{"format", format}, {"version", "v1"}, {"tool_version", hom::version()}, {"config", cfg}};
}

void write_json(const fs::path& path, const json& j) { hom::write_file_atomic(path, j.dump(2) + "\n"); }

/// Tidy CSV plus a metadata sidecar with the same stem.
void write_table(const fs::path& dir, const std::string& stem, const std::string& csv, const std::string& format,
                 const json& cfg, const json& extra = json::object()) {
  hom::write_file_atomic(dir / (stem + ".csv"), csv);
  auto meta = envelope(format, cfg);
  meta["table"] = stem + ".csv";
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  write_json(dir / (stem + ".json"), meta);
}

hom::CoincidenceScan input_scan(const json& cfg) {
  const auto in = cfg.at("input").get<std::string>();
  if (in.empty()) throw hom::ValidationError("this command requires an input scan (--input)");
  const auto axis = cfg.at("stage_positions").get<bool>() ? hom::DelayAxis::position_um : hom::DelayAxis::delay_fs;
  return hom::read_scan(in, axis);
}

double visibility(const json& cfg) { return cfg.at("visibility").get<double>(); }

std::vector<int> orders(const json& cfg) { return cfg.at("orders").get<std::vector<int>>(); }

hom::EstimatorMethod method(const json& cfg) { return hom::parse_method(cfg.at("method").get<std::string>()); }

std::uint64_t seed(const json& cfg) { return cfg.at("seed").get<std::uint64_t>(); }

std::size_t replicates(const json& cfg) { return cfg.at("replicates").get<std::size_t>(); }

double half_range(const hom::CoincidenceScan& scan) {
  return std::min(std::abs(scan.delays_fs.front()), std::abs(scan.delays_fs.back()));
}

/// Dip width used for default ranges: sigma of the approximate profile fitted
/// to the input scan, or to the noiseless model scan.
double sigma_fit(const json& cfg, const hom::CoincidenceScan* scan) {
  if (scan) return hom::fit_profile(*scan).params.sigma_fs;
  const auto model = model_from_config(cfg);
  if (const auto* a = std::get_if<hom::ApproxSincGauss>(&model)) return a->sigma_fs;
  const auto sc = scan_from_config(cfg);
  const auto expected = hom::expected_profile(sc, hom::make_profile(model), visibility(cfg));
  return hom::fit_profile(sc.delays(), expected).params.sigma_fs;
}

/// Fills xi_min / xi_max when null and returns the geometric grid.
std::vector<double> resolve_xi(json& cfg, double step, double range, double sigma) {
  if (cfg.at("xi_min").is_null()) cfg["xi_min"] = step / 2.0;
  if (cfg.at("xi_max").is_null()) {
    const double untruncated = range / (2.0 * std::sqrt(std::log(1.0 / hom::kTruncationLevel)));
    cfg["xi_max"] = std::min(10.0 * sigma, untruncated);
  }
  return hom::xi_grid(cfg.at("xi_min").get<double>(), cfg.at("xi_max").get<double>(),
                      cfg.at("xi_steps").get<std::size_t>());
}

std::vector<int> even_orders(const json& cfg) {
  std::vector<int> out;
  for (int n : orders(cfg)) {
    if (n % 2 != 0) throw hom::ValidationError("witness orders must be even, got " + std::to_string(n));
    out.push_back(n);
  }
  return out;
}

hom::WitnessOptions witness_options(const json& cfg) {
  hom::WitnessOptions o;
  o.threshold = cfg.at("threshold").get<double>();
  o.replicates = replicates(cfg);
  o.seed = seed(cfg);
  o.method = method(cfg);
  o.boundary = boundary_from_config(cfg);
  o.baseline = replicate_baseline_from_config(cfg);
  return o;
}

json witness_json(const hom::WitnessReport& r) {
  json pts = json::array();
  for (std::size_t k = 0; k < r.xi_fs.size(); ++k) {
    pts.push_back({{"xi_fs", r.xi_fs[k]},
                   {"h", r.h[k]},
                   {"dh", r.dh[k]},
                   {"dh_formula", r.dh_formula[k]},
                   {"R", std::isfinite(r.r[k]) ? json(r.r[k]) : json(r.r[k] > 0 ? "inf" : "-inf")},
                   {"reliable", static_cast<bool>(r.reliable[k])}});
  }
  json intervals = json::array();
  for (const auto& [a, b] : r.intervals) intervals.push_back({a, b});
  return json{{"order", r.order},
              {"method", hom::method_name(r.method)},
              {"threshold", r.threshold},
              {"replicates", r.replicates},
              {"seed", r.seed},
              {"replicate_baseline", r.baseline == hom::ReplicateBaseline::fixed ? "fixed" : "tail_average"},
              {"reliability_threshold_fs", r.reliability_threshold_fs},
              {"verdict", r.witnessed ? "witnessed" : "not witnessed"},
              {"intervals", intervals},
              {"points", pts}};
}

std::vector<hom::WitnessReport> run_witness(json& cfg, const hom::CoincidenceScan& scan) {
  const auto xi = resolve_xi(cfg, scan.delay_step_fs, half_range(scan), sigma_fit(cfg, &scan));
  std::vector<hom::WitnessReport> out;
  for (int n : even_orders(cfg)) out.push_back(hom::witness_scan(scan, n, xi, visibility(cfg), witness_options(cfg)));
  return out;
}

std::vector<hom::DelaySensitivity> run_delay(json& cfg) {
  const auto model = model_from_config(cfg);
  const auto profile = hom::make_profile(model);
  const auto sc = scan_from_config(cfg);
  const double v = visibility(cfg);
  const double sigma = sigma_fit(cfg, nullptr);
  const auto xi = resolve_xi(cfg, sc.delay_step_fs, sc.half_range_fs, sigma);
  if (cfg.at("working_offset_fs").is_null()) cfg["working_offset_fs"] = 0.05 * sigma;
  const double offset = cfg.at("working_offset_fs").get<double>();
  const double step = cfg.at("difference_step_fs").get<double>();
  const auto source = hom::parse_delta_h_source(cfg.at("delta_h_source").get<std::string>());

  std::optional<hom::CoincidenceScan> boot_scan;
  if (source == hom::DeltaHSource::bootstrap) {
    boot_scan = hom::sample_scan(sc, profile, v, seed(cfg), hom::BaselineMode::tail_average, hom::model_name(model));
  }
  std::vector<hom::DelaySensitivity> out;
  for (int n : orders(cfg)) {
    std::vector<double> dh;
    for (double x : xi) {
      const hom::HGSpec hg(n, x);
      dh.push_back(source == hom::DeltaHSource::analytic
                       ? hom::analytic_delta_h(sc, profile, v, hg)
                       : hom::bootstrap_delta_h(*boot_scan, v, hg, method(cfg), replicates(cfg), seed(cfg)));
    }
    // the profile is centred on zero; the working offset is the extra delay
    out.push_back(hom::delay_sensitivity(profile, n, xi, dh, offset, step, sc.half_range_fs));
  }
  return out;
}

}  // namespace

void cmd_simulate(json& cfg) {
  const auto model = model_from_config(cfg);
  const auto sc = scan_from_config(cfg);
  const auto scan = hom::sample_scan(sc, hom::make_profile(model), visibility(cfg), seed(cfg),
                                     hom::BaselineMode::tail_average, hom::model_name(model));
  const auto path = output_dir(cfg) / (cfg.at("scan_name").get<std::string>() + ".csv");
  hom::write_scan(path, scan, cfg.dump());
  std::cout << "wrote " << path.generic_string() << " (" << scan.size() << " points)\n";
}

void cmd_estimate(json& cfg) {
  const auto scan = input_scan(cfg);
  const auto xi = resolve_xi(cfg, scan.delay_step_fs, half_range(scan), sigma_fit(cfg, &scan));
  hom::EstimatorOptions opts;
  opts.boundary = boundary_from_config(cfg);
  const auto ord = orders(cfg);
  const auto reports = hom::estimate_sweep(scan, ord, xi, visibility(cfg), method(cfg), opts);

  std::string csv = "n,xi_fs,h,variance,crb,reliable\n";
  json rows = json::array();
  for (const auto& r : reports) {
    csv += std::to_string(r.order) + ',' + fmt(r.xi_fs) + ',' + fmt(r.theta) + ',' + fmt(r.variance) + ',' +
           fmt(r.crb) + ',' + (r.reliable ? "true" : "false") + '\n';
    rows.push_back({{"n", r.order},
                    {"xi_fs", r.xi_fs},
                    {"method", hom::method_name(r.method)},
                    {"theta_prime", r.theta_prime},
                    {"variance_prime", r.variance_prime},
                    {"crb_prime", r.crb_prime},
                    {"h", r.theta},
                    {"variance", r.variance},
                    {"crb", r.crb},
                    {"kernel_integral", r.kernel_integral},
                    {"reliable", r.reliable},
                    {"truncation_warning", r.truncation_warning}});
  }
  const auto dir = output_dir(cfg);
  hom::write_file_atomic(dir / "sweep.csv", csv);
  auto j = envelope("hom-sweep", cfg);
  j["crb_reference"] = "interpolant";
  j["rows"] = rows;
  write_json(dir / "sweep.json", j);
  std::cout << "wrote " << reports.size() << " estimates to " << (dir / "sweep.csv").generic_string() << "\n";
}

void cmd_witness(json& cfg) {
  const auto scan = input_scan(cfg);
  const auto reports = run_witness(cfg, scan);
  auto j = envelope("hom-witness", cfg);
  j["reports"] = json::array();
  for (const auto& r : reports) {
    j["reports"].push_back(witness_json(r));
    std::cout << "order " << r.order << ": " << (r.witnessed ? "witnessed" : "not witnessed") << "\n";
  }
  write_json(output_dir(cfg) / "witness_report.json", j);
}

void cmd_bias(json& cfg) {
  const auto scan = input_scan(cfg);
  const auto xi = resolve_xi(cfg, scan.delay_step_fs, half_range(scan), sigma_fit(cfg, &scan));
  hom::BiasProbeOptions opts;
  opts.replicates = replicates(cfg);
  opts.seed = seed(cfg);
  opts.boundary = boundary_from_config(cfg);
  if (cfg.at("crb_reference") == "model") {
    const auto profile = hom::make_profile(model_from_config(cfg));
    const double c0 = cfg.at("baseline_counts").get<double>();
    const double v = visibility(cfg);
    const double t0 = cfg.at("dip_offset_fs").get<double>();
    opts.crb_reference = [=](double t) { return hom::expected_counts(c0, v, profile, t0, t); };
    opts.crb_source = "model";
  }
  const auto factors = cfg.at("factors").get<std::vector<int>>();
  std::string csv =
      "order,factor,delay_step_fs,xi_fs,method,bootstrap_variance,formula_variance,crb,violation,reliable,crb_source\n";
  for (int n : orders(cfg)) {
    for (const auto& r : hom::bias_probe(scan, n, factors, xi, opts)) {
      csv += std::to_string(n) + ',' + std::to_string(r.factor) + ',' + fmt(r.delay_step_fs) + ',' + fmt(r.xi_fs) +
             ',' + std::string(hom::method_name(r.method)) + ',' + fmt(r.bootstrap_variance) + ',' +
             fmt(r.formula_variance) + ',' + fmt(r.crb) + ',' + (r.violation ? "true" : "false") + ',' +
             (r.reliable ? "true" : "false") + ',' + r.crb_source + '\n';
    }
  }
  write_table(output_dir(cfg), "bias_probe", csv, "hom-bias-probe", cfg,
              json{{"scale", "theta_prime"}, {"violation_rule", "bootstrap_variance < crb (1 - 3/sqrt(M))"}});
}

void cmd_delay(json& cfg) {
  const auto curves = run_delay(cfg);
  std::string csv = "order,xi_fs,dtau0_fs,defined\n";
  json mins = json::object();
  for (const auto& c : curves) {
    for (std::size_t k = 0; k < c.xi_fs.size(); ++k) {
      csv += std::to_string(c.order) + ',' + fmt(c.xi_fs[k]) + ',' + fmt(c.dtau0_fs[k]) + ',' +
             (c.defined[k] ? "true" : "false") + '\n';
    }
    mins[std::to_string(c.order)] = c.min_dtau0();
  }
  write_table(output_dir(cfg), "delay_sensitivity", csv, "hom-delay", cfg,
              json{{"working_offset_fs", cfg.at("working_offset_fs")},
                   {"difference_step_fs", cfg.at("difference_step_fs")},
                   {"delta_h_source", cfg.at("delta_h_source")},
                   {"min_dtau0_fs", mins}});
}

bool cmd_fit(json& cfg) {
  const auto scan = input_scan(cfg);
  hom::FitOptions opts;
  opts.poisson_weights = cfg.at("weighted").get<bool>();
  const auto fit = hom::fit_profile(scan, opts);
  const auto& p = fit.params;
  const auto& se = fit.std_errors;
  auto j = envelope("hom-fit", cfg);
  j["status"] = hom::fit_status_name(fit.status);
  j["parameters"] = {{"c0", p.c0}, {"v", p.v}, {"sigma_fs", p.sigma_fs}, {"b", p.b}, {"tau0_fs", p.tau0_fs}};
  j["std_errors"] = {{"c0", se[0]}, {"v", se[1]}, {"sigma_fs", se[2]}, {"b", se[3]}, {"tau0_fs", se[4]}};
  j["rss"] = fit.rss;
  j["iterations"] = fit.iterations;
  j["final_step_norm"] = fit.final_step_norm;
  j["start_index"] = fit.start_index;
  j["weighting"] = opts.poisson_weights ? "poisson" : "none";
  const auto dir = output_dir(cfg);
  const bool ok = fit.status == hom::FitStatus::converged;
  if (ok) {
    const auto name = cfg.at("scan_name").get<std::string>() + "_recentered.csv";
    auto rec = hom::recenter(scan, p.tau0_fs);
    // the recentered grid keeps the original spacing but is no longer anchored at zero
    hom::write_scan(dir / name, rec, cfg.dump());
    j["recentered_scan"] = name;
  }
  write_json(dir / "fit.json", j);
  std::cout << "fit " << hom::fit_status_name(fit.status) << ": tau0 = " << p.tau0_fs << " +- " << se[4] << " fs\n";
  return ok;
}

void cmd_export_plot(json& cfg) {
  const int figure = cfg.at("figure").get<int>();
  if (figure < 0 || figure > 5) throw hom::ValidationError("figure must be 1-5 (0 for all)");
  const auto dir = output_dir(cfg);
  const bool all = figure == 0;
  std::optional<hom::CoincidenceScan> scan;
  if (all || figure <= 4) scan = input_scan(cfg);

  if (all || figure == 1) {
    const auto fit = hom::fit_profile(*scan);
    std::string csv = "delay_fs,counts,fit_counts\n";
    for (std::size_t i = 0; i < scan->size(); ++i) {
      csv += fmt(scan->delays_fs[i]) + ',' + std::to_string(scan->counts[i]) + ',' +
             fmt(fit.params.counts(scan->delays_fs[i])) + '\n';
    }
    write_table(dir, "fig1", csv, "hom-plot", cfg,
                json{{"figure", 1}, {"fit_status", hom::fit_status_name(fit.status)}});
  }

  std::vector<hom::WitnessReport> wit;
  if (all || figure == 2 || figure == 4) wit = run_witness(cfg, *scan);
  if (all || figure == 2) {
    for (const auto& r : wit) {
      std::string boot = "xi_fs,h,h_lo,h_hi\n";
      std::string formula_band = boot;
      for (std::size_t k = 0; k < r.xi_fs.size(); ++k) {
        boot += fmt(r.xi_fs[k]) + ',' + fmt(r.h[k]) + ',' + fmt(r.h[k] - r.dh[k]) + ',' + fmt(r.h[k] + r.dh[k]) + '\n';
        formula_band += fmt(r.xi_fs[k]) + ',' + fmt(r.h[k]) + ',' + fmt(r.h[k] - r.dh_formula[k]) + ',' +
               fmt(r.h[k] + r.dh_formula[k]) + '\n';
      }
      const auto stem = "fig2_n" + std::to_string(r.order);
      write_table(dir, stem, boot, "hom-plot", cfg,
                  json{{"figure", 2}, {"order", r.order}, {"band", "bootstrap"}});
      write_table(dir, stem + "_formula", formula_band, "hom-plot", cfg,
                  json{{"figure", 2}, {"order", r.order}, {"band", "variance formula"}});
    }
  }

  if (all || figure == 3) {
    const auto xi = resolve_xi(cfg, scan->delay_step_fs, half_range(*scan), sigma_fit(cfg, &*scan));
    const auto fit = hom::fit_profile(*scan);
    hom::BiasProbeOptions opts;
    opts.replicates = replicates(cfg);
    opts.seed = seed(cfg);
    opts.boundary = boundary_from_config(cfg);
    opts.methods = {method(cfg)};
    opts.crb_reference = fit.expected_counts();
    opts.crb_source = "fit";
    const double v = visibility(cfg);
    std::string csv = "order,xi_fs,bootstrap_sd,formula_sd,crb_sd,reliable,bias_flag\n";
    const int factor[] = {1};
    for (int n : orders(cfg)) {
      for (const auto& r : hom::bias_probe(*scan, n, factor, xi, opts)) {
        csv += std::to_string(n) + ',' + fmt(r.xi_fs) + ',' + fmt(std::sqrt(r.bootstrap_variance) / v) + ',' +
               fmt(std::sqrt(r.formula_variance) / v) + ',' + fmt(std::sqrt(r.crb) / v) + ',' +
               (r.reliable ? "true" : "false") + ',' + (r.violation ? "true" : "false") + '\n';
      }
    }
    write_table(dir, "fig3", csv, "hom-plot", cfg, json{{"figure", 3}, {"crb_reference", "fit"}});
  }

  if (all || figure == 4) {
    const auto it = std::find_if(wit.begin(), wit.end(), [](const auto& r) { return r.order == 4; });
    if (it == wit.end()) throw hom::ValidationError("figure 4 needs order 4 in orders");
    std::string csv = "xi_fs,R4\n";
    for (std::size_t k = 0; k < it->xi_fs.size(); ++k) csv += fmt(it->xi_fs[k]) + ',' + fmt(it->r[k]) + '\n';
    write_table(dir, "fig4", csv, "hom-plot", cfg,
                json{{"figure", 4}, {"verdict", it->witnessed ? "witnessed" : "not witnessed"}});
  }

  if (all || figure == 5) {
    json sub = cfg;
    // the delay analysis always runs on the configured model
    const auto curves = run_delay(sub);
    std::string csv = "order,xi_fs,dtau0_fs\n";
    for (const auto& c : curves) {
      for (std::size_t k = 0; k < c.xi_fs.size(); ++k) {
        if (c.defined[k]) csv += std::to_string(c.order) + ',' + fmt(c.xi_fs[k]) + ',' + fmt(c.dtau0_fs[k]) + '\n';
      }
    }
    write_table(dir, "fig5", csv, "hom-plot", sub,
                json{{"figure", 5}, {"working_offset_fs", sub.at("working_offset_fs")}});
  }
}

}  // namespace homcli
