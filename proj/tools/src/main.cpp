#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hom/error.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kNumeric = 3, kIo = 4 };

struct Flags {
  std::string config;
  std::string input;
  std::string output_dir;
  std::string model;
  std::string method;
  std::string delta_h;
  std::uint64_t seed = 0;
  long reps = 0;
  double xi_min = 0.0;
  double xi_max = 0.0;
  long xi_steps = 0;
  double visibility = 0.0;
  double threshold = 0.0;
  double offset = 0.0;
  int figure = 0;
  std::vector<int> orders;
  std::vector<int> factors;
  bool stage = false;
  bool unweighted = false;
};

void add_common(CLI::App* sub, Flags& f, std::map<std::string, CLI::Option*>& opts) {
  opts["config"] = sub->add_option("--config", f.config, "JSON run configuration (flags override it)");
  opts["input"] = sub->add_option("--input,-i", f.input, "scan CSV (sidecar JSON read when present)");
  opts["output_dir"] = sub->add_option("--output-dir,-o", f.output_dir, "output directory (default $HOM_OUTPUT_DIR or .)");
  opts["model"] = sub->add_option("--model", f.model, "approx | cw | separable | jsa");
  opts["seed"] = sub->add_option("--seed", f.seed, "random seed");
  opts["replicates"] = sub->add_option("--reps", f.reps, "bootstrap replicates");
  opts["xi_min"] = sub->add_option("--xi-min", f.xi_min, "smallest xi (fs)");
  opts["xi_max"] = sub->add_option("--xi-max", f.xi_max, "largest xi (fs)");
  opts["xi_steps"] = sub->add_option("--xi-steps", f.xi_steps, "number of xi values (geometric)");
  opts["orders"] = sub->add_option("--order", f.orders, "Hermite-Gauss orders (0, 2, 4, ...)")->delimiter(',');
  opts["method"] = sub->add_option("--method", f.method, "discrete | interpolated");
  opts["visibility"] = sub->add_option("--visibility", f.visibility, "dip visibility v in (0, 1]");
  opts["stage_positions"] = sub->add_flag("--stage-positions", f.stage, "first CSV column is stage position in um");
}

nlohmann::json overrides(const Flags& f, const std::map<std::string, CLI::Option*>& opts) {
  nlohmann::json j = nlohmann::json::object();
  auto given = [&](const char* k) { return opts.count(k) && opts.at(k)->count() > 0; };
  if (given("input")) j["input"] = f.input;
  if (given("output_dir")) j["output_dir"] = f.output_dir;
  if (given("model")) j["model"] = f.model;
  if (given("seed")) j["seed"] = f.seed;
  if (given("replicates")) j["replicates"] = f.reps;
  if (given("xi_min")) j["xi_min"] = f.xi_min;
  if (given("xi_max")) j["xi_max"] = f.xi_max;
  if (given("xi_steps")) j["xi_steps"] = f.xi_steps;
  if (given("orders")) j["orders"] = f.orders;
  if (given("method")) j["method"] = f.method;
  if (given("visibility")) j["visibility"] = f.visibility;
  if (given("stage_positions")) j["stage_positions"] = f.stage;
  if (given("threshold")) j["threshold"] = f.threshold;
  if (given("factors")) j["factors"] = f.factors;
  if (given("working_offset_fs")) j["working_offset_fs"] = f.offset;
  if (given("delta_h_source")) j["delta_h_source"] = f.delta_h;
  if (given("figure")) j["figure"] = f.figure;
  if (given("weighted")) j["weighted"] = !f.unweighted;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hong-Ou-Mandel dip simulation and semiparametric estimation"};
  app.set_version_flag("--version", std::string(hom::version()));
  app.require_subcommand(1);

  Flags f;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  auto make = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, f, opts[name]);
    return sub;
  };
  make("simulate", "draw a Poisson coincidence scan from a spectral model");
  make("estimate", "sweep Hermite-Gauss components over xi");
  auto* witness = make("witness", "entanglement witness report with bootstrap significance");
  opts["witness"]["threshold"] = witness->add_option("--threshold", f.threshold, "witness |R| threshold");
  auto* bias = make("bias", "bootstrap variance vs CRB on downsampled scans");
  opts["bias"]["factors"] = bias->add_option("--factors", f.factors, "downsampling factors")->delimiter(',');
  auto* delay = make("delay", "delay-metrology sensitivity per order");
  opts["delay"]["working_offset_fs"] = delay->add_option("--offset", f.offset, "working offset tau0* (fs)");
  opts["delay"]["delta_h_source"] = delay->add_option("--delta-h", f.delta_h, "analytic | bootstrap");
  auto* fit = make("fit", "fit the approximate dip model and re-centre the scan");
  opts["fit"]["weighted"] = fit->add_flag("--unweighted", f.unweighted, "unweighted least squares");
  auto* plot = make("export-plot", "plot-ready tables for figures 1-5");
  opts["export-plot"]["figure"] = plot->add_option("--figure", f.figure, "figure number (0 = all)");
  opts["export-plot"]["threshold"] = plot->add_option("--threshold", f.threshold, "witness |R| threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();
  try {
    auto cfg = homcli::default_config();
    if (!f.config.empty()) homcli::merge_config(cfg, homcli::load_config_file(f.config), f.config);
    homcli::merge_config(cfg, overrides(f, opts[name]), "command line");
    homcli::validate_config(cfg);

    if (name == "simulate") homcli::cmd_simulate(cfg);
    else if (name == "estimate") homcli::cmd_estimate(cfg);
    else if (name == "witness") homcli::cmd_witness(cfg);
    else if (name == "bias") homcli::cmd_bias(cfg);
    else if (name == "delay") homcli::cmd_delay(cfg);
    else if (name == "fit") return homcli::cmd_fit(cfg) ? kOk : kNumeric;
    else if (name == "export-plot") homcli::cmd_export_plot(cfg);
    return kOk;
  } catch (const hom::ValidationError& e) {
    std::cerr << "hom " << name << ": invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const hom::NumericError& e) {
    std::cerr << "hom " << name << ": numerical failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const hom::IoError& e) {
    std::cerr << "hom " << name << ": I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "hom " << name << ": invalid configuration: " << e.what() << "\n";
    return kValidation;
  }
}
