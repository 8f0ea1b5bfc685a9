#include "hom/scan_io.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

#include "hom/error.hpp"
#include "hom/file_util.hpp"

namespace hom {
namespace {

using nlohmann::json;

std::string csv_error(std::size_t line, const std::string& what) {
  return "scan CSV line " + std::to_string(line) + ": " + what;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_count(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

std::string format_scan_csv(const CoincidenceScan& scan) {
  std::string out = "delay_fs,counts\n";
  for (std::size_t i = 0; i < scan.size(); ++i) {
    out += format_double(scan.delays_fs[i]);
    out += ',';
    out += std::to_string(scan.counts[i]);
    out += '\n';
  }
  return out;
}

std::string format_scan_sidecar(const CoincidenceScan& scan, std::string_view config_json) {
  json j;
  j["format"] = "hom-scan";
  j["version"] = "v1";
  j["tool_version"] = version();
  j["points"] = scan.size();
  j["delay_step_fs"] = scan.delay_step_fs;
  j["baseline_counts"] = scan.baseline;
  j["provenance"] = {{"kind", scan.provenance.kind},
                     {"seed", scan.provenance.seed},
                     {"source", scan.provenance.source},
                     {"rng", scan.provenance.rng}};
  if (!config_json.empty()) {
    auto cfg = json::parse(config_json, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object()) throw ValidationError("embedded config must be a JSON object");
    j["config"] = std::move(cfg);
  }
  return j.dump(2) + "\n";
}

CoincidenceScan parse_scan(std::string_view csv, std::string_view sidecar, DelayAxis axis) {
  CoincidenceScan scan;
  const std::string_view expected_header = axis == DelayAxis::delay_fs ? "delay_fs,counts" : "position_um,counts";
  bool header = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const auto end = csv.find('\n', pos);
    auto line = csv.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? csv.size() + 1 : end + 1;
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != expected_header) {
        throw IoError(csv_error(lineno, "expected header '" + std::string(expected_header) + "'"));
      }
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw IoError(csv_error(lineno, "expected two comma-separated fields"));
    }
    double x = 0.0;
    std::int64_t c = 0;
    if (!parse_double(line.substr(0, comma), x) || !std::isfinite(x)) {
      throw IoError(csv_error(lineno, "malformed delay '" + std::string(line.substr(0, comma)) + "'"));
    }
    if (!parse_count(line.substr(comma + 1), c)) {
      throw IoError(csv_error(lineno, "malformed count '" + std::string(trim(line.substr(comma + 1))) + "'"));
    }
    if (c < 0) throw IoError(csv_error(lineno, "negative count"));
    scan.delays_fs.push_back(axis == DelayAxis::delay_fs ? x : stage_delay_fs(x));
    scan.counts.push_back(c);
  }
  if (!header) throw IoError("scan CSV is empty or lacks a header");
  if (scan.size() < 2) throw IoError("scan CSV has fewer than two rows");

  const double grid_step = (scan.delays_fs.back() - scan.delays_fs.front()) / static_cast<double>(scan.size() - 1);
  scan.delay_step_fs = grid_step;
  if (sidecar.empty()) {
    const auto c = scan.counts_as_double();
    scan.baseline = tail_average(c);
    scan.provenance.kind = "ingested";
  } else {
    const auto j = json::parse(sidecar, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw IoError("scan sidecar is not a JSON object");
    try {
      if (j.at("format").get<std::string>() != "hom-scan") throw IoError("scan sidecar has wrong format tag");
      if (j.at("version").get<std::string>() != "v1") throw IoError("unsupported scan sidecar version");
      scan.delay_step_fs = j.at("delay_step_fs").get<double>();
      scan.baseline = j.at("baseline_counts").get<double>();
      if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        scan.provenance.kind = p.value("kind", "ingested");
        scan.provenance.seed = p.value("seed", std::uint64_t{0});
        scan.provenance.source = p.value("source", "");
        scan.provenance.rng = p.value("rng", "");
      }
    } catch (const json::exception& e) {
      throw IoError(std::string("scan sidecar: ") + e.what());
    }
    if (!(scan.delay_step_fs > 0.0) ||
        std::abs(scan.delay_step_fs - grid_step) > 1e-6 * std::abs(scan.delay_step_fs)) {
      throw ValidationError("sidecar delay_step_fs " + format_double(scan.delay_step_fs) +
                            " does not match the CSV grid spacing " + format_double(grid_step));
    }
  }
  scan.validate();
  return scan;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

void write_scan(const std::filesystem::path& csv, const CoincidenceScan& scan, std::string_view config_json) {
  scan.validate();
  write_file_atomic(csv, format_scan_csv(scan));
  write_file_atomic(sidecar_path(csv), format_scan_sidecar(scan, config_json));
}

CoincidenceScan read_scan(const std::filesystem::path& csv, DelayAxis axis) {
  const auto text = read_text_file(csv);
  const auto side = sidecar_path(csv);
  std::string sidecar;
  if (std::filesystem::exists(side)) sidecar = read_text_file(side);
  try {
    return parse_scan(text, sidecar, axis);
  } catch (const IoError& e) {
    throw IoError(csv.string() + ": " + e.what());
  }
}

}  // namespace hom
