#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hom/dip_model.hpp"

namespace hom {

/// Delay axis stored in the first CSV column.
enum class DelayAxis {
  delay_fs,    ///< header "delay_fs,counts"
  position_um  ///< header "position_um,counts"; converted with stage_delay_fs
};

/// CSV body: header line, then one "delay,counts" row per grid point.
std::string format_scan_csv(const CoincidenceScan& scan);

/// JSON sidecar (format "hom-scan", version "v1").  `config_json`, when not
/// empty, must be a JSON object and is embedded under "config".
std::string format_scan_sidecar(const CoincidenceScan& scan, std::string_view config_json = {});

/// Parses a scan from CSV text and optional sidecar text.  Without a sidecar
/// the step is taken from the grid and C0 from the tail average.  Errors
/// carry the offending line number; a sidecar step that disagrees with the
/// grid is an error.
CoincidenceScan parse_scan(std::string_view csv, std::string_view sidecar = {},
                           DelayAxis axis = DelayAxis::delay_fs);

/// Sidecar path for a scan CSV: same stem, ".json" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

void write_scan(const std::filesystem::path& csv, const CoincidenceScan& scan,
                std::string_view config_json = {});
/// Reads the CSV and, if present, its sidecar.
CoincidenceScan read_scan(const std::filesystem::path& csv, DelayAxis axis = DelayAxis::delay_fs);

}  // namespace hom
