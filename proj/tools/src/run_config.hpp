#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hom/dip_model.hpp"
#include "hom/semipar_estimator.hpp"
#include "hom/uncertainty.hpp"

namespace homcli {

using nlohmann::json;

/// Every recognised key with its default value.  Null means "derived at run time".
json default_config();

/// Merges `overrides` into `base`.  Unknown keys and type mismatches throw
/// hom::ValidationError naming the key.
void merge_config(json& base, const json& overrides, const std::string& origin);

json load_config_file(const std::filesystem::path& path);

/// Range and consistency checks shared by all commands.
void validate_config(const json& cfg);

hom::SpectralModel model_from_config(const json& cfg);
hom::ScanConfig scan_from_config(const json& cfg);
hom::SplineBoundary boundary_from_config(const json& cfg);
/// C0 handling inside witness bootstrap replicates.
hom::ReplicateBaseline replicate_baseline_from_config(const json& cfg);

/// Output directory: config "output_dir", else $HOM_OUTPUT_DIR, else ".".
std::filesystem::path output_dir(const json& cfg);

}  // namespace homcli
