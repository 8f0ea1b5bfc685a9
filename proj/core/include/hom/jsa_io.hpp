#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hom/spdc_model.hpp"

namespace hom {

/// Text JSA matrix, version 1:
///
///   # hom-jsa v1
///   omega1 <start> <step> <count>
///   omega2 <start> <step> <count>
///   <count1 rows, each with count2 space-separated "re,im" pairs>
///
/// Frequencies in rad/fs.  Further lines starting with '#' are ignored.
/// Numbers are written in shortest round-trip form, so write/read is
/// lossless at double precision.
std::string format_jsa(const NumericGrid& grid);
NumericGrid parse_jsa(std::string_view text);

void write_jsa(const std::filesystem::path& path, const NumericGrid& grid);
/// Parses and validates (including normalization).
NumericGrid read_jsa(const std::filesystem::path& path);

}  // namespace hom
