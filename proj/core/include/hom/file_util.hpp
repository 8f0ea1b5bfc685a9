#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hom {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Parses a complete token as a double; returns false on any trailing text.
bool parse_double(std::string_view text, double& out);

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace hom
