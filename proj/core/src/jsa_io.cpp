#include "hom/jsa_io.hpp"

#include <sstream>

#include "hom/error.hpp"
#include "hom/file_util.hpp"

namespace hom {
namespace {

std::string line_error(std::size_t line, const std::string& what) {
  return "JSA file line " + std::to_string(line) + ": " + what;
}

UniformGrid parse_axis(std::string_view line, std::string_view name, std::size_t lineno) {
  std::istringstream ss{std::string(line)};
  std::string key, start, step, count;
  if (!(ss >> key >> start >> step >> count) || key != name) {
    throw IoError(line_error(lineno, "expected '" + std::string(name) + " <start> <step> <count>'"));
  }
  UniformGrid g;
  if (!parse_double(start, g.start) || !parse_double(step, g.step)) {
    throw IoError(line_error(lineno, "malformed axis number"));
  }
  try {
    std::size_t used = 0;
    const auto n = std::stoull(count, &used);
    if (used != count.size()) throw std::invalid_argument("trailing");
    g.count = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw IoError(line_error(lineno, "malformed axis count"));
  }
  return g;
}

}  // namespace

std::string format_jsa(const NumericGrid& grid) {
  std::string out = "# hom-jsa v1\n";
  auto axis = [&](const char* name, const UniformGrid& g) {
    out += name;
    out += ' ' + format_double(g.start) + ' ' + format_double(g.step) + ' ' + std::to_string(g.count) + '\n';
  };
  axis("omega1", grid.omega1);
  axis("omega2", grid.omega2);
  for (std::size_t i = 0; i < grid.omega1.count; ++i) {
    for (std::size_t j = 0; j < grid.omega2.count; ++j) {
      const auto z = grid.at(i, j);
      if (j) out += ' ';
      out += format_double(z.real());
      out += ',';
      out += format_double(z.imag());
    }
    out += '\n';
  }
  return out;
}

NumericGrid parse_jsa(std::string_view text) {
  NumericGrid grid;
  std::size_t lineno = 0;
  int stage = 0;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (stage == 0) {
      grid.omega1 = parse_axis(line, "omega1", lineno);
      stage = 1;
    } else if (stage == 1) {
      grid.omega2 = parse_axis(line, "omega2", lineno);
      grid.samples.reserve(grid.omega1.count * grid.omega2.count);
      stage = 2;
    } else {
      if (row >= grid.omega1.count) throw IoError(line_error(lineno, "more rows than omega1 count"));
      std::size_t cols = 0;
      std::size_t p = 0;
      while (p < line.size()) {
        while (p < line.size() && line[p] == ' ') ++p;
        if (p >= line.size()) break;
        auto q = line.find(' ', p);
        if (q == std::string_view::npos) q = line.size();
        const auto token = line.substr(p, q - p);
        const auto comma = token.find(',');
        double re = 0.0, im = 0.0;
        if (comma == std::string_view::npos || !parse_double(token.substr(0, comma), re) ||
            !parse_double(token.substr(comma + 1), im)) {
          throw IoError(line_error(lineno, "malformed entry '" + std::string(token) + "'"));
        }
        grid.samples.emplace_back(re, im);
        ++cols;
        p = q;
      }
      if (cols != grid.omega2.count) {
        throw IoError(line_error(lineno, "expected " + std::to_string(grid.omega2.count) +
                                             " entries, found " + std::to_string(cols)));
      }
      ++row;
    }
  }
  if (stage < 2) throw IoError("JSA file is missing its axis header lines");
  if (row != grid.omega1.count) {
    throw IoError("JSA file has " + std::to_string(row) + " rows, expected " + std::to_string(grid.omega1.count));
  }
  return grid;
}

void write_jsa(const std::filesystem::path& path, const NumericGrid& grid) {
  write_file_atomic(path, format_jsa(grid));
}

NumericGrid read_jsa(const std::filesystem::path& path) {
  auto grid = parse_jsa(read_text_file(path));
  grid.validate();
  return grid;
}

}  // namespace hom
