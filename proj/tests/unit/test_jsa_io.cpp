#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "hom/error.hpp"
#include "hom/jsa_io.hpp"

using namespace hom;

namespace {

NumericGrid small_grid() {
  auto jsa = [](double w1, double w2) {
    return std::complex<double>(std::exp(-(w1 * w1 + w2 * w2) * 900.0), 0.1 * std::sin(w1 - w2));
  };
  return NumericGrid::sample(jsa, UniformGrid::symmetric(0.1, 9));
}

}  // namespace

TEST_CASE("format and parse round trip losslessly") {
  const auto g = small_grid();
  const auto back = parse_jsa(format_jsa(g));
  CHECK(back.omega1.count == g.omega1.count);
  CHECK(back.omega2.step == g.omega2.step);
  REQUIRE(back.samples.size() == g.samples.size());
  for (std::size_t i = 0; i < g.samples.size(); ++i) CHECK(back.samples[i] == g.samples[i]);
}

TEST_CASE("file round trip validates") {
  const auto dir = std::filesystem::temp_directory_path() / "hom_jsa_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "j.txt";
  write_jsa(path, small_grid());
  CHECK(read_jsa(path).samples.size() == 81);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed input reports the line") {
  const std::string head = "# hom-jsa v1\nomega1 0 0.1 2\nomega2 0 0.1 2\n";
  try {
    parse_jsa(head + "1,0 0,0\n1,x 0,0\n");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_jsa(head + "1,0\n0,0 0,0\n"), IoError);
  CHECK_THROWS_AS(parse_jsa("omega1 0 0.1 2\n"), IoError);
  CHECK_THROWS_AS(parse_jsa(head + "1,0 0,0\n"), IoError);
}
