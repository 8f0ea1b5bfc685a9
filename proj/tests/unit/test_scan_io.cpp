#include <doctest.h>

#include <filesystem>

#include "hom/error.hpp"
#include "hom/file_util.hpp"
#include "hom/scan_io.hpp"

using namespace hom;

namespace {

CoincidenceScan preset_scan() {
  const auto p = reference_preset();
  return sample_scan(p.config, make_profile(p.model), p.visibility, 5);
}

std::string error_of(const std::string& csv, const std::string& side = {}) {
  try {
    parse_scan(csv, side);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("CSV and sidecar round trip") {
  const auto scan = preset_scan();
  const auto back = parse_scan(format_scan_csv(scan), format_scan_sidecar(scan, R"({"seed": 5})"));
  CHECK(back.delays_fs == scan.delays_fs);
  CHECK(back.counts == scan.counts);
  CHECK(back.baseline == scan.baseline);
  CHECK(back.delay_step_fs == scan.delay_step_fs);
  CHECK(back.provenance.kind == "simulated");
  CHECK(back.provenance.seed == 5);
}

TEST_CASE("files round trip through write_scan") {
  const auto dir = std::filesystem::temp_directory_path() / "hom_scan_io_test";
  std::filesystem::remove_all(dir);
  const auto scan = preset_scan();
  write_scan(dir / "s.csv", scan);
  CHECK(std::filesystem::exists(dir / "s.json"));
  CHECK(read_scan(dir / "s.csv").counts == scan.counts);
  std::filesystem::remove(dir / "s.json");
  const auto bare = read_scan(dir / "s.csv");
  CHECK(bare.provenance.kind == "ingested");
  CHECK(bare.baseline == doctest::Approx(tail_average(scan.counts_as_double())));
  std::filesystem::remove_all(dir);
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_of("delay_fs,counts\n0,1\n1,2\n2,x\n").find("line 4") != std::string::npos);
  CHECK(error_of("delay_fs,counts\n0,1\n1,2,3\n").find("line 3") != std::string::npos);
  CHECK(error_of("time,counts\n0,1\n").find("line 1") != std::string::npos);
  CHECK(error_of("delay_fs,counts\n0,1\n1,-2\n").find("line 3") != std::string::npos);
  CHECK(!error_of("").empty());
}

TEST_CASE("sidecar step must match the grid") {
  auto scan = preset_scan();
  auto side = format_scan_sidecar(scan);
  scan.delay_step_fs = 13.5;
  const auto bad_side = format_scan_sidecar(scan);
  scan.delay_step_fs = 13.4;
  CHECK_THROWS_AS(parse_scan(format_scan_csv(scan), bad_side), ValidationError);
  CHECK_NOTHROW(parse_scan(format_scan_csv(scan), side));
  CHECK_THROWS_AS(parse_scan(format_scan_csv(scan), "{\"format\": \"other\"}"), IoError);
}

TEST_CASE("stage positions convert with tau = 2 dx / c") {
  const std::string csv = "position_um,counts\n-1,10\n0,5\n1,10\n2,11\n";
  const auto s = parse_scan(csv, {}, DelayAxis::position_um);
  CHECK(s.delays_fs[2] == doctest::Approx(stage_delay_fs(1.0)).epsilon(1e-15));
  CHECK(s.delay_step_fs == doctest::Approx(2000.0 / 299.792458).epsilon(1e-12));
  CHECK_THROWS_AS(parse_scan(csv), IoError);
}

TEST_CASE("non-uniform grid is rejected") {
  CHECK_THROWS_AS(parse_scan("delay_fs,counts\n0,1\n1,1\n3,1\n"), ValidationError);
}

TEST_CASE("lossless doubles") {
  double x = 0.0;
  CHECK(parse_double(format_double(0.1 + 0.2), x));
  CHECK(x == 0.1 + 0.2);
  CHECK_FALSE(parse_double("1.0abc", x));
  CHECK_FALSE(parse_double("", x));
}
