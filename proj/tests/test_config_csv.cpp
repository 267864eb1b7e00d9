// Config parsing (strict keys, line-referenced errors, overrides) and CSV /
// manifest emission.
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "quench/config.hpp"
#include "quench/csv.hpp"

using namespace quench;

TEST_SUITE_BEGIN("config_csv");

TEST_CASE("config text parses into validated parameters") {
  const std::string text = R"(
# experiment setup
[model]
beta = 2.0
alpha = 1.0
forcing = vortex
vortex_H0 = 0.5

[domain]
x_min = -1.0
x_max = 1.0
n = 501

[seed]
T = 0.01
t0 = 0.002
d0 = 0.05

[shrink]
K0 = 8.0
A = 12.0
)";
  const ExperimentConfig config = parse_config(text, "inline");
  CHECK(config.params.beta == 2.0);
  CHECK(config.params.p == 4.0);  // derived, not stored
  CHECK(config.params.b == doctest::Approx(9.0 / 8.0));
  CHECK(config.forcing.kind == ForcingKind::vortex);
  CHECK(config.forcing.vortex_H0 == 0.5);
  CHECK(config.grid.n == 501);
  CHECK(config.seed.d0 == 0.05);
  CHECK(config.params.A == 12.0);
}

TEST_CASE("unknown keys are rejected with a line reference") {
  const std::string text = "[model]\nbeta = 1.0\nbogus = 3\n";
  try {
    parse_config(text, "test.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    const std::string what = err.what();
    CHECK(what.find("test.ini:3") != std::string::npos);
    CHECK(what.find("model.bogus") != std::string::npos);
  }
}

TEST_CASE("malformed values and violated constraints are rejected") {
  CHECK_THROWS_AS(parse_config("[model]\nbeta = abc\n", "x"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nbeta\n", "x"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nbeta = -1\n", "x"), ConfigError);
  CHECK_THROWS_AS(parse_config("[seed]\nT = 0.5\n", "x"), ConfigError);  // >= 1/e
  CHECK_THROWS_AS(parse_config("[domain]\nn = 3\n", "x"), ConfigError);
  CHECK_THROWS_AS(
      parse_config("[shrink]\nalpha_under = 2.0\n", "x"),  // needs > 3
      ConfigError);
}

TEST_CASE("overrides apply after the file and are checked") {
  ExperimentConfig config = default_config();
  apply_overrides(config, {"model.beta=2.0", "shrink.A=15"});
  CHECK(config.params.beta == 2.0);
  CHECK(config.params.p == 4.0);
  CHECK(config.params.A == 15.0);
  CHECK_THROWS_AS(apply_overrides(config, {"nope=1"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(config, {"model.beta"}), ConfigError);
}

TEST_CASE("defaults validate and carry the derived exponents") {
  const ExperimentConfig config = default_config();
  CHECK(config.params.a == 2.0);
  CHECK(config.params.p == 3.0);
  CHECK(config.params.T == doctest::Approx(std::exp(-6.0)));
  CHECK(config.params.alpha_bar >= config.params.alpha_under + 1.0);
}

TEST_CASE("csv rows carry 17 significant digits and LF endings") {
  CsvWriter csv({"a", "b"});
  csv.add_row({1.0 / 3.0, 2.0});
  csv.add_row({0.1, -1e-300});
  const std::string out = csv.str();
  CHECK(out.find("0.33333333333333331") != std::string::npos);
  CHECK(out.find("\r") == std::string::npos);
  CHECK(out.back() == '\n');
  // Round trip: the printed value parses back to the same double.
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(std::stod(format_double(-1e-300)) == -1e-300);
}

TEST_CASE("manifest lists artifacts with stable checksums") {
  const std::string dir = "/tmp/quenchlab_csv_test";
  std::filesystem::remove_all(dir);
  {
    ArtifactWriter artifacts(dir);
    artifacts.write("b.csv", "x,y\n1,2\n");
    artifacts.write("a.csv", "hello\n");
    artifacts.finalize();
  }
  std::ifstream manifest(dir + "/manifest.txt");
  std::string line1, line2;
  std::getline(manifest, line1);
  std::getline(manifest, line2);
  CHECK(line1 == checksum_hex("hello\n") + "  a.csv");
  CHECK(line2 == checksum_hex("x,y\n1,2\n") + "  b.csv");
  // Deterministic: same content, same checksum.
  CHECK(checksum_hex("hello\n") == checksum_hex("hello\n"));
  CHECK(checksum_hex("hello\n") != checksum_hex("hello"));
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
