#include <cmath>
#include <string>

#include "doctest.h"
#include "ssm/io.hpp"

using namespace ssm;

namespace {

const std::string kFixtures = FIXTURE_DIR;

}  // namespace

TEST_CASE("parse_ifs_json") {
  const auto maps = parse_ifs_json(R"({"maps": [{"r": 0.5, "b": 0, "p": 0.25}, {"r": 0.25, "b": 1, "p": 0.75}]})");
  REQUIRE(maps.size() == 2);
  CHECK(maps[0].ratio == 0.5);
  CHECK(maps[1].translation == 1.0);
  CHECK(maps[1].weight == 0.75);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_ifs_json("{\n  \"maps\": [\n    {\"r\": 0.5 \"b\": 0}\n  ]\n}");
    FAIL("expected SpecFileError");
  } catch (const SpecFileError& e) {
    CHECK(e.line() == 3);
    // The unexpected token is "b", columns 15-17.
    CHECK(e.column() == 17);
  }
  try {
    parse_ifs_json("{\"maps\": [");
    FAIL("expected SpecFileError");
  } catch (const SpecFileError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() >= 10);
  }
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(parse_ifs_json("[1, 2]"), SpecFileError);
  CHECK_THROWS_AS(parse_ifs_json(R"({"maps": 3})"), SpecFileError);
  CHECK_THROWS_AS(parse_ifs_json(R"({"maps": [1]})"), SpecFileError);
  CHECK_THROWS_AS(parse_ifs_json(R"({"maps": [{"r": 0.5, "b": "x", "p": 1}]})"), SpecFileError);
  CHECK_THROWS_AS(parse_ifs_json(R"({"maps": [{"r": 0.5, "p": 1}]})"), SpecFileError);
}

TEST_CASE("read_ifs_file") {
  const IfsSpec cantor = read_ifs_file(kFixtures + "/cantor.json", true);
  CHECK(cantor.normalized());
  CHECK(cantor.size() == 2);
  const IfsSpec wide = read_ifs_file(kFixtures + "/wide.json", true);
  CHECK(std::abs(wide.map(1).translation - 0.5) <= 1e-15);
  CHECK_FALSE(read_ifs_file(kFixtures + "/wide.json", false).normalized());
  try {
    read_ifs_file(kFixtures + "/singleton.json", true);
    FAIL("expected SingletonError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingleton);
  }
  CHECK_THROWS_AS(read_ifs_file(kFixtures + "/malformed.json", true), SpecFileError);
  CHECK_THROWS_AS(read_ifs_file(kFixtures + "/does-not-exist.json", true), SpecFileError);
}

TEST_CASE("json round trip is exact") {
  const IfsSpec spec = read_ifs_file(kFixtures + "/half_third.json", true);
  const auto text = to_json(spec).dump();
  const auto maps = parse_ifs_json(text);
  REQUIRE(maps.size() == spec.size());
  for (std::size_t j = 0; j < maps.size(); ++j) {
    CHECK(maps[j].ratio == spec.map(j).ratio);
    CHECK(maps[j].translation == spec.map(j).translation);
    CHECK(maps[j].weight == spec.map(j).weight);
  }
}

TEST_CASE("format_double round-trips") {
  for (const double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.123, -2.5}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}
