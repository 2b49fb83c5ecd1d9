#include "smtj/tsplib.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <string>

#include "oracles.hpp"

using namespace smtj;

namespace {

const std::string kData = std::string(SMTJ_DATA_DIR) + "/tsplib/";

// Published optimal st70 tour (0-based city ids); its rounded-Euclidean
// length is the known optimum 675.
constexpr int kSt70Optimal[70] = {
    0,  35, 28, 12, 69, 34, 30, 68, 37, 58, 21, 65, 62, 56, 14, 23, 18, 6,
    1,  3,  17, 41, 31, 2,  7,  25, 54, 48, 27, 13, 19, 29, 43, 67, 26, 45,
    24, 44, 38, 60, 39, 8,  16, 42, 40, 5,  52, 4,  9,  51, 59, 11, 33, 20,
    32, 61, 53, 47, 66, 10, 63, 64, 55, 50, 49, 57, 36, 46, 15, 22};

}  // namespace

TEST_CASE("minimal synthetic file round-trips") {
  const std::string text =
      "NAME: tiny\n"
      "TYPE: TSP\n"
      "DIMENSION: 3\n"
      "EDGE_WEIGHT_TYPE: EUC_2D\n"
      "NODE_COORD_SECTION\n"
      "1 0.0 0.0\n"
      "2 3.0 0.0\n"
      "3 3.0 4.0\n"
      "EOF\n";
  const TsplibFile f = parse_tsplib(text);
  REQUIRE(f.name == "tiny");
  REQUIRE(f.dimension == 3);
  REQUIRE(f.edge_weight_type == "EUC_2D");
  REQUIRE(f.node_coords.size() == 3);
  REQUIRE(f.node_coords[2].x == 3.0);
  REQUIRE(f.node_coords[2].y == 4.0);
  REQUIRE(f.warnings.empty());

  const TspInstance ins = to_instance(f);
  REQUIRE(ins.d(0, 1) == 3.0);
  REQUIRE(ins.d(1, 2) == 4.0);
  REQUIRE(ins.d(0, 2) == 5.0);
}

TEST_CASE("keyword parsing is tolerant") {
  const std::string text =
      "NAME : spaced\n"
      "COMMENT : anything goes : here\n"
      "TYPE: TSP\n"
      "DIMENSION:4\n"
      "SOME_FUTURE_KEYWORD: 42\n"
      "EDGE_WEIGHT_TYPE  :   EUC_2D\n"
      "NODE_COORD_SECTION\n"
      "1 0 0\n"
      "2 1 0\n"
      "3 0 1\n"
      "4 1 1\n"
      "EOF\n";
  const TsplibFile f = parse_tsplib(text);
  REQUIRE(f.dimension == 4);
  // unknown keywords are ignored with a warning, not errors
  REQUIRE(f.warnings.size() == 1);
  REQUIRE(f.warnings[0].find("SOME_FUTURE_KEYWORD") != std::string::npos);
}

TEST_CASE("malformed files produce parse errors") {
  SECTION("missing DIMENSION") {
    REQUIRE_THROWS_AS(parse_tsplib("NAME: x\nTYPE: TSP\nEOF\n"), parse_error);
  }
  SECTION("truncated coordinate section") {
    const std::string text =
        "NAME: cut\nDIMENSION: 5\nEDGE_WEIGHT_TYPE: EUC_2D\n"
        "NODE_COORD_SECTION\n1 0 0\n2 1 1\n";
    try {
      parse_tsplib(text);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      REQUIRE(std::string(e.what()).find("NODE_COORD_SECTION") !=
              std::string::npos);
    }
  }
  SECTION("garbage coordinate line carries its line number") {
    const std::string text =
        "DIMENSION: 2\nNODE_COORD_SECTION\n1 0 0\nnot a coord\nEOF\n";
    try {
      parse_tsplib(text);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      REQUIRE(e.line() == 4);
    }
  }
  SECTION("coordinates before DIMENSION") {
    REQUIRE_THROWS_AS(parse_tsplib("NODE_COORD_SECTION\n1 0 0\nEOF\n"),
                      parse_error);
  }
}

TEST_CASE("EUC_2D rounding convention") {
  REQUIRE(euc2d(0, 0, 3, 4) == 5.0);
  REQUIRE(euc2d(0, 0, 1, 1) == 1.0);  // nint(1.414...) = 1
  REQUIRE(euc2d(0, 0, 0.5, 0) == 1.0);
  REQUIRE(euc2d(0, 0, 0, 0) == 0.0);
}

TEST_CASE("bundled corpus parses") {
  for (const char* name :
       {"st70", "berlin52", "eil76", "eil101", "burma14"}) {
    const TsplibFile f = load_tsplib(kData + name + std::string(".tsp"));
    REQUIRE(f.dimension == f.node_coords.size());
  }
  REQUIRE(load_tsplib(kData + "st70.tsp").dimension == 70);
  REQUIRE(load_tsplib(kData + "berlin52.tsp").dimension == 52);
  REQUIRE(load_tsplib(kData + "eil76.tsp").dimension == 76);
  REQUIRE(load_tsplib(kData + "eil101.tsp").dimension == 101);
}

TEST_CASE("GEO files parse but do not convert") {
  const TsplibFile f = load_tsplib(kData + "burma14.tsp");
  REQUIRE(f.dimension == 14);
  REQUIRE(f.edge_weight_type == "GEO");
  REQUIRE_THROWS_AS(to_instance(f), unsupported_format);
}

TEST_CASE("distances are symmetric and nonnegative after rounding") {
  const TspInstance ins = load_instance(kData + "berlin52.tsp");
  for (std::size_t i = 0; i < ins.size(); ++i)
    for (std::size_t j = 0; j < ins.size(); ++j) {
      REQUIRE(ins.d(i, j) == ins.d(j, i));
      REQUIRE(ins.d(i, j) >= 0.0);
      REQUIRE(ins.d(i, j) == std::floor(ins.d(i, j)));
    }
}

TEST_CASE("st70 published optimal order has length 675") {
  const TspInstance ins = load_instance(kData + "st70.tsp");
  REQUIRE(ins.size() == 70);
  const std::vector<int> order(kSt70Optimal, kSt70Optimal + 70);
  REQUIRE(tour_length(ins, order) == 675.0);
}
