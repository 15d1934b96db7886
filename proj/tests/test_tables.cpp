#include "floq/fixtures.hpp"

#include "doctest.h"

using namespace floq;

TEST_CASE("tables 1-7 replicate exactly") {
  auto tables = load_table_fixtures(std::string(FLOQ_FIXTURE_DIR) + "/tables.txt");
  REQUIRE(tables.size() == 7);
  ColouredLattice lat = build_honeycomb_torus(3);
  for (const TableFixture& fx : tables) {
    auto diffs = check_table(lat, fx);
    for (const std::string& d : diffs) {
      FAIL_CHECK(d);
    }
    CHECK(diffs.empty());
  }
}
