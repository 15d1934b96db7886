#pragma once

#include <string>
#include <vector>

#include "floq/gates.hpp"
#include "floq/isg.hpp"
#include "floq/lattice.hpp"

namespace floq {

// One hand-transcribed detecting-region table.
struct TableFixture {
  int number = 0;
  ScheduleKind schedule;
  std::string plan;  // none | fold_h | fold_s | fold_sqrt_x
  std::vector<std::string> cols;
  struct Row {
    Colour colour;
    bool persistent;
    int birth_col;  // -1 for persistent
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;
};

std::vector<TableFixture> load_table_fixtures(const std::string& path);

// Renders the detecting-region evolution for one fixture on the honeycomb
// lattice and diffs it cell by cell. Empty result = exact match.
std::vector<std::string> check_table(const ColouredLattice& lat,
                                     const TableFixture& fixture);

// Render without diffing (for inspection).
std::vector<std::vector<std::string>> render_table(const ColouredLattice& lat,
                                                   const TableFixture& fixture);

}  // namespace floq
