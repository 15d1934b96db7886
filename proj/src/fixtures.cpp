#include "floq/fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace floq {

namespace {

Colour colour_from_word(const std::string& w) {
  if (w == "red") return Colour::Red;
  if (w == "green") return Colour::Green;
  if (w == "blue") return Colour::Blue;
  throw std::invalid_argument("bad colour word: " + w);
}

}  // namespace

std::vector<TableFixture> load_table_fixtures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture file: " + path);
  std::vector<TableFixture> tables;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word) || word[0] == '#') continue;
    if (word == "table") {
      tables.emplace_back();
      ls >> tables.back().number;
    } else if (word == "schedule") {
      std::string s;
      ls >> s;
      tables.back().schedule = s == "css6" ? ScheduleKind::Period6Css : ScheduleKind::Period3;
    } else if (word == "plan") {
      ls >> tables.back().plan;
    } else if (word == "cols") {
      std::string c;
      while (ls >> c) tables.back().cols.push_back(c);
    } else if (word == "row") {
      TableFixture::Row row;
      std::string colour, kind, birth, sep;
      ls >> colour >> kind >> birth >> sep;
      row.colour = colour_from_word(colour);
      row.persistent = kind == "P";
      row.birth_col = row.persistent ? -1 : std::stoi(birth);
      std::string cell;
      while (ls >> cell) row.cells.push_back(cell);
      tables.back().rows.push_back(std::move(row));
    }
  }
  return tables;
}

namespace {

struct ColSpec {
  bool is_gate;
  SubRoundSpec sr{};      // measurement columns
  int gate_layer = 0;     // 0 = layer1, 1 = layer2
};

struct TableContext {
  const ColouredLattice& lat;
  Schedule sched;
  GatePlan plan;         // empty for memory tables
  std::optional<ZxDuality> tau;
  std::vector<ColSpec> cols;       // the table window
  std::vector<ColSpec> extension;  // schedule continuation for lookahead
};

SubRoundSpec parse_subround(const std::string& label) {
  return {colour_from_char(label[0]), pauli_from_char(label[1])};
}

TableContext build_context(const ColouredLattice& lat, const TableFixture& fx) {
  TableContext ctx{lat,
                   fx.schedule == ScheduleKind::Period6Css ? Schedule::css6()
                                                           : Schedule::period3(),
                   {},
                   std::nullopt,
                   {},
                   {}};
  if (fx.plan != "none") {
    ctx.tau = find_zx_duality(lat);
    if (!ctx.tau) throw std::runtime_error("no duality for plan " + fx.plan);
    if (fx.plan == "fold_h") ctx.plan = fold_hadamard(lat, *ctx.tau);
    else if (fx.plan == "fold_s") ctx.plan = fold_s(lat, *ctx.tau);
    else if (fx.plan == "fold_sqrt_x") ctx.plan = fold_sqrt_x(lat, *ctx.tau);
    else throw std::invalid_argument("unknown plan: " + fx.plan);
  }
  size_t sched_idx = SIZE_MAX;
  for (const std::string& label : fx.cols) {
    if (label == "H") {
      ctx.cols.push_back({true, {}, 0});
    } else if (label == "SWAP") {
      ctx.cols.push_back({true, {}, 1});
    } else if (label == "S/CZ" || label == "SQRT_X/XCX") {
      ctx.cols.push_back({true, {}, 0});
    } else {
      SubRoundSpec sr = parse_subround(label);
      if (sched_idx == SIZE_MAX) {
        for (size_t i = 0; i < ctx.sched.period(); i++) {
          if (ctx.sched.sub_rounds[i].colour == sr.colour &&
              ctx.sched.sub_rounds[i].basis == sr.basis)
            sched_idx = i;
        }
      } else {
        sched_idx = (sched_idx + 1) % ctx.sched.period();
        const SubRoundSpec& want = ctx.sched.sub_rounds[sched_idx];
        if (want.colour != sr.colour || want.basis != sr.basis)
          throw std::logic_error("fixture columns disagree with the schedule");
      }
      ctx.cols.push_back({false, sr, 0});
    }
  }
  for (size_t k = 1; k <= 3 * ctx.sched.period(); k++) {
    ctx.extension.push_back(
        {false, ctx.sched.sub_rounds[(sched_idx + k) % ctx.sched.period()], 0});
  }
  return ctx;
}

std::vector<PauliString> layer_checks(const ColouredLattice& lat, const SubRoundSpec& sr) {
  std::vector<PauliString> out;
  for (const LatticeEdge& e : lat.edges) {
    if (e.colour != sr.colour) continue;
    out.push_back(PauliString::from_terms({{e.a, sr.basis}, {e.b, sr.basis}}));
  }
  return out;
}

const std::vector<CliffordGate>& gate_layer(const TableContext& ctx, int layer) {
  return layer == 0 ? ctx.plan.steps.at(0).layer1 : ctx.plan.steps.at(0).layer2;
}

// Product of the layer checks whose edges lie fully inside `side`.
PauliString side_fold(const ColouredLattice& lat, const SubRoundSpec& sr,
                      const std::set<uint32_t>& side) {
  PauliString f;
  for (const LatticeEdge& e : lat.edges) {
    if (e.colour != sr.colour) continue;
    if (side.count(e.a) && side.count(e.b)) {
      f = f.times(PauliString::from_terms({{e.a, sr.basis}, {e.b, sr.basis}}));
    }
  }
  return f;
}

// Index of the first future layer whose checks anticommute with `op`
// (conjugating through future gate columns); large when it never dies.
size_t survival(const TableContext& ctx, size_t next_col, PauliString op) {
  size_t idx = 0;
  auto probe = [&](const ColSpec& col) -> std::optional<size_t> {
    if (col.is_gate) {
      for (const CliffordGate& g : gate_layer(ctx, col.gate_layer)) op.conjugate(g);
      return std::nullopt;
    }
    for (const PauliString& c : layer_checks(ctx.lat, col.sr)) {
      if (!op.commutes_with(c)) return idx;
    }
    idx++;
    return std::nullopt;
  };
  for (size_t k = next_col; k < ctx.cols.size(); k++) {
    if (auto died = probe(ctx.cols[k])) return *died;
  }
  for (const ColSpec& col : ctx.extension) {
    if (auto died = probe(col)) return *died;
  }
  return 1000000;
}

struct RegionSim {
  PauliString op;
  std::set<uint32_t> home;
  bool seeded = false;
};

std::string half_letter(const PauliString& op, const std::set<uint32_t>& in_home,
                        bool home_side) {
  Pauli letter = Pauli::I;
  bool any = false, uniform = true;
  for (const auto& t : op.terms()) {
    bool is_home = in_home.count(t.qubit) != 0;
    if (is_home != home_side) continue;
    if (!any) letter = t.p;
    uniform &= t.p == letter;
    any = true;
  }
  if (!any) return "";
  if (!uniform) return "?";
  return std::string(1, pauli_char(letter));
}

std::vector<std::string> render_row(const TableContext& ctx, const TableFixture& fx,
                                    const TableFixture::Row& row) {
  const ColouredLattice& lat = ctx.lat;
  // home plaquette: first of the row's colour whose dual image is disjoint
  uint32_t home_pi = UINT32_MAX;
  for (size_t pi = 0; pi < lat.plaquettes.size(); pi++) {
    if (lat.plaquettes[pi].colour != row.colour) continue;
    if (ctx.tau) {
      bool overlap = false;
      for (uint32_t q : lat.plaquettes[pi].cycle) {
        for (uint32_t qq : lat.plaquettes[pi].cycle) overlap |= ctx.tau->map[q] == qq;
      }
      if (overlap) continue;
    }
    home_pi = (uint32_t)pi;
    break;
  }
  if (home_pi == UINT32_MAX) throw std::runtime_error("no bulk plaquette for row");
  RegionSim sim;
  for (uint32_t q : lat.plaquettes[home_pi].cycle) sim.home.insert(q);

  auto seed = [&](Pauli letter) {
    std::vector<PauliString::Term> ts;
    for (uint32_t q : sim.home) ts.push_back({q, letter});
    sim.op = PauliString::from_terms(std::move(ts));
    sim.seeded = true;
  };
  if (row.persistent) seed(pauli_from_char(row.cells.at(0)[0]));

  bool greedy = fx.schedule == ScheduleKind::Period3;
  std::vector<std::string> out;
  for (size_t col = 0; col < ctx.cols.size(); col++) {
    const ColSpec& cs = ctx.cols[col];
    if (cs.is_gate) {
      if (sim.seeded) {
        for (const CliffordGate& g : gate_layer(ctx, cs.gate_layer)) sim.op.conjugate(g);
      }
      out.push_back(sim.seeded ? half_letter(sim.op, sim.home, true) +
                                     (half_letter(sim.op, sim.home, false).empty()
                                          ? ""
                                          : half_letter(sim.op, sim.home, false) + "t")
                               : ".");
      continue;
    }
    if (!sim.seeded && !row.persistent && (int)col == row.birth_col) {
      seed(cs.sr.basis);
      out.push_back(std::string(1, pauli_char(cs.sr.basis)));
      continue;
    }
    if (!sim.seeded) {
      out.push_back(".");
      continue;
    }
    // fold decision
    std::set<uint32_t> tail;
    for (const auto& t : sim.op.terms()) {
      if (!sim.home.count(t.qubit)) tail.insert(t.qubit);
    }
    std::set<uint32_t> home_now;
    for (const auto& t : sim.op.terms()) {
      if (sim.home.count(t.qubit)) home_now.insert(t.qubit);
    }
    PauliString fh = side_fold(lat, cs.sr, home_now);
    PauliString ft = side_fold(lat, cs.sr, tail);
    bool had_home = !home_now.empty(), had_tail = !tail.empty();
    PauliString before = sim.op;
    if (greedy) {
      // period-3 rendering folds every fully-contained check in; persistent
      // rows protect their core
      if (!ft.is_identity()) sim.op = sim.op.times(ft);
      if (!row.persistent && !fh.is_identity()) sim.op = sim.op.times(fh);
    } else {
      // CSS rendering folds only when the unfolded form would be destroyed
      // sooner (survival lookahead); ties keep the less-folded form
      std::vector<PauliString> cands = {before};
      if (!fh.is_identity()) cands.push_back(before.times(fh));
      if (!ft.is_identity()) cands.push_back(before.times(ft));
      if (!fh.is_identity() && !ft.is_identity())
        cands.push_back(before.times(fh).times(ft));
      size_t best = 0, best_score = 0;
      for (size_t i = 0; i < cands.size(); i++) {
        size_t score =
            cands[i].is_identity() ? 2000000 : survival(ctx, col + 1, cands[i]);
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      sim.op = cands[best];
    }
    // render
    std::string hs = half_letter(sim.op, sim.home, true);
    std::string ts = half_letter(sim.op, sim.home, false);
    if (hs.empty() && had_home) hs = "I";
    if (ts.empty() && had_tail) ts = "I";
    std::string cell = hs + (ts.empty() ? "" : ts + "t");
    if (cell.empty()) {
      cell = ".";
      sim.seeded = sim.op.weight() > 0;
    }
    out.push_back(cell);
    if (sim.op.is_identity()) sim.seeded = false;
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> render_table(const ColouredLattice& lat,
                                                   const TableFixture& fx) {
  TableContext ctx = build_context(lat, fx);
  std::vector<std::vector<std::string>> out;
  for (const auto& row : fx.rows) out.push_back(render_row(ctx, fx, row));
  return out;
}

std::vector<std::string> check_table(const ColouredLattice& lat,
                                     const TableFixture& fx) {
  std::vector<std::string> diffs;
  auto rendered = render_table(lat, fx);
  for (size_t r = 0; r < fx.rows.size(); r++) {
    for (size_t c = 0; c < fx.cols.size(); c++) {
      std::string want = c < fx.rows[r].cells.size() ? fx.rows[r].cells[c] : ".";
      std::string got = c < rendered[r].size() ? rendered[r][c] : ".";
      if (got != want) {
        std::ostringstream os;
        os << "table " << fx.number << " row " << r << " col " << c << " (" << fx.cols[c]
           << "): got " << got << " want " << want;
        diffs.push_back(os.str());
      }
    }
  }
  return diffs;
}

}  // namespace floq
