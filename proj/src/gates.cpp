#include "floq/gates.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>
#include <stdexcept>

#include "floq/tableau.hpp"

namespace floq {

// ---------------------------------------------------------------------------
// LogicalAction

namespace {
LogicalAction from_cols(uint8_t x0, uint8_t z0, uint8_t x1, uint8_t z1) {
  LogicalAction a;
  a.cols = {x0, z0, x1, z1};
  return a;
}
}  // namespace

// bit order: 1 = X0, 2 = Z0, 4 = X1, 8 = Z1
LogicalAction LogicalAction::h_both() { return from_cols(2, 1, 8, 4); }
LogicalAction LogicalAction::s_both() { return from_cols(3, 2, 12, 8); }
LogicalAction LogicalAction::sqrt_x_both() { return from_cols(1, 3, 4, 12); }
LogicalAction LogicalAction::swap_h_both() { return from_cols(8, 4, 2, 1); }
LogicalAction LogicalAction::cz() { return from_cols(1 | 8, 2, 4 | 2, 8); }
LogicalAction LogicalAction::xcx() { return from_cols(1, 2 | 4, 4, 8 | 1); }

LogicalAction LogicalAction::cnot(int control, int target) {
  // X_control -> X_control X_target, Z_target -> Z_control Z_target
  uint8_t xc = control == 0 ? 1 : 4, xt = target == 0 ? 1 : 4;
  uint8_t zc = control == 0 ? 2 : 8, zt = target == 0 ? 2 : 8;
  LogicalAction a;
  a.cols = {1, 2, 4, 8};
  a.cols[control == 0 ? 0 : 2] = xc | xt;
  a.cols[target == 0 ? 1 : 3] = zc | zt;
  return a;
}

LogicalAction LogicalAction::then(const LogicalAction& after) const {
  LogicalAction r;
  for (int i = 0; i < 4; i++) {
    uint8_t img = 0;
    for (int b = 0; b < 4; b++) {
      if (cols[i] & (1 << b)) img ^= after.cols[b];
    }
    r.cols[i] = img;
  }
  return r;
}

std::string LogicalAction::str() const {
  static const char* names[4] = {"X0", "Z0", "X1", "Z1"};
  std::ostringstream os;
  for (int i = 0; i < 4; i++) {
    os << names[i] << "->";
    bool any = false;
    for (int b = 0; b < 4; b++) {
      if (cols[i] & (1 << b)) {
        os << names[b];
        any = true;
      }
    }
    if (!any) os << "I";
    if (i < 3) os << " ";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Logical basis

namespace {

TrackedIsg warm_isg(const ColouredLattice& lat, const Schedule& sched) {
  TrackedIsg isg(lat.n_qubits);
  uint32_t m = 0;
  for (size_t i = 0; i < 2 * sched.period(); i++) {
    const SubRoundSpec& sr = sched.sub_rounds[i % sched.period()];
    auto checks = edge_checks(lat, sr.colour, sr.basis, m);
    m += (uint32_t)checks.size();
    isg.apply_checks(checks);
  }
  return isg;
}

PauliString uniform_on(const std::vector<uint32_t>& qubits, Pauli p) {
  std::vector<PauliString::Term> ts;
  for (uint32_t q : qubits) ts.push_back({q, p});
  return PauliString::from_terms(std::move(ts));
}

// Solve for an X-type string: commutes with every ISG element, has the
// requested parities against the two Z anchors, avoids `forbidden` qubits.
std::optional<PauliString> solve_x_string(uint32_t n,
                                          const std::vector<TrackedElement>& isg,
                                          const PauliString& anti_with,
                                          const PauliString& commute_with,
                                          const PauliString& forbidden) {
  struct Row {
    std::vector<uint64_t> v;
    bool rhs;
  };
  size_t words = (n + 63) / 64;
  std::vector<Row> rows;
  auto add_row = [&](const std::vector<uint32_t>& qs, bool rhs) {
    Row r{std::vector<uint64_t>(words, 0), rhs};
    for (uint32_t q : qs) r.v[q / 64] ^= 1ull << (q % 64);
    rows.push_back(std::move(r));
  };
  for (const TrackedElement& e : isg) {
    std::vector<uint32_t> qs;
    for (const auto& t : e.op.terms()) {
      if (t.p == Pauli::Z || t.p == Pauli::Y) qs.push_back(t.qubit);
    }
    add_row(qs, false);
  }
  auto supp = [](const PauliString& p) {
    std::vector<uint32_t> qs;
    for (const auto& t : p.terms()) qs.push_back(t.qubit);
    return qs;
  };
  add_row(supp(anti_with), true);
  add_row(supp(commute_with), false);
  for (const auto& t : forbidden.terms()) add_row({t.qubit}, false);

  // gaussian elimination for one particular solution
  std::vector<int32_t> pivot_col;
  std::vector<Row> echelon;
  for (Row& r : rows) {
    for (size_t k = 0; k < echelon.size(); k++) {
      uint32_t pc = pivot_col[k];
      if (r.v[pc / 64] & (1ull << (pc % 64))) {
        for (size_t w = 0; w < words; w++) r.v[w] ^= echelon[k].v[w];
        r.rhs = r.rhs != echelon[k].rhs;
      }
    }
    int32_t lead = -1;
    for (size_t w = 0; w < words && lead < 0; w++) {
      if (r.v[w]) lead = (int32_t)(w * 64 + __builtin_ctzll(r.v[w]));
    }
    if (lead < 0) {
      if (r.rhs) return std::nullopt;  // inconsistent
      continue;
    }
    // normalise earlier rows
    for (size_t k = 0; k < echelon.size(); k++) {
      if (echelon[k].v[lead / 64] & (1ull << (lead % 64))) {
        for (size_t w = 0; w < words; w++) echelon[k].v[w] ^= r.v[w];
        echelon[k].rhs = echelon[k].rhs != r.rhs;
      }
    }
    pivot_col.push_back(lead);
    echelon.push_back(std::move(r));
  }
  std::vector<uint64_t> sol(words, 0);
  for (size_t k = 0; k < echelon.size(); k++) {
    if (echelon[k].rhs) sol[pivot_col[k] / 64] ^= 1ull << (pivot_col[k] % 64);
  }
  std::vector<PauliString::Term> terms;
  for (uint32_t q = 0; q < n; q++) {
    if (sol[q / 64] & (1ull << (q % 64))) terms.push_back({q, Pauli::X});
  }
  return PauliString::from_terms(std::move(terms));
}

}  // namespace

LogicalBasis build_logical_basis(const ColouredLattice& lat, const Schedule& sched) {
  auto horiz = find_twist_loops(lat, Homology::Horizontal);
  auto vert = find_twist_loops(lat, Homology::Vertical);
  if (horiz.empty() || vert.empty())
    throw std::runtime_error("lattice has no twist loops for a logical basis");
  TrackedIsg isg = warm_isg(lat, sched);

  LogicalBasis basis;
  basis.ops[1] = uniform_on(vert[0].qubits_cyclic(), Pauli::Z);   // Z0
  basis.ops[3] = uniform_on(horiz[0].qubits_cyclic(), Pauli::Z);  // Z1
  for (const TrackedElement& e : isg.elements()) {
    if (!e.op.commutes_with(basis.ops[1]) || !e.op.commutes_with(basis.ops[3]))
      throw std::logic_error("twist-loop Z string fails to commute with the isg");
  }
  auto x0 = solve_x_string(lat.n_qubits, isg.elements(), basis.ops[1], basis.ops[3],
                           basis.ops[3]);
  auto x1 = solve_x_string(lat.n_qubits, isg.elements(), basis.ops[3], basis.ops[1],
                           basis.ops[1]);
  // tiny lattices may not admit support-disjoint representatives; mixed-basis
  // preparation is then unavailable but the basis itself still exists
  if (!x0)
    x0 = solve_x_string(lat.n_qubits, isg.elements(), basis.ops[1], basis.ops[3], {});
  if (!x1)
    x1 = solve_x_string(lat.n_qubits, isg.elements(), basis.ops[3], basis.ops[1], {});
  if (!x0 || !x1) throw std::runtime_error("no logical X representative found");
  basis.ops[0] = *x0;
  basis.ops[2] = *x1;
  return basis;
}

// ---------------------------------------------------------------------------
// Fold plans

namespace {

GatePlan make_fold(const ColouredLattice& lat, const ZxDuality& tau,
                   std::vector<CliffordGate> layer1, std::vector<CliffordGate> layer2,
                   LogicalAction claimed, std::string name) {
  GatePlan plan;
  PlanStep step;
  step.layer1 = std::move(layer1);
  step.layer2 = std::move(layer2);
  step.lattice_after = lat;
  step.rounds_after = 1;
  plan.steps.push_back(std::move(step));
  plan.claimed = claimed;
  plan.rounds_cost = 1;
  plan.name = std::move(name);
  (void)tau;
  return plan;
}

}  // namespace

GatePlan fold_hadamard(const ColouredLattice& lat, const ZxDuality& tau) {
  std::vector<CliffordGate> hs, swaps;
  for (uint32_t q = 0; q < lat.n_qubits; q++) hs.push_back(CliffordGate::one(GateKind::H, q));
  for (uint32_t q = 0; q < lat.n_qubits; q++) {
    if (q < tau.map[q]) swaps.push_back(CliffordGate::two(GateKind::SWAP, q, tau.map[q]));
  }
  return make_fold(lat, tau, std::move(hs), std::move(swaps),
                   tau.swaps_classes ? LogicalAction::h_both()
                                     : LogicalAction::swap_h_both(),
                   "fold_h");
}

GatePlan fold_s(const ColouredLattice& lat, const ZxDuality& tau) {
  std::vector<CliffordGate> layer;
  for (uint32_t q : tau.fixed_points) layer.push_back(CliffordGate::one(GateKind::S, q));
  for (uint32_t q = 0; q < lat.n_qubits; q++) {
    if (q < tau.map[q]) layer.push_back(CliffordGate::two(GateKind::CZ, q, tau.map[q]));
  }
  return make_fold(lat, tau, std::move(layer), {},
                   tau.swaps_classes ? LogicalAction::s_both() : LogicalAction::cz(),
                   "fold_s");
}

GatePlan fold_sqrt_x(const ColouredLattice& lat, const ZxDuality& tau) {
  std::vector<CliffordGate> layer;
  for (uint32_t q : tau.fixed_points)
    layer.push_back(CliffordGate::one(GateKind::SQRT_X, q));
  for (uint32_t q = 0; q < lat.n_qubits; q++) {
    if (q < tau.map[q]) layer.push_back(CliffordGate::two(GateKind::XCX, q, tau.map[q]));
  }
  return make_fold(lat, tau, std::move(layer), {},
                   tau.swaps_classes ? LogicalAction::sqrt_x_both()
                                     : LogicalAction::xcx(),
                   "fold_sqrt_x");
}

// ---------------------------------------------------------------------------
// Edge-swapping gadget and Dehn twists

GadgetResult edge_swap_gadget(const ColouredLattice& lat, std::array<uint32_t, 4> chain) {
  auto [a, b, c, d] = chain;
  int32_t er = lat.edge_index(a, b), eg = lat.edge_index(b, c), eb = lat.edge_index(c, d);
  if (er < 0 || lat.edges[er].colour != Colour::Red ||
      eg < 0 || lat.edges[eg].colour != Colour::Green ||
      eb < 0 || lat.edges[eb].colour != Colour::Blue) {
    throw std::invalid_argument("gadget chain is not g-r-g-b-g coloured");
  }
  uint32_t x = lat.neighbour(a, Colour::Green);
  uint32_t y = lat.neighbour(d, Colour::Green);
  GadgetResult res;
  res.layer1 = {CliffordGate::two(GateKind::CNOT, a, c),
                CliffordGate::two(GateKind::CNOT, b, d)};
  res.layer2 = {CliffordGate::two(GateKind::CNOT, a, d),
                CliffordGate::two(GateKind::CNOT, b, c)};
  res.lattice_after = lat.with_green_rewiring({{x, a}, {b, c}, {d, y}},
                                              {{x, c}, {d, a}, {b, y}});
  return res;
}

namespace {

// Slot with a stable id so red/blue pair passings can be counted: a full
// twist swaps every red pair past every blue pair exactly once.
struct IdSlot {
  Colour colour;
  uint32_t first, second;
  uint32_t id;
};
using Slots = std::vector<IdSlot>;

struct LoopState {
  Slots slots;
  std::set<std::pair<uint32_t, uint32_t>> done;  // (red id, blue id)
  size_t budget = 0;                             // remaining pair passings
};

struct StageResult {
  std::vector<CliffordGate> layer1, layer2;
  size_t gadgets = 0;
};

std::vector<std::pair<uint32_t, uint32_t>> loop_links(const Slots& slots) {
  std::vector<std::pair<uint32_t, uint32_t>> links;
  for (size_t k = 0; k < slots.size(); k++) {
    links.push_back({slots[k].second, slots[(k + 1) % slots.size()].first});
  }
  return links;
}

// One twist stage: swap fresh (red, following blue) adjacent pairs on each
// loop, at most the remaining budget, and rewire the loop greens. With a
// budget smaller than the available junctions the subset is chosen by
// `pick_mask` over the fresh junction list.
StageResult apply_stage(ColouredLattice& lat, std::vector<LoopState>& loops,
                        uint64_t pick_mask = ~0ull) {
  StageResult out;
  std::vector<std::pair<uint32_t, uint32_t>> removed, added;
  for (LoopState& loop : loops) {
    Slots& slots = loop.slots;
    size_t n = slots.size();
    std::vector<size_t> fresh;
    std::vector<bool> used(n, false);
    for (size_t k = 0; k < n; k++) {
      size_t k2 = (k + 1) % n;
      if (slots[k].colour == Colour::Red && slots[k2].colour == Colour::Blue &&
          !used[k] && !used[k2] &&
          !loop.done.count({slots[k].id, slots[k2].id})) {
        fresh.push_back(k);
        used[k] = used[k2] = true;
      }
    }
    std::vector<size_t> junctions;
    for (size_t i = 0; i < fresh.size(); i++) {
      if (junctions.size() >= loop.budget) break;
      if (pick_mask & (1ull << (i % 64))) junctions.push_back(fresh[i]);
    }
    if (junctions.empty()) continue;
    loop.budget -= junctions.size();
    for (auto& l : loop_links(slots)) removed.push_back(l);
    for (size_t k : junctions) {
      size_t k2 = (k + 1) % n;
      uint32_t ra = slots[k].first, rb = slots[k].second;
      uint32_t bc = slots[k2].first, bd = slots[k2].second;
      out.layer1.push_back(CliffordGate::two(GateKind::CNOT, ra, bc));
      out.layer1.push_back(CliffordGate::two(GateKind::CNOT, rb, bd));
      out.layer2.push_back(CliffordGate::two(GateKind::CNOT, ra, bd));
      out.layer2.push_back(CliffordGate::two(GateKind::CNOT, rb, bc));
      loop.done.insert({slots[k].id, slots[k2].id});
      std::swap(slots[k], slots[k2]);
      out.gadgets++;
    }
    for (auto& l : loop_links(slots)) added.push_back(l);
  }
  if (out.gadgets) lat = lat.with_green_rewiring(removed, added);
  return out;
}

std::optional<std::vector<uint32_t>> find_relabelling(const ColouredLattice& from,
                                                      const ColouredLattice& to) {
  for (uint32_t image0 = 0; image0 < from.n_qubits; image0++) {
    std::vector<uint32_t> map(from.n_qubits, UINT32_MAX);
    map[0] = image0;
    std::vector<uint32_t> stack = {0};
    bool ok = true;
    while (!stack.empty() && ok) {
      uint32_t q = stack.back();
      stack.pop_back();
      for (int c = 0; c < 3 && ok; c++) {
        uint32_t nq = from.neighbour(q, (Colour)c);
        uint32_t nm = to.neighbour(map[q], (Colour)c);
        if (map[nq] == UINT32_MAX) {
          map[nq] = nm;
          stack.push_back(nq);
        } else if (map[nq] != nm) {
          ok = false;
        }
      }
    }
    if (!ok) continue;
    // totality + bijectivity
    std::vector<bool> hit(from.n_qubits, false);
    bool good = true;
    for (uint32_t q = 0; q < from.n_qubits && good; q++) {
      good = map[q] < from.n_qubits && !hit[map[q]];
      if (good) hit[map[q]] = true;
    }
    if (good) return map;
  }
  return std::nullopt;
}

GatePlan twist_plan(const ColouredLattice& lat, Homology h, uint32_t p,
                    uint32_t steps_per_round, bool instantaneous) {
  std::vector<HomologyLoop> family = find_twist_loops(lat, h);
  if (family.empty()) throw std::invalid_argument("no twist-eligible loops");
  if (instantaneous) {
    if (p == 0 || p > family.size())
      throw std::invalid_argument("parallel loop count out of range");
  } else {
    p = 1;
  }
  std::vector<LoopState> loops;
  for (uint32_t i = 0; i < p; i++) {
    LoopState st;
    size_t nr = 0, nb = 0;
    for (size_t k = 0; k < family[i].slots.size(); k++) {
      const auto& sl = family[i].slots[k];
      st.slots.push_back({sl.colour, sl.first, sl.second, (uint32_t)k});
      (sl.colour == Colour::Red ? nr : nb)++;
    }
    if ((nr * nb) % p != 0)
      throw std::invalid_argument("parallel loop count must divide the twist budget");
    st.budget = nr * nb / p;
    loops.push_back(std::move(st));
  }

  GatePlan plan;
  plan.name = instantaneous ? "dehn_inst" : "dehn_linear";
  ColouredLattice current = lat;
  const size_t stage_cap = 8 * (size_t)lat.d + 8;
  auto budget_left = [&] {
    size_t total = 0;
    for (const LoopState& l : loops) total += l.budget;
    return total;
  };
  while (budget_left() > 0) {
    ColouredLattice before = current;
    std::vector<LoopState> loops_before = loops;
    StageResult st = apply_stage(current, loops);
    if (st.gadgets == 0) throw std::logic_error("twist stage found no junctions");
    // A final partial stage must leave the lattice a relabelled copy of the
    // original; retry junction subsets if the canonical prefix fails.
    if (budget_left() == 0 && !(current == lat) &&
        !find_relabelling(current, lat)) {
      bool fixed = false;
      for (uint64_t mask = 1; mask < 64 && !fixed; mask++) {
        current = before;
        loops = loops_before;
        StageResult retry = apply_stage(current, loops, mask);
        if (retry.gadgets == 0 || budget_left() != 0) continue;
        if (current == lat || find_relabelling(current, lat)) {
          st = std::move(retry);
          fixed = true;
        }
      }
      if (!fixed) throw std::logic_error("twist closure subset not found");
    }
    plan.gadgets_per_stage.push_back(st.gadgets);
    plan.gadget_count += st.gadgets;
    PlanStep step;
    step.layer1 = std::move(st.layer1);
    step.layer2 = std::move(st.layer2);
    step.lattice_after = current;
    step.rounds_after = 0;
    plan.steps.push_back(std::move(step));
    if (plan.steps.size() > stage_cap) throw std::logic_error("twist failed to close");
  }
  if (!instantaneous && !(current == lat))
    throw std::logic_error("linear twist did not restore the lattice");
  if (!(current == lat)) {
    auto perm = find_relabelling(current, lat);
    if (!perm) throw std::logic_error("twisted lattice is not a relabelled original");
    plan.steps.back().relabel = *perm;
  }
  // one QEC round after every `steps_per_round` stages, always one at the end
  uint32_t rounds = 0;
  for (size_t i = 0; i < plan.steps.size(); i++) {
    bool boundary = ((i + 1) % steps_per_round == 0) || i + 1 == plan.steps.size();
    plan.steps[i].rounds_after = boundary ? 1 : 0;
    rounds += plan.steps[i].rounds_after;
  }
  plan.rounds_cost = rounds;
  bool horizontal = h == Homology::Horizontal;
  plan.claimed = horizontal ? LogicalAction::cnot(1, 0) : LogicalAction::cnot(0, 1);
  plan.name += horizontal ? "_h" : "_v";
  return plan;
}

}  // namespace

GatePlan dehn_twist_linear(const ColouredLattice& lat, Homology h,
                           uint32_t steps_per_round) {
  return twist_plan(lat, h, 1, steps_per_round, false);
}

GatePlan dehn_twist_instantaneous(const ColouredLattice& lat, Homology h, uint32_t p) {
  return twist_plan(lat, h, p, 1, true);
}

// ---------------------------------------------------------------------------
// Action verification

namespace {

void run_qec_round(TrackedIsg& isg, const ColouredLattice& lat, const Schedule& sched,
                   uint32_t& m_counter) {
  for (size_t i = 0; i < sched.period(); i++) {
    const SubRoundSpec& sr = sched.sub_rounds[i];
    auto checks = edge_checks(lat, sr.colour, sr.basis, m_counter);
    m_counter += (uint32_t)checks.size();
    isg.apply_checks(checks);
  }
}

}  // namespace

ActionCheck verify_logical_action(const GatePlan& plan, const ColouredLattice& lat,
                                  const Schedule& sched) {
  LogicalBasis basis = build_logical_basis(lat, sched);
  TrackedIsg isg(lat.n_qubits);
  uint32_t m = 0;
  for (size_t i = 0; i < 2 * sched.period(); i++) {
    const SubRoundSpec& sr = sched.sub_rounds[i % sched.period()];
    auto checks = edge_checks(lat, sr.colour, sr.basis, m);
    m += (uint32_t)checks.size();
    isg.apply_checks(checks);
  }
  for (int i = 0; i < 4; i++) isg.add_observable(basis.ops[i]);

  ColouredLattice current = lat;
  for (const PlanStep& step : plan.steps) {
    if (!step.layer1.empty()) isg.apply_gate_layer(step.layer1);
    if (!step.layer2.empty()) isg.apply_gate_layer(step.layer2);
    current = step.lattice_after;
    if (!step.relabel.empty()) {
      isg.permute(step.relabel);
      current = lat;
    }
    for (uint32_t r = 0; r < step.rounds_after; r++) {
      run_qec_round(isg, current, sched, m);
    }
  }
  if (!(current == lat))
    throw std::logic_error("plan does not restore the lattice");

  // Express each evolved observable over [isg elements | basis ops].
  GroupSolver solver(lat.n_qubits);
  for (const TrackedElement& e : isg.elements()) solver.add_generator(e.op);
  size_t n_elems = isg.elements().size();
  for (int i = 0; i < 4; i++) solver.add_generator(basis.ops[i]);
  LogicalAction measured;
  for (int i = 0; i < 4; i++) {
    auto dec = solver.decompose(isg.observables()[i].op);
    if (!dec)
      throw std::runtime_error("observable does not reduce to the logical basis");
    uint8_t word = 0;
    for (uint32_t gi : dec->gen_indices) {
      if (gi >= n_elems) word ^= 1 << (gi - n_elems);
    }
    measured.cols[i] = word;
  }
  return {measured, measured == plan.claimed};
}

LogicalAction brute_logical_action(const GatePlan& plan, const ColouredLattice& lat,
                                   const Schedule& sched, uint64_t seed) {
  LogicalBasis basis = build_logical_basis(lat, sched);
  // complements used to disambiguate the image of each prepared generator
  const int comp[4][2] = {{3, 2}, {3, 2}, {1, 0}, {1, 0}};

  auto run_once = [&](int input, int fix) -> uint16_t {
    Tableau t(lat.n_qubits);
    uint64_t state = seed + 0x9e3779b97f4a7c15ull * (input * 4 + fix + 1);
    t.set_coin([state]() mutable {
      state ^= state >> 12;
      state ^= state << 25;
      state ^= state >> 27;
      return ((state * 0x2545F4914F6CDD1Dull) >> 63) != 0;
    });
    uint32_t mc = 0;
    auto round = [&](const ColouredLattice& l) {
      for (size_t i = 0; i < sched.period(); i++) {
        const SubRoundSpec& sr = sched.sub_rounds[i];
        for (const CheckInput& ci : edge_checks(l, sr.colour, sr.basis, mc)) {
          t.measure(ci.op);
        }
      }
    };
    round(lat);
    round(lat);
    t.measure(basis.ops[input]);
    t.measure(basis.ops[fix]);
    ColouredLattice current = lat;
    for (const PlanStep& step : plan.steps) {
      for (const CliffordGate& g : step.layer1) t.apply(g);
      for (const CliffordGate& g : step.layer2) t.apply(g);
      current = step.lattice_after;
      if (!step.relabel.empty()) {
        t.permute(step.relabel);
        current = lat;
      }
      for (uint32_t r = 0; r < step.rounds_after; r++) round(current);
    }
    // probe all nontrivial logical words (letters only: Hermitian
    // representative with + sign; determinism does not depend on the sign)
    uint16_t det_mask = 0;
    for (uint8_t w = 1; w < 16; w++) {
      std::vector<Pauli> letters(lat.n_qubits, Pauli::I);
      for (int b = 0; b < 4; b++) {
        if (!(w & (1 << b))) continue;
        for (const auto& term : basis.ops[b].terms()) {
          letters[term.qubit] = (Pauli)((uint8_t)letters[term.qubit] ^ (uint8_t)term.p);
        }
      }
      std::vector<PauliString::Term> terms;
      for (uint32_t q = 0; q < lat.n_qubits; q++) {
        if (letters[q] != Pauli::I) terms.push_back({q, letters[q]});
      }
      PauliString probe = PauliString::from_terms(std::move(terms));
      if (t.deterministic_value(probe).has_value()) det_mask |= 1 << w;
    }
    return det_mask;
  };

  LogicalAction out;
  for (int input = 0; input < 4; input++) {
    uint16_t common = run_once(input, comp[input][0]) & run_once(input, comp[input][1]);
    int hits = 0;
    uint8_t word = 0;
    for (uint8_t w = 1; w < 16; w++) {
      if (common & (1 << w)) {
        hits++;
        word = w;
      }
    }
    if (hits != 1)
      throw std::runtime_error("oracle image ambiguous (" + std::to_string(hits) + ")");
    out.cols[input] = word;
  }
  return out;
}

}  // namespace floq
