#include "floq/gates.hpp"

#include <set>
#include <stdexcept>

#include "doctest.h"

using namespace floq;

namespace {

const Schedule& css() {
  static Schedule s = Schedule::css6();
  return s;
}

void check_plan(const GatePlan& plan, const ColouredLattice& lat,
                const LogicalAction& want, bool brute = true) {
  CHECK(plan.claimed == want);
  ActionCheck v = verify_logical_action(plan, lat, css());
  CHECK(v.matches_claim);
  CHECK(v.measured == want);
  if (brute) {
    CHECK(brute_logical_action(plan, lat, css()) == want);
  }
}

}  // namespace

TEST_CASE("logical action algebra") {
  auto H = LogicalAction::h_both();
  auto S = LogicalAction::s_both();
  auto C10 = LogicalAction::cnot(1, 0);
  CHECK(H.then(H) == LogicalAction::identity());
  CHECK(S.then(S).then(S).then(S) == LogicalAction::identity());
  CHECK(C10.then(C10) == LogicalAction::identity());
  // S^2 = Z at the symplectic level is the identity; composition is checked
  // through the H sandwich instead: S HH S = S S
  CHECK(S.then(H).then(H).then(S) == S.then(S));
}

TEST_CASE("fold gates on the honeycomb") {
  for (uint32_t d : {2u, 3u}) {
    ColouredLattice lat = build_honeycomb_torus(d);
    auto tau = find_zx_duality(lat);
    REQUIRE(tau.has_value());
    check_plan(fold_hadamard(lat, *tau), lat, LogicalAction::h_both());
    check_plan(fold_s(lat, *tau), lat, LogicalAction::s_both());
    check_plan(fold_sqrt_x(lat, *tau), lat, LogicalAction::sqrt_x_both());
  }
}

TEST_CASE("applying fold_s twice squares to Z0 Z1 symplectically") {
  // S^2 acts as Z on each qubit: trivial at the symplectic level
  auto S = LogicalAction::s_both();
  CHECK(S.then(S) == LogicalAction::identity());
}

TEST_CASE("fold gates on the periodic 488") {
  ColouredLattice lat = build_488_torus(2);
  auto tau = find_zx_duality(lat);
  REQUIRE(tau.has_value());
  CHECK_FALSE(tau->swaps_classes);
  check_plan(fold_hadamard(lat, *tau), lat, LogicalAction::swap_h_both());
  check_plan(fold_s(lat, *tau), lat, LogicalAction::cz());
}

TEST_CASE("edge swap gadget rewrites the chain and conjugates checks") {
  ColouredLattice lat = build_honeycomb_torus(3);
  auto loops = find_twist_loops(lat, Homology::Horizontal);
  REQUIRE(!loops.empty());
  // find a (red, following blue) junction on the anchor loop
  const auto& slots = loops[0].slots;
  size_t k = 0;
  while (!(slots[k].colour == Colour::Red &&
           slots[(k + 1) % slots.size()].colour == Colour::Blue))
    k++;
  uint32_t a = slots[k].first, b = slots[k].second;
  uint32_t c = slots[(k + 1) % slots.size()].first, d = slots[(k + 1) % slots.size()].second;

  GadgetResult g = edge_swap_gadget(lat, {a, b, c, d});
  CHECK(validate_colouring(g.lattice_after).empty());
  CHECK(g.lattice_after.edges.size() == lat.edges.size());

  auto conj_through = [&](PauliString p) {
    for (const auto& gate : g.layer1) p.conjugate(gate);
    for (const auto& gate : g.layer2) p.conjugate(gate);
    return p;
  };
  auto plq_op = [&](const ColouredLattice& l, uint32_t q, Colour col, Pauli letter) {
    std::vector<PauliString::Term> ts;
    for (uint32_t qq : l.plaquettes[l.plaquette_of(q, col)].cycle)
      ts.push_back({qq, letter});
    return PauliString::from_terms(std::move(ts));
  };

  // the blue plaquette containing (a, b, c) loses the red pair; its
  // neighbour through d gains it
  PauliString zb = plq_op(lat, c, Colour::Blue, Pauli::Z);
  CHECK(zb.at(a) == Pauli::Z);
  CHECK(zb.at(b) == Pauli::Z);
  PauliString zb_after = conj_through(zb);
  CHECK(zb_after.at(a) == Pauli::I);
  CHECK(zb_after.at(b) == Pauli::I);
  CHECK(zb_after == plq_op(g.lattice_after, c, Colour::Blue, Pauli::Z));

  PauliString zb2 = plq_op(lat, d, Colour::Blue, Pauli::Z);
  PauliString zb2_after = conj_through(zb2);
  CHECK(zb2_after.at(a) == Pauli::Z);
  CHECK(zb2_after.at(b) == Pauli::Z);
  CHECK(zb2_after == plq_op(g.lattice_after, d, Colour::Blue, Pauli::Z));

  // red plaquettes exchange the blue pair
  PauliString xr = plq_op(lat, b, Colour::Red, Pauli::X);
  CHECK(conj_through(xr) == plq_op(g.lattice_after, b, Colour::Red, Pauli::X));

  // green plaquettes and blue edge checks are untouched
  for (Pauli letter : {Pauli::X, Pauli::Z}) {
    PauliString gp = plq_op(lat, a, Colour::Green, letter);
    CHECK(conj_through(gp) == gp);
  }
  PauliString zedge = PauliString::from_terms({{c, Pauli::Z}, {d, Pauli::Z}});
  CHECK(conj_through(zedge) == zedge);

  CHECK_THROWS_AS(edge_swap_gadget(lat, {c, d, a, b}), std::invalid_argument&);
}

TEST_CASE("linear dehn twists on the honeycomb") {
  for (uint32_t d : {2u, 3u}) {
    ColouredLattice lat = build_honeycomb_torus(d);
    GatePlan h = dehn_twist_linear(lat, Homology::Horizontal);
    CHECK(h.gadget_count == d * d);
    CHECK(h.rounds_cost == d);
    CHECK(h.gadgets_per_stage == std::vector<size_t>(d, d));
    // the full twist restores the lattice exactly
    CHECK(h.steps.back().lattice_after == lat);
    CHECK(h.steps.back().relabel.empty());
    check_plan(h, lat, LogicalAction::cnot(1, 0), d == 2);

    GatePlan v = dehn_twist_linear(lat, Homology::Vertical);
    CHECK(v.gadget_count == d * d);
    check_plan(v, lat, LogicalAction::cnot(0, 1), d == 2);
  }
}

TEST_CASE("linear dehn twist on the 488 torus") {
  ColouredLattice lat = build_488_torus(4);
  GatePlan plan = dehn_twist_linear(lat, Homology::Horizontal);
  CHECK(plan.gadget_count == 16);
  CHECK(plan.rounds_cost == 5);
  CHECK(plan.gadgets_per_stage == std::vector<size_t>{2, 4, 4, 4, 2});
  CHECK(plan.steps.back().lattice_after == lat);
  ActionCheck v = verify_logical_action(plan, lat, css());
  CHECK(v.matches_claim);
}

TEST_CASE("instantaneous dehn twists") {
  for (uint32_t d : {2u, 3u}) {
    ColouredLattice lat = build_honeycomb_torus(d);
    GatePlan h = dehn_twist_instantaneous(lat, Homology::Horizontal, d);
    CHECK(h.rounds_cost == 1);
    CHECK(h.gadget_count == d * d);
    CHECK(h.steps.size() == 1);
    REQUIRE(!h.steps[0].relabel.empty());
    // relabelling composed with the twist restores the original lattice
    ColouredLattice relabelled = h.steps[0].lattice_after;
    for (LatticeEdge& e : relabelled.edges) {
      e.a = h.steps[0].relabel[e.a];
      e.b = h.steps[0].relabel[e.b];
      if (e.a > e.b) std::swap(e.a, e.b);
    }
    relabelled.rebuild();
    CHECK(relabelled == lat);
    check_plan(h, lat, LogicalAction::cnot(1, 0), d == 2);
    GatePlan v = dehn_twist_instantaneous(lat, Homology::Vertical, d);
    CHECK(v.rounds_cost == 1);
    check_plan(v, lat, LogicalAction::cnot(0, 1), d == 2);
  }
}

TEST_CASE("instantaneous twist with p=1 degenerates to the linear plan") {
  ColouredLattice lat = build_honeycomb_torus(2);
  GatePlan inst = dehn_twist_instantaneous(lat, Homology::Horizontal, 1);
  GatePlan lin = dehn_twist_linear(lat, Homology::Horizontal);
  CHECK(inst.gadget_count == lin.gadget_count);
  CHECK(inst.rounds_cost == lin.rounds_cost);
  CHECK(inst.steps.back().relabel.empty());
}

TEST_CASE("instantaneous 488 twist uses ceil(d/p)+1 rounds") {
  ColouredLattice lat = build_488_torus(4);
  GatePlan plan = dehn_twist_instantaneous(lat, Homology::Horizontal, 2);
  CHECK(plan.gadget_count == 16);
  CHECK(plan.rounds_cost == 3);  // d/p + 1
  ActionCheck v = verify_logical_action(plan, lat, css());
  CHECK(v.matches_claim);
}

TEST_CASE("steps_per_round trades rounds for distance") {
  ColouredLattice lat = build_honeycomb_torus(3);
  GatePlan dense = dehn_twist_linear(lat, Homology::Horizontal, 3);
  CHECK(dense.gadget_count == 9);
  CHECK(dense.rounds_cost == 1);
  ActionCheck v = verify_logical_action(dense, lat, css());
  CHECK(v.matches_claim);
}

TEST_CASE("empty plan verifies as the identity") {
  ColouredLattice lat = build_honeycomb_torus(2);
  GatePlan plan;
  plan.claimed = LogicalAction::identity();
  plan.name = "noop";
  ActionCheck v = verify_logical_action(plan, lat, css());
  CHECK(v.matches_claim);
  CHECK(brute_logical_action(plan, lat, css()) == LogicalAction::identity());
}

TEST_CASE("period-3 schedule automorphism and fold composition") {
  ColouredLattice lat = build_honeycomb_torus(2);
  Schedule p3 = Schedule::period3();
  // one plain QEC round exchanges X/Z within each homology class: the
  // automorphism is SWAP01 . (H0 x H1), which is not a logical Hadamard
  GatePlan round_only;
  round_only.name = "round";
  PlanStep st;
  st.lattice_after = lat;
  st.rounds_after = 1;
  round_only.steps.push_back(st);
  round_only.claimed = LogicalAction::swap_h_both();
  ActionCheck rv = verify_logical_action(round_only, lat, p3);
  CHECK(rv.matches_claim);
  CHECK(brute_logical_action(round_only, lat, p3) == LogicalAction::swap_h_both());
  CHECK_FALSE(rv.measured == LogicalAction::h_both());

  // fold gates compose with the automorphism of their trailing QEC round
  auto tau = find_zx_duality(lat);
  REQUIRE(tau.has_value());
  for (const GatePlan& plan :
       {fold_hadamard(lat, *tau), fold_s(lat, *tau), fold_sqrt_x(lat, *tau)}) {
    ActionCheck v = verify_logical_action(plan, lat, p3);
    CHECK(v.measured == plan.claimed.then(LogicalAction::swap_h_both()));
    CHECK(brute_logical_action(plan, lat, p3) == v.measured);
  }
}
