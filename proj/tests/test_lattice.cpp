#include "floq/lattice.hpp"

#include <set>
#include <stdexcept>

#include "doctest.h"

using namespace floq;

TEST_CASE("honeycomb sizes") {
  CHECK(build_honeycomb_torus(7).n_qubits == 294);  // 3d x 2d at d = 7
  ColouredLattice l1 = build_honeycomb_torus(1);
  CHECK(l1.n_qubits == 6);
  CHECK(l1.edges.size() == 9);
  CHECK(l1.plaquettes.size() == 3);  // Euler: |F| = |E| - |V|
  std::set<Colour> cols;
  for (auto& p : l1.plaquettes) cols.insert(p.colour);
  CHECK(cols.size() == 3);
}

TEST_CASE("all builders validate") {
  for (uint32_t d : {1u, 2u, 3u, 5u}) {
    CHECK(validate_colouring(build_honeycomb_torus(d)).empty());
  }
  for (uint32_t d : {2u, 4u}) {
    CHECK(validate_colouring(build_488_torus(d)).empty());
  }
  for (uint32_t d : {1u, 2u, 3u}) {
    CHECK(validate_colouring(build_rotated_488(d)).empty());
  }
}

TEST_CASE("488 rejects odd d") {
  CHECK_THROWS_AS(build_488_torus(3), std::invalid_argument&);
  CHECK_THROWS_AS(build_488_torus(1), std::invalid_argument&);
}

TEST_CASE("plaquette counts per colour are equal") {
  for (const ColouredLattice& lat :
       {build_honeycomb_torus(3), build_488_torus(4), build_rotated_488(2)}) {
    size_t per[3] = {0, 0, 0};
    for (auto& p : lat.plaquettes) per[(uint8_t)p.colour]++;
    CHECK(per[0] == per[2]);  // red == blue always
    INFO("kind ", (int)lat.kind);
    CHECK((int64_t)lat.n_qubits - (int64_t)lat.edges.size() +
              (int64_t)lat.plaquettes.size() ==
          0);
  }
}

TEST_CASE("validate flags a recoloured edge") {
  ColouredLattice lat = build_honeycomb_torus(3);
  for (auto& e : lat.edges) {
    if (e.colour == Colour::Red) {
      e.colour = Colour::Blue;
      break;
    }
  }
  auto report = validate_colouring(lat);
  // two qubits lose their red edge and gain a second blue one
  CHECK(report.size() == 4);
}

TEST_CASE("honeycomb twist loops") {
  for (uint32_t d : {2u, 3u}) {
    ColouredLattice lat = build_honeycomb_torus(d);
    auto horiz = find_twist_loops(lat, Homology::Horizontal);
    auto vert = find_twist_loops(lat, Homology::Vertical);
    CHECK(horiz.size() == d);
    CHECK(vert.size() == d);
    for (auto& l : horiz) {
      CHECK(l.edge_ids.size() == 4 * d);
      // pattern (g, r, g, b)* up to rotation
      for (size_t k = 0; k < l.colour_pattern.size(); k += 2) {
        bool green_even = l.colour_pattern[0] == Colour::Green;
        CHECK(l.colour_pattern[k + (green_even ? 0 : 1)] == Colour::Green);
      }
      CHECK(is_twist_eligible_pattern(l.colour_pattern) ==
            (l.colour_pattern[0] == Colour::Green));
      CHECK(loop_is_noncontractible(lat, l));
    }
    // parallel loops are disjoint
    std::set<uint32_t> used;
    for (auto& l : horiz) {
      for (uint32_t q : l.qubits_cyclic()) {
        CHECK(used.insert(q).second);
      }
    }
  }
}

TEST_CASE("488 twist loop pattern contains r g r g b g b g") {
  ColouredLattice lat = build_488_torus(4);
  auto horiz = find_twist_loops(lat, Homology::Horizontal);
  auto vert = find_twist_loops(lat, Homology::Vertical);
  CHECK(horiz.size() == 2);  // d/2 parallel loops
  CHECK(vert.size() == 2);
  REQUIRE(!horiz.empty());
  const auto& pat = horiz[0].colour_pattern;
  CHECK(pat.size() == 16);
  // search the cyclic colour string for the subword r g r g b g b g
  std::string s;
  for (Colour c : pat) s += colour_char(c);
  s += s;
  CHECK(s.find("rgrgbgbg") != std::string::npos);
}

TEST_CASE("rotated 488 has twist loops") {
  ColouredLattice lat = build_rotated_488(2);
  auto horiz = find_twist_loops(lat, Homology::Horizontal);
  auto vert = find_twist_loops(lat, Homology::Vertical);
  CHECK(!horiz.empty());
  CHECK(!vert.empty());
  for (auto& l : horiz) CHECK(loop_is_noncontractible(lat, l));
}

TEST_CASE("invalid pattern query is rejected") {
  CHECK_FALSE(is_twist_eligible_pattern(
      {Colour::Red, Colour::Green, Colour::Blue, Colour::Red}));
  CHECK(is_twist_eligible_pattern(
      {Colour::Green, Colour::Red, Colour::Green, Colour::Blue}));
  // all-red loops cannot host the gadget
  CHECK_FALSE(is_twist_eligible_pattern(
      {Colour::Green, Colour::Red, Colour::Green, Colour::Red}));
}

TEST_CASE("zx duality on the honeycomb") {
  for (uint32_t d : {2u, 3u}) {
    ColouredLattice lat = build_honeycomb_torus(d);
    auto dual = find_zx_duality(lat);
    REQUIRE(dual.has_value());
    CHECK(dual->swaps_classes);  // honeycomb fold exchanges the loop classes
    for (uint32_t q = 0; q < lat.n_qubits; q++) {
      CHECK(dual->map[dual->map[q]] == q);
    }
    // plaquette action: red <-> blue bijection, green -> green
    for (auto& p : lat.plaquettes) {
      uint32_t q0 = dual->map[p.cycle[0]];
      Colour want = p.colour == Colour::Green
                        ? Colour::Green
                        : (p.colour == Colour::Red ? Colour::Blue : Colour::Red);
      uint32_t pi = lat.plaquette_of(q0, want);
      // every qubit of p maps into that single plaquette
      for (uint32_t q : p.cycle) {
        CHECK(lat.plaquette_of(dual->map[q], want) == pi);
      }
      CHECK(lat.plaquettes[pi].cycle.size() == p.cycle.size());
    }
  }
}

TEST_CASE("zx duality on the 488 torus preserves classes") {
  ColouredLattice lat = build_488_torus(4);
  auto dual = find_zx_duality(lat);
  REQUIRE(dual.has_value());
  CHECK_FALSE(dual->swaps_classes);
}

TEST_CASE("zx duality on the rotated 488") {
  for (uint32_t d : {1u, 2u}) {
    ColouredLattice lat = build_rotated_488(d);
    auto dual = find_zx_duality(lat);
    REQUIRE(dual.has_value());
  }
}

TEST_CASE("lattice dump round trips shape") {
  ColouredLattice lat = build_honeycomb_torus(2);
  std::string text = lat.dump();
  CHECK(text.find("QUBIT 0 ") == 0);
  CHECK(text.find("EDGE ") != std::string::npos);
  CHECK(text.find("PLAQ ") != std::string::npos);
}
