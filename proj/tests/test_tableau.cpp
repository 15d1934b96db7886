#include "floq/tableau.hpp"

#include <random>

#include "doctest.h"

using namespace floq;

TEST_CASE("fresh tableau stabilises all-zeros") {
  Tableau t(3);
  for (uint32_t q = 0; q < 3; q++) {
    auto v = t.deterministic_value(PauliString::single(q, Pauli::Z));
    REQUIRE(v.has_value());
    CHECK_FALSE(*v);
  }
  CHECK_FALSE(t.deterministic_value(PauliString::single(0, Pauli::X)).has_value());
}

TEST_CASE("bell pair correlations") {
  Tableau t(2);
  t.apply(CliffordGate::one(GateKind::H, 0));
  t.apply(CliffordGate::two(GateKind::CNOT, 0, 1));
  CHECK(t.deterministic_value(PauliString::parse("+X0*X1")) == false);
  CHECK(t.deterministic_value(PauliString::parse("+Z0*Z1")) == false);
  CHECK(t.deterministic_value(PauliString::parse("-Y0*Y1")) == false);
  CHECK_FALSE(t.deterministic_value(PauliString::parse("+Z0")).has_value());

  // measuring Z0 randomly collapses; afterward Z0 and Z1 agree
  t.set_coin([] { return true; });
  auto m = t.measure(PauliString::parse("+Z0"));
  CHECK_FALSE(m.deterministic);
  CHECK(m.value);
  CHECK(t.deterministic_value(PauliString::parse("+Z1")) == true);
}

TEST_CASE("pauli frames flip signs") {
  Tableau t(1);
  t.apply_pauli(PauliString::single(0, Pauli::X));
  CHECK(t.deterministic_value(PauliString::single(0, Pauli::Z)) == true);
  t.reset(0, Pauli::Z);
  CHECK(t.deterministic_value(PauliString::single(0, Pauli::Z)) == false);
}

TEST_CASE("tableau conjugation agrees with pauli string conjugation") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pd(1, 3);
  std::uniform_int_distribution<int> gd(0, 6);
  const uint32_t n = 4;
  for (int trial = 0; trial < 300; trial++) {
    // random starting stabilizer: products of single-qubit paulis on |0..0>
    // conjugated by a random circuit via both paths
    std::vector<CliffordGate> circuit;
    for (int k = 0; k < 6; k++) {
      uint32_t a = rng() % n, b = (a + 1 + rng() % (n - 1)) % n;
      switch (gd(rng)) {
        case 0: circuit.push_back(CliffordGate::one(GateKind::H, a)); break;
        case 1: circuit.push_back(CliffordGate::one(GateKind::S, a)); break;
        case 2: circuit.push_back(CliffordGate::one(GateKind::SQRT_X, a)); break;
        case 3: circuit.push_back(CliffordGate::two(GateKind::CNOT, a, b)); break;
        case 4: circuit.push_back(CliffordGate::two(GateKind::CZ, a, b)); break;
        case 5: circuit.push_back(CliffordGate::two(GateKind::XCX, a, b)); break;
        default: circuit.push_back(CliffordGate::two(GateKind::SWAP, a, b)); break;
      }
    }
    Tableau t(n);
    for (const auto& g : circuit) t.apply(g);
    // U Z_q U^dag must be deterministic with value 0 on U|0...0>
    for (uint32_t q = 0; q < n; q++) {
      PauliString p = PauliString::single(q, Pauli::Z);
      for (const auto& g : circuit) p.conjugate(g);
      auto v = t.deterministic_value(p);
      REQUIRE(v.has_value());
      CHECK_FALSE(*v);
    }
  }
}

TEST_CASE("negative-sign probes invert the reported value") {
  Tableau t(1);
  CHECK(t.deterministic_value(PauliString::parse("+Z0")) == false);
  CHECK(t.deterministic_value(PauliString::parse("-Z0")) == true);
}

TEST_CASE("repeated measurement is stable") {
  Tableau t(3);
  std::mt19937 rng(17);
  t.set_coin([&] { return (rng() & 1) == 1; });
  for (const auto& g :
       {CliffordGate::one(GateKind::H, 0), CliffordGate::two(GateKind::CNOT, 0, 1),
        CliffordGate::two(GateKind::CNOT, 1, 2), CliffordGate::one(GateKind::S, 2)}) {
    t.apply(g);
  }
  PauliString p = PauliString::parse("+Z0*Y1");
  auto first = t.measure(p);
  for (int k = 0; k < 5; k++) {
    auto again = t.measure(p);
    CHECK(again.deterministic);
    CHECK(again.value == first.value);
  }
}
