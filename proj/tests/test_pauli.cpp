#include "floq/pauli.hpp"

#include <random>
#include <stdexcept>

#include "doctest.h"

using namespace floq;

namespace {

PauliString rand_pauli(std::mt19937& rng, uint32_t n, int max_weight) {
  std::uniform_int_distribution<int> wd(0, max_weight);
  std::uniform_int_distribution<uint32_t> qd(0, n - 1);
  std::uniform_int_distribution<int> pd(1, 3);
  std::uniform_int_distribution<int> sd(0, 1);
  int w = wd(rng);
  std::vector<PauliString::Term> terms;
  for (int i = 0; i < w; i++) {
    uint32_t q = qd(rng);
    bool dup = false;
    for (auto& t : terms) dup |= t.qubit == q;
    if (dup) continue;
    terms.push_back({q, (Pauli)pd(rng)});
  }
  return PauliString::from_terms(std::move(terms), sd(rng) == 1);
}

std::vector<CliffordGate> all_gates_on(uint32_t a, uint32_t b) {
  return {
      CliffordGate::one(GateKind::H, a),
      CliffordGate::one(GateKind::S, a),
      CliffordGate::one(GateKind::SQRT_X, a),
      CliffordGate::two(GateKind::CNOT, a, b),
      CliffordGate::two(GateKind::CZ, a, b),
      CliffordGate::two(GateKind::XCX, a, b),
      CliffordGate::two(GateKind::SWAP, a, b),
  };
}

// Inverse as a gate sequence (S and SQRT_X are order 4).
std::vector<CliffordGate> inverse_of(const CliffordGate& g) {
  switch (g.kind) {
    case GateKind::S:
    case GateKind::SQRT_X:
      return {g, g, g};
    default:
      return {g};
  }
}

}  // namespace

TEST_CASE("pauli text form round trips") {
  for (const char* s : {"+X0*X1*Z5", "-Y3", "+I", "-Z0*Y17*X40"}) {
    CHECK(PauliString::parse(s).str() == s);
  }
}

TEST_CASE("multiply basics") {
  auto X0 = PauliString::single(0, Pauli::X);
  auto Z0 = PauliString::single(0, Pauli::Z);
  CHECK_THROWS_AS(X0.times(Z0), std::logic_error&);

  auto X0X1 = PauliString::parse("+X0*X1");
  auto X1X2 = PauliString::parse("+X1*X2");
  CHECK(X0X1.times(X1X2).str() == "+X0*X2");

  CHECK(Z0.times(Z0).str() == "+I");

  // X0*Z0*Z0*X0 = identity with sign +1 once the i phases cancel
  PauliAccumulator acc;
  for (const PauliString& f : {X0, Z0, Z0, X0}) acc.mul(f);
  PauliString p = acc.finish();
  CHECK(p.is_identity());
  CHECK_FALSE(p.negative());
}

TEST_CASE("cnot conjugation matches the standard relations") {
  auto conj = [](const char* in, GateKind k, uint32_t a, uint32_t b) {
    PauliString p = PauliString::parse(in);
    p.conjugate(CliffordGate::two(k, a, b));
    return p.str();
  };
  CHECK(conj("+X0", GateKind::CNOT, 0, 1) == "+X0*X1");
  CHECK(conj("+Z1", GateKind::CNOT, 0, 1) == "+Z0*Z1");
  CHECK(conj("+X1", GateKind::CNOT, 0, 1) == "+X1");
  CHECK(conj("+Z0", GateKind::CNOT, 0, 1) == "+Z0");
}

TEST_CASE("hadamard and s conjugation") {
  PauliString p = PauliString::single(2, Pauli::X);
  p.conjugate(CliffordGate::one(GateKind::H, 2));
  CHECK(p.str() == "+Z2");
  p.conjugate(CliffordGate::one(GateKind::H, 2));
  CHECK(p.str() == "+X2");
  PauliString y = PauliString::single(2, Pauli::Y);
  y.conjugate(CliffordGate::one(GateKind::H, 2));
  CHECK(y.str() == "-Y2");

  PauliString x = PauliString::single(0, Pauli::X);
  x.conjugate(CliffordGate::one(GateKind::S, 0));
  CHECK(x.str() == "+Y0");
  x.conjugate(CliffordGate::one(GateKind::S, 0));
  CHECK(x.str() == "-X0");
}

TEST_CASE("xcx equals H-conjugated CZ") {
  auto xcx_direct = [](const char* in) {
    PauliString p = PauliString::parse(in);
    p.conjugate(CliffordGate::two(GateKind::XCX, 0, 1));
    return p;
  };
  auto xcx_composed = [](const char* in) {
    PauliString p = PauliString::parse(in);
    for (auto g : {CliffordGate::one(GateKind::H, 0), CliffordGate::one(GateKind::H, 1),
                   CliffordGate::two(GateKind::CZ, 0, 1),
                   CliffordGate::one(GateKind::H, 0), CliffordGate::one(GateKind::H, 1)})
      p.conjugate(g);
    return p;
  };
  for (const char* in : {"+X0", "+Z0", "+Y0", "+X1", "+Z1", "+Y1", "+Y0*Y1",
                         "+X0*Z1", "-Z0*Z1"}) {
    CHECK(xcx_direct(in) == xcx_composed(in));
  }
  CHECK(xcx_direct("+Z0").str() == "+Z0*X1");
  CHECK(xcx_direct("+Z1").str() == "+X0*Z1");
}

TEST_CASE("conjugation preserves commutation, fuzz") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; trial++) {
    PauliString p = rand_pauli(rng, 6, 4);
    PauliString q = rand_pauli(rng, 6, 4);
    bool before = p.commutes_with(q);
    for (const CliffordGate& g : all_gates_on(trial % 6, (trial + 1) % 6)) {
      PauliString pc = p, qc = q;
      pc.conjugate(g);
      qc.conjugate(g);
      CHECK(pc.commutes_with(qc) == before);
    }
  }
}

TEST_CASE("gate followed by its inverse is the identity map") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; trial++) {
    PauliString p = rand_pauli(rng, 4, 3);
    for (const CliffordGate& g : all_gates_on(trial % 4, (trial + 2) % 4)) {
      PauliString q = p;
      q.conjugate(g);
      for (const CliffordGate& inv : inverse_of(g)) q.conjugate(inv);
      CHECK(q == p);
    }
  }
}

TEST_CASE("group solver vs exhaustive subset oracle") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 60; trial++) {
    const uint32_t n = 5;
    std::uniform_int_distribution<int> gd(1, 8);
    int ng = gd(rng);
    std::vector<PauliString> gens;
    for (int i = 0; i < ng; i++) gens.push_back(rand_pauli(rng, n, 3));

    // pick a random subset product as target (skip subsets whose product
    // carries an i phase; those cannot describe a hermitian target)
    std::uniform_int_distribution<uint32_t> md(0, (1u << ng) - 1);
    uint32_t mask = md(rng);
    PauliAccumulator acc;
    for (int i = 0; i < ng; i++) {
      if (mask & (1u << i)) acc.mul(gens[i]);
    }
    if (acc.phase_mod4() & 1) continue;
    PauliString target = acc.finish();

    GroupSolver solver(n, gens);
    auto d = solver.decompose(target);
    REQUIRE(d.has_value());
    CHECK_FALSE(d->imaginary);
    // Rebuild the product from the returned indices, ascending order.
    PauliAccumulator re;
    for (uint32_t i : d->gen_indices) re.mul(gens[i]);
    PauliString rebuilt = re.finish();
    CHECK(rebuilt.same_letters(target));
    CHECK((rebuilt.negative() != target.negative()) == d->negated);

    // oracle: exhaustive subsets agree on word membership (letters only)
    auto letters_of = [&](uint32_t m) {
      std::vector<uint8_t> ls(n, 0);
      for (int i = 0; i < ng; i++) {
        if (!(m & (1u << i))) continue;
        for (const auto& t : gens[i].terms()) ls[t.qubit] ^= (uint8_t)t.p;
      }
      return ls;
    };
    for (int probe = 0; probe < 10; probe++) {
      PauliString w = rand_pauli(rng, n, 3);
      std::vector<uint8_t> want(n, 0);
      for (const auto& t : w.terms()) want[t.qubit] = (uint8_t)t.p;
      bool found = false;
      for (uint32_t m = 0; m < (1u << ng) && !found; m++) {
        found = letters_of(m) == want;
      }
      CHECK(solver.contains_word(w) == found);
    }
  }
}

TEST_CASE("identity decomposes to the empty subset") {
  std::vector<PauliString> gens = {PauliString::parse("+X0*X1"),
                                   PauliString::parse("+Z1*Z2")};
  GroupSolver solver(3, gens);
  auto d = solver.decompose(PauliString::identity());
  REQUIRE(d.has_value());
  CHECK(d->gen_indices.empty());
  CHECK_FALSE(d->negated);
}

TEST_CASE("anticommuting generator does not block membership") {
  // p anticommutes with gens[2] but lies in the span of gens[0], gens[1]
  std::vector<PauliString> gens = {PauliString::parse("+X0*X1"),
                                   PauliString::parse("+X1*X2"),
                                   PauliString::parse("+Z0")};
  GroupSolver solver(3, gens);
  auto d = solver.decompose(PauliString::parse("+X0*X2"));
  REQUIRE(d.has_value());
  CHECK(d->gen_indices == std::vector<uint32_t>{0, 1});
}
