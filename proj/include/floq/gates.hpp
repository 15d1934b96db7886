#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floq/isg.hpp"
#include "floq/lattice.hpp"
#include "floq/pauli.hpp"

namespace floq {

// Symplectic map on the two logical qubits. Basis order X0, Z0, X1, Z1;
// each column is the image as a 4-bit word in the same order. Pauli phases
// are outside this description.
struct LogicalAction {
  std::array<uint8_t, 4> cols{1, 2, 4, 8};

  static LogicalAction identity() { return {}; }
  static LogicalAction h_both();       // H0 (x) H1
  static LogicalAction s_both();       // S0 (x) S1
  static LogicalAction sqrt_x_both();  // sqrtX0 (x) sqrtX1
  static LogicalAction swap_h_both();  // SWAP01 . (H0 (x) H1)
  static LogicalAction cz();           // CZ01
  static LogicalAction xcx();          // XCX01
  static LogicalAction cnot(int control, int target);

  LogicalAction then(const LogicalAction& after) const;
  bool operator==(const LogicalAction&) const = default;
  std::string str() const;
};

// Logical representatives at the bZZ -> rXX seam. Z0 and X1 run along the
// vertical twist-loop class, X0 and Z1 along the horizontal one; X strings
// are support-disjoint from the parallel Z strings so product-state
// preparation can fix both.
struct LogicalBasis {
  PauliString ops[4];  // X0, Z0, X1, Z1
  const PauliString& x0() const { return ops[0]; }
  const PauliString& z0() const { return ops[1]; }
  const PauliString& x1() const { return ops[2]; }
  const PauliString& z1() const { return ops[3]; }
};

LogicalBasis build_logical_basis(const ColouredLattice& lat, const Schedule& sched);

// One plan step: up to two transversal gate layers, the lattice in force
// afterwards, an optional noiseless relabelling (restoring the original
// lattice), and the number of QEC rounds that follow.
struct PlanStep {
  std::vector<CliffordGate> layer1;
  std::vector<CliffordGate> layer2;
  ColouredLattice lattice_after;
  std::vector<uint32_t> relabel;  // empty = none
  uint32_t rounds_after = 1;
};

struct GatePlan {
  std::vector<PlanStep> steps;
  LogicalAction claimed;
  uint32_t rounds_cost = 0;
  size_t gadget_count = 0;
  std::vector<size_t> gadgets_per_stage;
  std::string name;
};

GatePlan fold_hadamard(const ColouredLattice& lat, const ZxDuality& tau);
GatePlan fold_s(const ColouredLattice& lat, const ZxDuality& tau);
GatePlan fold_sqrt_x(const ColouredLattice& lat, const ZxDuality& tau);

// Four CNOTs across a g-r-g-b-g chain plus the green rewiring that swaps the
// red and blue pairs. `chain` is (a, b, c, d) with (a,b) the red edge and
// (c,d) the blue edge in path order.
struct GadgetResult {
  std::vector<CliffordGate> layer1, layer2;
  ColouredLattice lattice_after;
};
GadgetResult edge_swap_gadget(const ColouredLattice& lat,
                              std::array<uint32_t, 4> chain);

GatePlan dehn_twist_linear(const ColouredLattice& lat, Homology h,
                           uint32_t steps_per_round = 1);
// p parallel loops; p must divide d. p = 1 degenerates to the linear twist.
GatePlan dehn_twist_instantaneous(const ColouredLattice& lat, Homology h,
                                  uint32_t p);

struct ActionCheck {
  LogicalAction measured;
  bool matches_claim;
};

// Pushes the logical representatives through the plan with the ISG tracker
// and reduces the images against the final logical basis.
ActionCheck verify_logical_action(const GatePlan& plan, const ColouredLattice& lat,
                                  const Schedule& sched);

// Independent oracle: dense tableau simulation of eigenstate preparation,
// the full plan with measurements, and candidate-image probing.
LogicalAction brute_logical_action(const GatePlan& plan, const ColouredLattice& lat,
                                   const Schedule& sched, uint64_t seed = 12345);

}  // namespace floq
