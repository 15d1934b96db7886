#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace floq {

enum class Colour : uint8_t { Red = 0, Green = 1, Blue = 2 };

char colour_char(Colour c);
Colour colour_from_char(char c);
// The colour that is neither a nor b.
Colour third_colour(Colour a, Colour b);

enum class LatticeKind : uint8_t { Honeycomb, Square488, Rotated488 };

struct LatticeEdge {
  uint32_t a, b;  // a < b
  Colour colour;
  bool operator==(const LatticeEdge&) const = default;
};

struct PlaquetteFace {
  Colour colour;
  std::vector<uint32_t> cycle;  // boundary qubits in cyclic order, canonical
};

// Trivalent, 3-face-colourable graph on a torus. Faces are derived, not
// stored as ground truth: the plaquettes of colour c are exactly the cycles
// of the subgraph using the other two edge colours.
class ColouredLattice {
 public:
  LatticeKind kind;
  uint32_t d = 0;
  uint32_t n_qubits = 0;
  std::vector<LatticeEdge> edges;                    // sorted by (a, b)
  std::vector<PlaquetteFace> plaquettes;             // sorted by (colour, min qubit)
  std::vector<std::array<int32_t, 3>> edge_at;       // [qubit][colour] -> edge idx
  std::vector<std::pair<double, double>> coords;     // embedding for dumps
  std::array<std::pair<double, double>, 2> periods{{{0, 0}, {0, 0}}};  // torus translations

  // Recompute plaquettes and per-qubit tables from `edges`.
  void rebuild();

  int32_t edge_index(uint32_t a, uint32_t b) const;
  uint32_t neighbour(uint32_t q, Colour c) const;
  // Index into `plaquettes` of the colour-c face containing qubit q.
  uint32_t plaquette_of(uint32_t q, Colour c) const;

  // Replace green edges: `removed` and `added` as qubit pairs.
  ColouredLattice with_green_rewiring(
      const std::vector<std::pair<uint32_t, uint32_t>>& removed,
      const std::vector<std::pair<uint32_t, uint32_t>>& added) const;

  std::string dump() const;  // QUBIT/EDGE/PLAQ lines

  bool operator==(const ColouredLattice& o) const {
    return kind == o.kind && d == o.d && n_qubits == o.n_qubits &&
           edges == o.edges;
  }

 private:
  std::vector<int32_t> plaq_of_;  // [qubit*3 + colour]
};

ColouredLattice build_honeycomb_torus(uint32_t d);
ColouredLattice build_488_torus(uint32_t d);      // d even, throws otherwise
ColouredLattice build_rotated_488(uint32_t d);    // periodic boundaries only

// Empty report means every invariant holds.
std::vector<std::string> validate_colouring(const ColouredLattice& lat);

struct ZxDuality {
  std::vector<uint32_t> map;          // involution on qubits
  std::vector<uint32_t> fixed_points;
  // True when the duality exchanges the two twist-loop homology classes
  // (this is what makes the honeycomb fold a plain H0 (x) H1).
  bool swaps_classes = false;
};

enum class Homology : uint8_t { Horizontal = 0, Vertical = 1 };

struct HomologyLoop {
  std::vector<uint32_t> edge_ids;       // closed cyclic edge list, in order
  std::vector<Colour> colour_pattern;   // edge colours in order
  Homology homology_class;

  // Pair-slot view: the non-green pairs in loop order. Greens connect
  // consecutive slots (second of k to first of k+1).
  struct Slot {
    Colour colour;  // Red or Blue
    uint32_t first, second;
  };
  std::vector<Slot> slots;
  std::vector<uint32_t> qubits_cyclic() const;
  uint32_t min_qubit() const;
};

// Every maximal family member of the requested class, ordered for parallel
// application (sorted by minimum qubit index).
std::vector<HomologyLoop> find_twist_loops(const ColouredLattice& lat,
                                           Homology h);

// True when odd positions are all green, even positions non-green, and both
// red and blue appear.
bool is_twist_eligible_pattern(const std::vector<Colour>& pattern);

// All colour-respecting involutions (red<->blue, green->green); the lattice
// kinds here only admit the geometric reflections/inversions.
std::vector<ZxDuality> find_all_zx_dualities(const ColouredLattice& lat);
// Preferred duality: class-swapping when one exists, else class-preserving.
std::optional<ZxDuality> find_zx_duality(const ColouredLattice& lat);

// Non-contractibility over GF(2): the loop's edge set is outside the space
// spanned by plaquette boundaries.
bool loop_is_noncontractible(const ColouredLattice& lat,
                             const HomologyLoop& loop);

}  // namespace floq
