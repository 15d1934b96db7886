#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "floq/lattice.hpp"
#include "floq/pauli.hpp"

namespace floq {

enum class ScheduleKind : uint8_t { Period6Css, Period3 };

struct SubRoundSpec {
  Colour colour;
  Pauli basis;
};

struct Schedule {
  ScheduleKind kind;
  std::vector<SubRoundSpec> sub_rounds;

  static Schedule css6();     // rXX gZZ bXX rZZ gXX bZZ
  static Schedule period3();  // rXX gYY bZZ
  size_t period() const { return sub_rounds.size(); }
  std::string name(size_t i) const;  // e.g. "rXX"
};

struct DetectorEvent {
  std::vector<uint32_t> records;  // sorted measurement indices
  bool expected_odd = false;      // noiseless parity of the records
  double x = 0, y = 0;
  uint64_t sub_round = 0;
  Pauli basis = Pauli::I;
};

struct TrackedElement {
  PauliString op;
  std::vector<uint32_t> records;  // sorted; parity fixes op's eigenvalue
  uint64_t birth = 0;
};

struct CheckInput {
  PauliString op;     // the two-qubit (or general) measured Pauli, +1 sign
  uint32_t m_index;   // measurement record index
  double x = 0, y = 0;
};

// Instantaneous stabiliser group with per-element measurement-record sets.
// Elements pairwise commute; replaying recorded parities in a noiseless run
// reproduces each element's sign.
class TrackedIsg {
 public:
  explicit TrackedIsg(uint32_t n_qubits);

  uint32_t n_qubits() const { return n_; }
  const std::vector<TrackedElement>& elements() const { return elems_; }
  const std::vector<TrackedElement>& observables() const { return obs_; }

  void apply_reset(uint32_t q, Pauli basis);  // fresh |0> or |+> stabilizer
  void add_observable(PauliString op);

  // One measurement sub-round. Checks must pairwise commute. Throws when a
  // logical observable cannot be restored to commuting form.
  std::vector<DetectorEvent> apply_checks(std::span<const CheckInput> checks);

  // Transversal layer: targets must be disjoint within the layer.
  void apply_gate_layer(std::span<const CliffordGate> gates);

  // Deterministic Pauli applied to the state: flips signs of anticommuting
  // tracked operators (used for check-circuit residual frames).
  void apply_pauli(const PauliString& p);

  // Noiseless relabelling: qubit q becomes perm[q].
  void permute(std::span<const uint32_t> perm);

  uint64_t sub_round_counter() const { return sub_rounds_; }

  // Detectors whose minimized record sets stay above the cap are global
  // parity relations (e.g. the product of two whole measurement layers on a
  // torus); they are suppressed like in the reference circuit generators,
  // keeping fault mechanisms graph-like. Default: no cap.
  void set_record_cap(size_t cap) { record_cap_ = cap; }

  bool group_contains(const PauliString& p) const;
  size_t group_rank() const;

  // Canonical family snapshot: membership probes for edge checks, uniform
  // plaquette checks, and (with tau) two-plaquette composites. Tags look
  // like "edge:bZ", "plaq:rX", "plaq2:bZ:rX"; counts are per family.
  std::vector<std::pair<std::string, size_t>> snapshot_stabilizers(
      const ColouredLattice& lat,
      const std::vector<uint32_t>* tau = nullptr) const;

 private:
  uint32_t n_;
  std::vector<TrackedElement> elems_;
  std::vector<TrackedElement> obs_;
  uint64_t birth_counter_ = 0;
  uint64_t sub_rounds_ = 0;
  size_t record_cap_ = SIZE_MAX;
  // recent detectors, kept to reduce freshly derived record sets to their
  // sparsest form (suppresses global-parity contamination)
  std::vector<std::pair<std::vector<uint32_t>, bool>> recent_events_;
  std::vector<std::pair<std::vector<uint32_t>, bool>> layer_sums_;
  void prune_dependent();
  void minimize_event(DetectorEvent& ev) const;
};

// Convenience: all colour-c edges measured in basis p, canonical edge order.
// Measurement indices are m0, m0+1, ...
std::vector<CheckInput> edge_checks(const ColouredLattice& lat, Colour c,
                                    Pauli p, uint32_t m0);

}  // namespace floq
