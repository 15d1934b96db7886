#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "floq/gates.hpp"
#include "floq/isg.hpp"
#include "floq/lattice.hpp"
#include "floq/pauli.hpp"

namespace floq {

enum class OpCode : uint8_t {
  QubitCoords,
  ResetZ,
  ResetX,
  Gate,
  Dep1,
  Dep2,
  MeasureZ,   // one record
  MeasureX,   // one record
  Mpp,        // noiseless pauli product, one record
  Tick,
  Detector,
  Observable,
};

struct Instruction {
  OpCode op;
  GateKind gate = GateKind::H;
  double p = 0;
  std::vector<uint32_t> targets;
  std::vector<Pauli> letters;        // Mpp letters, aligned with targets
  bool neg = false;                  // Mpp sign
  std::vector<int64_t> rec_offsets;  // Detector/Observable (negative)
  std::vector<double> coords;        // QubitCoords / Detector
  uint32_t obs_index = 0;
  bool expected_odd = false;

  bool operator==(const Instruction&) const = default;
};

// Fig.-16-style protocol circuit: ordered instruction list with detector and
// observable annotations and a deterministic text form.
struct Circuit {
  uint32_t n_qubits = 0;
  uint32_t n_measurements = 0;
  uint32_t n_detectors = 0;
  uint32_t n_observables = 0;
  std::vector<Instruction> instrs;
  std::string metadata;  // free-form key=value line

  std::string emit_text() const;
  static Circuit parse_text(const std::string& text);
  // 1:1 translation to the de-facto external stabilizer-circuit format
  std::string emit_stim() const;

  bool operator==(const Circuit&) const = default;
};

enum class ProtocolKind : uint8_t {
  Memory2d1,
  Memory3d,
  FoldH,
  FoldS,
  FoldSqrtX,
  DehnLinearH,
  DehnLinearV,
  DehnInstH,
  DehnInstV,
};

const char* protocol_kind_name(ProtocolKind k);
std::optional<ProtocolKind> protocol_kind_from_name(const std::string& s);

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::Memory2d1;
  LatticeKind lattice = LatticeKind::Honeycomb;
  uint32_t d = 3;
  double eps = 0;
  Pauli basis0 = Pauli::X;  // prepared basis of logical qubit 0 (X or Z)
  Pauli basis1 = Pauli::X;
};

Circuit build_protocol_circuit(const ProtocolSpec& spec);

// Fig.-17 auxiliary-free check circuit for one measurement layer, appended
// to `c`; returns the first record index used.
uint32_t expand_check_layer(Circuit& c, const ColouredLattice& lat, Colour colour,
                            Pauli basis, double eps);

// Exact noiseless execution on the dense tableau: every detector must come
// out at its expected parity and every observable deterministic.
struct ReplayResult {
  bool all_detectors_deterministic = false;
  size_t n_detectors = 0;
  size_t odd_detectors = 0;  // parity disagreements
  std::vector<bool> observable_values;
  std::vector<bool> observables_deterministic;
};
ReplayResult replay_noiseless(const Circuit& c, uint64_t seed = 7);

}  // namespace floq
