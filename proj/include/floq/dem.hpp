#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floq/circuit.hpp"

namespace floq {

struct DemMechanism {
  double p = 0;
  std::vector<uint32_t> detectors;  // sorted
  uint32_t observables = 0;         // bitmask

  bool operator==(const DemMechanism&) const = default;
};

// Independent error mechanisms with their flipped detector/observable sets.
struct DetectorErrorModel {
  uint32_t n_detectors = 0;
  uint32_t n_observables = 0;
  std::vector<DemMechanism> mechanisms;  // canonically sorted
  bool graphlike = true;  // every mechanism flips at most two detectors
  std::vector<std::array<double, 4>> detector_coords;

  std::string emit_text() const;
  static DetectorErrorModel parse_text(const std::string& text);
};

// Propagates every elementary fault (each depolarizing component, each
// measurement flip) through the remaining circuit and merges identical
// symptoms. A fault that flips an observable but no detector throws unless
// `allow_undetectable` is set.
DetectorErrorModel build_dem(const Circuit& c, bool allow_undetectable = false);

// Elementary fault enumeration shared with the test hooks: the k-th fault of
// the circuit, propagated forward on a single Pauli frame.
struct FaultSymptom {
  std::vector<uint32_t> detectors;
  uint32_t observables = 0;
  double p = 0;
};
size_t count_faults(const Circuit& c);
FaultSymptom fault_symptom(const Circuit& c, size_t fault_index);

// Minimum number of mechanisms whose combined symptom flips an observable
// and no detector, searched exhaustively up to max_weight. nullopt = no such
// combination within the bound (distance > max_weight).
std::optional<uint32_t> dem_distance(const DetectorErrorModel& dem,
                                     uint32_t max_weight);

}  // namespace floq
