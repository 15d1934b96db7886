#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "floq/circuit.hpp"
#include "floq/dem.hpp"

namespace floq {

// Bit-packed detector/observable flip samples, one row per shot.
struct ShotBatch {
  uint64_t shots = 0;
  uint32_t n_detectors = 0;
  uint32_t n_observables = 0;
  std::vector<uint64_t> rows;  // per shot: det words then obs words

  size_t det_words() const { return (n_detectors + 63) / 64; }
  size_t obs_words() const { return (n_observables + 63) / 64; }
  size_t row_words() const { return det_words() + obs_words(); }

  void resize(uint64_t n_shots) {
    shots = n_shots;
    rows.assign(shots * row_words(), 0);
  }
  bool det(uint64_t shot, uint32_t d) const {
    return rows[shot * row_words() + d / 64] >> (d % 64) & 1;
  }
  bool obs(uint64_t shot, uint32_t k) const {
    return rows[shot * row_words() + det_words() + k / 64] >> (k % 64) & 1;
  }
  const uint64_t* det_row(uint64_t shot) const { return rows.data() + shot * row_words(); }

  // 16-byte header (magic+version, shots, detectors, observables), packed rows
  void write_binary(std::ostream& os) const;
  static ShotBatch read_binary(std::istream& is);
  void write_text(std::ostream& os) const;  // 0100... lines
};

// Deterministic counter-based generator: identical results for identical
// (seed, shot) regardless of threading or batch splits.
ShotBatch sample_circuit(const Circuit& c, uint64_t shots, uint64_t seed,
                         int threads = 1);
ShotBatch sample_dem(const DetectorErrorModel& dem, uint64_t shots, uint64_t seed,
                     int threads = 1);

}  // namespace floq
