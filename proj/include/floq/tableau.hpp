#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <functional>
#include <vector>

#include "floq/pauli.hpp"

namespace floq {

// Dense stabilizer tableau (destabilizers + stabilizers + signs). This is
// the ground-truth simulator for the verification suite; it shares no code
// with the sparse tracker on purpose.
class Tableau {
 public:
  explicit Tableau(uint32_t n);  // |0...0>

  uint32_t n_qubits() const { return n_; }

  void apply(const CliffordGate& g);
  void apply_pauli(const PauliString& p);

  struct MeasureResult {
    bool value;
    bool deterministic;
  };
  // Projective measurement of a Hermitian Pauli. Random outcomes are drawn
  // from `coin` (defaults to always +1).
  MeasureResult measure(const PauliString& p);
  void set_coin(std::function<bool()> coin) { coin_ = std::move(coin); }

  // Deterministic-without-disturbing probe: value present iff +-p is in the
  // stabilizer group.
  std::optional<bool> deterministic_value(const PauliString& p) const;

  void reset(uint32_t q, Pauli basis);  // collapse to |0> / |+> / |+i>

  // Noiseless relabelling: qubit q becomes perm[q].
  void permute(std::span<const uint32_t> perm);

 private:
  uint32_t n_;
  size_t words_;
  // row 0..n-1: destabilizers, n..2n-1: stabilizers
  std::vector<std::vector<uint64_t>> xs_, zs_;
  std::vector<uint8_t> sign_;  // i^sign per row, mod 4 (destabilizers may be odd)
  std::function<bool()> coin_;

  bool anticommutes(size_t row, const std::vector<uint64_t>& px,
                    const std::vector<uint64_t>& pz) const;
  void rowsum_into(std::vector<uint64_t>& hx, std::vector<uint64_t>& hz,
                   int& phase2, size_t i) const;  // (hx,hz,phase) *= row i
  void rowsum(size_t h, size_t i);                // row h *= row i
  void to_bits(const PauliString& p, std::vector<uint64_t>& px,
               std::vector<uint64_t>& pz, int& phase2) const;
};

}  // namespace floq
