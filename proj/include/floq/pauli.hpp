#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace floq {

// Single-qubit Pauli letter. Bit 0 is the X component, bit 1 the Z component.
enum class Pauli : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

enum class GateKind : uint8_t { H, S, SQRT_X, CZ, CNOT, XCX, SWAP };

const char* gate_name(GateKind k);
std::optional<GateKind> gate_from_name(const std::string& s);
bool gate_is_two_qubit(GateKind k);

struct CliffordGate {
  GateKind kind;
  uint32_t a = 0;
  uint32_t b = 0;  // unused for 1q gates

  static CliffordGate one(GateKind k, uint32_t q) { return {k, q, 0}; }
  static CliffordGate two(GateKind k, uint32_t a, uint32_t b) { return {k, a, b}; }
};

// Signed sparse Pauli operator. Terms are sorted by qubit index; the sign is
// the leading +/- of the operator written in I/X/Y/Z letters. Imaginary
// phases never survive in tracked operators; producing one is a caller bug.
class PauliString {
 public:
  struct Term {
    uint32_t qubit;
    Pauli p;
    bool operator==(const Term&) const = default;
  };

  PauliString() = default;
  static PauliString identity() { return {}; }
  static PauliString single(uint32_t q, Pauli p, bool negative = false);
  static PauliString from_terms(std::vector<Term> terms, bool negative = false);
  // Canonical text form, e.g. "+X0*X1*Z5".
  static PauliString parse(const std::string& s);
  std::string str() const;

  bool negative() const { return neg_; }
  void set_negative(bool n) { neg_ = n; }
  size_t weight() const { return terms_.size(); }
  bool is_identity() const { return terms_.empty(); }
  Pauli at(uint32_t q) const;
  const std::vector<Term>& terms() const { return terms_; }
  uint32_t max_qubit() const;  // 0 when empty

  bool commutes_with(const PauliString& o) const;

  // Group product this * o. An odd i-power in the result throws
  // std::logic_error; chains with imaginary intermediates go through
  // PauliAccumulator instead.
  PauliString times(const PauliString& o) const;

  // Heisenberg conjugation g . this . g^dagger, sign tracked exactly.
  void conjugate(const CliffordGate& g);

  // Relabel qubits: qubit q becomes perm[q].
  void permute(std::span<const uint32_t> perm);

  bool operator==(const PauliString& o) const = default;
  bool same_letters(const PauliString& o) const { return terms_ == o.terms_; }

 private:
  std::vector<Term> terms_;
  bool neg_ = false;
};

// Product accumulator with exact i-power tracking, for chains whose
// intermediate factors may be imaginary.
class PauliAccumulator {
 public:
  void mul(const PauliString& p);
  int phase_mod4() const;  // i-power of the current product
  // Throws std::logic_error if the accumulated phase is imaginary.
  PauliString finish() const;

 private:
  std::vector<Pauli> letters_;
  int phase_ = 0;  // i^phase_ relative to the literal letter product
};

// Membership of a signed Pauli word in the group generated by `gens`,
// solved by GF(2) elimination over symplectic vectors with sign tracking.
// Reusable across queries against the same generator list.
class GroupSolver {
 public:
  explicit GroupSolver(uint32_t n_qubits);
  GroupSolver(uint32_t n_qubits, std::span<const PauliString> gens);

  void add_generator(const PauliString& g);
  size_t n_generators() const { return n_gens_; }
  size_t rank() const { return rows_.size(); }

  struct Decomposition {
    std::vector<uint32_t> gen_indices;  // sorted
    bool negated;    // ascending-order product == (negated ? -1 : +1) * target
    bool imaginary;  // product is (+-i) * target; possible only for
                     // anticommuting generator sets
  };
  // Letters of `target` must match the subset product exactly; the sign of
  // `target` participates in `negated`.
  std::optional<Decomposition> decompose(const PauliString& target) const;
  // Letters-only membership (ignores sign).
  bool contains_word(const PauliString& target) const;

 private:
  struct Row {
    std::vector<uint64_t> vec;   // x bits then z bits over the qubit universe
    std::vector<uint64_t> combo; // generator index bitset
  };
  std::vector<PauliString> gens_;
  std::vector<Row> rows_;          // echelon form
  std::vector<int32_t> pivot_of_;  // bit index -> row, -1 if none
  size_t n_gens_ = 0;
  size_t words_ = 0;  // words per x/z half
  std::vector<uint64_t> to_bits(const PauliString& p) const;
};

}  // namespace floq
