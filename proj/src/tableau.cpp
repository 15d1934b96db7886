#include "floq/tableau.hpp"

#include <cassert>
#include <stdexcept>

namespace floq {

namespace {

// i-power of multiplying literal letters (a then b), A&G style.
inline int g_phase(int x1, int z1, int x2, int z2) {
  if (!x1 && !z1) return 0;
  if (x1 && z1) return z2 - x2;
  if (x1) return z2 * (2 * x2 - 1);
  return x2 * (1 - 2 * z2);
}

}  // namespace

Tableau::Tableau(uint32_t n) : n_(n), words_((n + 63) / 64) {
  xs_.assign(2 * n_, std::vector<uint64_t>(words_, 0));
  zs_.assign(2 * n_, std::vector<uint64_t>(words_, 0));
  sign_.assign(2 * n_, 0);
  for (uint32_t q = 0; q < n_; q++) {
    xs_[q][q / 64] |= 1ull << (q % 64);          // destabilizer X_q
    zs_[n_ + q][q / 64] |= 1ull << (q % 64);     // stabilizer Z_q
  }
  coin_ = [] { return false; };
}

void Tableau::apply(const CliffordGate& g) {
  auto h = [&](uint32_t q) {
    size_t w = q / 64;
    uint64_t m = 1ull << (q % 64);
    for (size_t r = 0; r < 2 * n_; r++) {
      bool x = xs_[r][w] & m, z = zs_[r][w] & m;
      if (x && z) sign_[r] = (sign_[r] + 2) & 3;
      if (x != z) {
        xs_[r][w] ^= m;
        zs_[r][w] ^= m;
      }
    }
  };
  auto s = [&](uint32_t q) {
    size_t w = q / 64;
    uint64_t m = 1ull << (q % 64);
    for (size_t r = 0; r < 2 * n_; r++) {
      bool x = xs_[r][w] & m, z = zs_[r][w] & m;
      if (x && z) sign_[r] = (sign_[r] + 2) & 3;
      if (x) zs_[r][w] ^= m;
    }
  };
  auto cnot = [&](uint32_t a, uint32_t b) {
    size_t wa = a / 64, wb = b / 64;
    uint64_t ma = 1ull << (a % 64), mb = 1ull << (b % 64);
    for (size_t r = 0; r < 2 * n_; r++) {
      bool xa = xs_[r][wa] & ma, za = zs_[r][wa] & ma;
      bool xb = xs_[r][wb] & mb, zb = zs_[r][wb] & mb;
      if (xa && zb && (xb == za)) sign_[r] = (sign_[r] + 2) & 3;
      if (xa) xs_[r][wb] ^= mb;
      if (zb) zs_[r][wa] ^= ma;
    }
  };
  switch (g.kind) {
    case GateKind::H: h(g.a); break;
    case GateKind::S: s(g.a); break;
    case GateKind::SQRT_X: h(g.a); s(g.a); h(g.a); break;
    case GateKind::CNOT: cnot(g.a, g.b); break;
    case GateKind::CZ: h(g.b); cnot(g.a, g.b); h(g.b); break;
    case GateKind::XCX: h(g.a); cnot(g.a, g.b); h(g.a); break;
    case GateKind::SWAP: cnot(g.a, g.b); cnot(g.b, g.a); cnot(g.a, g.b); break;
  }
}

void Tableau::apply_pauli(const PauliString& p) {
  std::vector<uint64_t> px(words_, 0), pz(words_, 0);
  int ph = 0;
  to_bits(p, px, pz, ph);
  for (size_t r = 0; r < 2 * n_; r++) {
    if (anticommutes(r, px, pz)) sign_[r] = (sign_[r] + 2) & 3;
  }
}

bool Tableau::anticommutes(size_t row, const std::vector<uint64_t>& px,
                           const std::vector<uint64_t>& pz) const {
  uint64_t acc = 0;
  for (size_t w = 0; w < words_; w++) {
    acc ^= (xs_[row][w] & pz[w]) ^ (zs_[row][w] & px[w]);
  }
  return __builtin_parityll(acc);
}

void Tableau::rowsum_into(std::vector<uint64_t>& hx, std::vector<uint64_t>& hz,
                          int& phase2, size_t i) const {
  int acc = sign_[i];
  for (size_t w = 0; w < words_; w++) {
    uint64_t x1 = xs_[i][w], z1 = zs_[i][w], x2 = hx[w], z2 = hz[w];
    for (int b = 0; b < 64; b++) {
      uint64_t m = 1ull << b;
      if (((x1 | z1 | x2 | z2) & m) == 0) continue;
      acc += g_phase(!!(x1 & m), !!(z1 & m), !!(x2 & m), !!(z2 & m));
    }
    hx[w] ^= x1;
    hz[w] ^= z1;
  }
  phase2 = ((phase2 + acc) % 4 + 4) % 4;
}

void Tableau::rowsum(size_t h, size_t i) {
  int phase2 = sign_[h];
  rowsum_into(xs_[h], zs_[h], phase2, i);
  sign_[h] = (uint8_t)phase2;
}

void Tableau::to_bits(const PauliString& p, std::vector<uint64_t>& px,
                      std::vector<uint64_t>& pz, int& phase2) const {
  phase2 = p.negative() ? 2 : 0;
  for (const PauliString::Term& t : p.terms()) {
    if (t.qubit >= n_) throw std::out_of_range("pauli exceeds tableau");
    uint8_t b = (uint8_t)t.p;
    if (b & 1) px[t.qubit / 64] |= 1ull << (t.qubit % 64);
    if (b & 2) pz[t.qubit / 64] |= 1ull << (t.qubit % 64);
  }
}

Tableau::MeasureResult Tableau::measure(const PauliString& p) {
  std::vector<uint64_t> px(words_, 0), pz(words_, 0);
  int pphase = 0;
  to_bits(p, px, pz, pphase);

  // Any stabilizer row anticommuting with p makes the outcome random.
  size_t pivot = SIZE_MAX;
  for (size_t r = n_; r < 2 * n_; r++) {
    if (anticommutes(r, px, pz)) {
      pivot = r;
      break;
    }
  }
  if (pivot != SIZE_MAX) {
    bool outcome = coin_();
    for (size_t r = 0; r < 2 * n_; r++) {
      if (r != pivot && anticommutes(r, px, pz)) rowsum(r, pivot);
    }
    // destabilizer partner takes the old stabilizer row
    xs_[pivot - n_] = xs_[pivot];
    zs_[pivot - n_] = zs_[pivot];
    sign_[pivot - n_] = sign_[pivot];
    // stabilizer row becomes +-p
    xs_[pivot] = px;
    zs_[pivot] = pz;
    sign_[pivot] = (uint8_t)((pphase + (outcome ? 2 : 0)) & 3);
    return {outcome, false};
  }

  auto v = deterministic_value(p);
  assert(v.has_value());
  return {*v, true};
}

std::optional<bool> Tableau::deterministic_value(const PauliString& p) const {
  std::vector<uint64_t> px(words_, 0), pz(words_, 0);
  int pphase = 0;
  to_bits(p, px, pz, pphase);
  for (size_t r = n_; r < 2 * n_; r++) {
    if (anticommutes(r, px, pz)) return std::nullopt;
  }
  // Accumulate the stabilizer product matching p via destabilizer pairing.
  std::vector<uint64_t> hx(words_, 0), hz(words_, 0);
  int phase2 = 0;
  for (size_t r = 0; r < n_; r++) {
    if (anticommutes(r, px, pz)) rowsum_into(hx, hz, phase2, n_ + r);
  }
  // hx/hz should now equal px/pz
  for (size_t w = 0; w < words_; w++) {
    if (hx[w] != px[w] || hz[w] != pz[w])
      throw std::logic_error("deterministic probe mismatch (not in group?)");
  }
  int diff = ((phase2 - pphase) % 4 + 4) % 4;
  if (diff != 0 && diff != 2) throw std::logic_error("odd stabilizer phase");
  return diff == 2;  // p|psi> = -|psi> means measuring p gives 1
}

void Tableau::permute(std::span<const uint32_t> perm) {
  for (size_t r = 0; r < 2 * n_; r++) {
    std::vector<uint64_t> nx(words_, 0), nz(words_, 0);
    for (uint32_t q = 0; q < n_; q++) {
      uint32_t t = perm[q];
      if (xs_[r][q / 64] & (1ull << (q % 64))) nx[t / 64] |= 1ull << (t % 64);
      if (zs_[r][q / 64] & (1ull << (q % 64))) nz[t / 64] |= 1ull << (t % 64);
    }
    xs_[r] = std::move(nx);
    zs_[r] = std::move(nz);
  }
}

void Tableau::reset(uint32_t q, Pauli basis) {
  PauliString p = PauliString::single(q, basis);
  MeasureResult r = measure(p);
  if (r.value) {
    // flip with the anticommuting partner letter
    Pauli fl = basis == Pauli::Z ? Pauli::X : (basis == Pauli::X ? Pauli::Z : Pauli::X);
    apply_pauli(PauliString::single(q, fl));
  }
}

}  // namespace floq
