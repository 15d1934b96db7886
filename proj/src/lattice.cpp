#include "floq/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace floq {

char colour_char(Colour c) {
  switch (c) {
    case Colour::Red: return 'r';
    case Colour::Green: return 'g';
    case Colour::Blue: return 'b';
  }
  return '?';
}

Colour colour_from_char(char c) {
  switch (c) {
    case 'r': return Colour::Red;
    case 'g': return Colour::Green;
    case 'b': return Colour::Blue;
  }
  throw std::invalid_argument(std::string("bad colour: ") + c);
}

Colour third_colour(Colour a, Colour b) {
  assert(a != b);
  return (Colour)(3 - (uint8_t)a - (uint8_t)b);
}

namespace {

int64_t floormod(int64_t a, int64_t m) { return ((a % m) + m) % m; }

struct EdgeBuilder {
  std::map<std::pair<uint32_t, uint32_t>, Colour> edges;
  void add(uint32_t a, uint32_t b, Colour c) {
    if (a == b) throw std::logic_error("self edge");
    if (a > b) std::swap(a, b);
    auto [it, fresh] = edges.emplace(std::make_pair(a, b), c);
    if (!fresh && it->second != c) throw std::logic_error("edge colour clash");
  }
  std::vector<LatticeEdge> take() const {
    std::vector<LatticeEdge> out;
    out.reserve(edges.size());
    for (auto& [k, c] : edges) out.push_back({k.first, k.second, c});
    return out;
  }
};

}  // namespace

void ColouredLattice::rebuild() {
  std::sort(edges.begin(), edges.end(), [](const LatticeEdge& x, const LatticeEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  edge_at.assign(n_qubits, {-1, -1, -1});
  for (size_t i = 0; i < edges.size(); i++) {
    const LatticeEdge& e = edges[i];
    edge_at[e.a][(uint8_t)e.colour] = (int32_t)i;
    edge_at[e.b][(uint8_t)e.colour] = (int32_t)i;
  }
  plaquettes.clear();
  plaq_of_.assign((size_t)n_qubits * 3, -1);
  for (Colour face : {Colour::Red, Colour::Green, Colour::Blue}) {
    Colour c1 = (Colour)(((uint8_t)face + 1) % 3);
    Colour c2 = (Colour)(((uint8_t)face + 2) % 3);
    std::vector<bool> seen(n_qubits, false);
    for (uint32_t q0 = 0; q0 < n_qubits; q0++) {
      if (seen[q0]) continue;
      // walk the (c1, c2) cycle through q0
      std::vector<uint32_t> cyc;
      uint32_t q = q0;
      Colour take = c1;
      while (true) {
        cyc.push_back(q);
        seen[q] = true;
        int32_t ei = edge_at[q][(uint8_t)take];
        if (ei < 0) throw std::logic_error("plaquette walk stuck (invalid colouring)");
        const LatticeEdge& e = edges[ei];
        q = e.a == q ? e.b : e.a;
        take = take == c1 ? c2 : c1;
        if (q == q0) break;
        if (cyc.size() > n_qubits) throw std::logic_error("plaquette walk runaway");
      }
      if (cyc.size() % 2 != 0) throw std::logic_error("odd plaquette cycle");
      // canonical orientation: min qubit first, then smaller neighbour
      size_t mi = std::min_element(cyc.begin(), cyc.end()) - cyc.begin();
      std::vector<uint32_t> canon(cyc.size());
      uint32_t prev = cyc[(mi + cyc.size() - 1) % cyc.size()];
      uint32_t next = cyc[(mi + 1) % cyc.size()];
      bool forward = next < prev;
      for (size_t k = 0; k < cyc.size(); k++) {
        canon[k] = forward ? cyc[(mi + k) % cyc.size()]
                           : cyc[(mi + cyc.size() - k) % cyc.size()];
      }
      plaquettes.push_back({face, std::move(canon)});
    }
  }
  std::sort(plaquettes.begin(), plaquettes.end(),
            [](const PlaquetteFace& x, const PlaquetteFace& y) {
              return std::tie(x.colour, x.cycle[0]) < std::tie(y.colour, y.cycle[0]);
            });
  for (size_t i = 0; i < plaquettes.size(); i++) {
    for (uint32_t q : plaquettes[i].cycle)
      plaq_of_[(size_t)q * 3 + (uint8_t)plaquettes[i].colour] = (int32_t)i;
  }
}

int32_t ColouredLattice::edge_index(uint32_t a, uint32_t b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(a, b),
                             [](const LatticeEdge& e, const std::pair<uint32_t, uint32_t>& k) {
                               return std::tie(e.a, e.b) < std::tie(k.first, k.second);
                             });
  if (it != edges.end() && it->a == a && it->b == b) return (int32_t)(it - edges.begin());
  return -1;
}

uint32_t ColouredLattice::neighbour(uint32_t q, Colour c) const {
  int32_t ei = edge_at[q][(uint8_t)c];
  if (ei < 0) throw std::logic_error("missing edge colour at qubit");
  const LatticeEdge& e = edges[ei];
  return e.a == q ? e.b : e.a;
}

uint32_t ColouredLattice::plaquette_of(uint32_t q, Colour c) const {
  int32_t p = plaq_of_[(size_t)q * 3 + (uint8_t)c];
  assert(p >= 0);
  return (uint32_t)p;
}

ColouredLattice ColouredLattice::with_green_rewiring(
    const std::vector<std::pair<uint32_t, uint32_t>>& removed,
    const std::vector<std::pair<uint32_t, uint32_t>>& added) const {
  ColouredLattice out = *this;
  for (auto [a, b] : removed) {
    if (a > b) std::swap(a, b);
    auto it = std::find_if(out.edges.begin(), out.edges.end(), [&](const LatticeEdge& e) {
      return e.a == a && e.b == b && e.colour == Colour::Green;
    });
    if (it == out.edges.end()) throw std::logic_error("rewiring removes a non-edge");
    out.edges.erase(it);
  }
  for (auto [a, b] : added) {
    if (a > b) std::swap(a, b);
    out.edges.push_back({a, b, Colour::Green});
  }
  out.rebuild();
  return out;
}

std::string ColouredLattice::dump() const {
  std::ostringstream os;
  for (uint32_t q = 0; q < n_qubits; q++) {
    os << "QUBIT " << q << " " << coords[q].first << " " << coords[q].second << "\n";
  }
  for (const LatticeEdge& e : edges) {
    os << "EDGE " << colour_char(e.colour) << " " << e.a << " " << e.b << "\n";
  }
  for (const PlaquetteFace& p : plaquettes) {
    os << "PLAQ " << colour_char(p.colour);
    for (uint32_t q : p.cycle) os << " " << q;
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Builders

ColouredLattice build_honeycomb_torus(uint32_t d) {
  if (d < 1) throw std::invalid_argument("honeycomb needs d >= 1");
  // Unit cells (i, j), i in [0, d), j in [0, 3d), two sites A/B per cell.
  // Torus quotient by (d, d) and (0, 3d); face colour (i - j) mod 3 with
  // 0 = green, 1 = red, 2 = blue. The (i,j) -> (j,i) transpose is then a
  // colour-negating symmetry for every d.
  const int64_t D = d, W = 3 * (int64_t)d;
  auto cell = [&](int64_t i, int64_t j) {
    int64_t i0 = floormod(i, D);
    int64_t k = (i - i0) / D;
    int64_t j0 = floormod(j - k * D, W);
    return std::make_pair(i0, j0);
  };
  auto qubit = [&](int64_t i, int64_t j, int s) {
    auto [i0, j0] = cell(i, j);
    return (uint32_t)(2 * (i0 * W + j0) + s);
  };
  auto colour_m = [&](int64_t m) {
    switch (floormod(m, 3)) {
      case 0: return Colour::Green;
      case 1: return Colour::Red;
      default: return Colour::Blue;
    }
  };
  ColouredLattice lat;
  lat.kind = LatticeKind::Honeycomb;
  lat.d = d;
  lat.n_qubits = 6 * d * d;
  EdgeBuilder eb;
  lat.coords.resize(lat.n_qubits);
  const double a1x = 0.5, a1y = 0.8660254037844386, a2x = 1.0, a2y = 0.0;
  for (int64_t i = 0; i < D; i++) {
    for (int64_t j = 0; j < W; j++) {
      uint32_t A = qubit(i, j, 0), B = qubit(i, j, 1);
      eb.add(B, A, colour_m(i - j));                    // in-cell
      eb.add(B, qubit(i + 1, j, 0), colour_m(i - j + 2));  // a1 step
      eb.add(B, qubit(i, j + 1, 0), colour_m(i - j + 1));  // a2 step
      double ax = i * a1x + j * a2x, ay = i * a1y + j * a2y;
      lat.coords[A] = {ax, ay};
      lat.coords[B] = {ax + (a1x + a2x) / 3, ay + (a1y + a2y) / 3};
    }
  }
  lat.periods = {{{d * (a1x + a2x), d * (a1y + a2y)}, {3.0 * d * a2x, 3.0 * d * a2y}}};
  lat.edges = eb.take();
  lat.rebuild();
  return lat;
}

namespace {

// Shared builder for the two 4.8.8 variants: squares on a grid of cells with
// a kind-specific torus reduction. Corner sites: W=0, N=1, E=2, S=3.
struct SquareGrid {
  virtual ~SquareGrid() = default;
  virtual uint32_t cell_index(int64_t i, int64_t j) const = 0;
  virtual uint32_t n_cells() const = 0;
};

ColouredLattice build_488_common(uint32_t d, LatticeKind kind, const SquareGrid& g,
                                 const std::vector<std::pair<int64_t, int64_t>>& cells) {
  ColouredLattice lat;
  lat.kind = kind;
  lat.d = d;
  lat.n_qubits = 4 * g.n_cells();
  lat.coords.resize(lat.n_qubits);
  EdgeBuilder eb;
  auto qubit = [&](int64_t i, int64_t j, int s) {
    return 4 * g.cell_index(i, j) + s;
  };
  for (auto [i, j] : cells) {
    uint32_t W = qubit(i, j, 0), N = qubit(i, j, 1), E = qubit(i, j, 2), S = qubit(i, j, 3);
    // Octagon at (i, j) sits up-right of square (i, j); colour by (i+j)
    // parity. A square side takes the colour complementary to the octagon
    // it borders.
    auto side = [&](int64_t pi, int64_t pj) {
      return ((pi + pj) % 2 + 2) % 2 == 0 ? Colour::Blue : Colour::Red;
    };
    eb.add(W, N, side(i, j - 1));
    eb.add(N, E, side(i, j));
    eb.add(E, S, side(i - 1, j));
    eb.add(S, W, side(i - 1, j - 1));
    // Green connectors to the next squares up and right.
    eb.add(N, qubit(i + 1, j, 3), Colour::Green);
    eb.add(E, qubit(i, j + 1, 0), Colour::Green);
    double cx = 2.0 * j, cy = 2.0 * i;
    lat.coords[W] = {cx - 0.45, cy};
    lat.coords[N] = {cx, cy + 0.45};
    lat.coords[E] = {cx + 0.45, cy};
    lat.coords[S] = {cx, cy - 0.45};
  }
  lat.edges = eb.take();
  lat.rebuild();
  return lat;
}

}  // namespace

ColouredLattice build_488_torus(uint32_t d) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("4.8.8 torus needs even d >= 2 (tiling does not close)");
  struct Grid : SquareGrid {
    int64_t d;
    uint32_t cell_index(int64_t i, int64_t j) const override {
      return (uint32_t)(floormod(i, d) * d + floormod(j, d));
    }
    uint32_t n_cells() const override { return (uint32_t)(d * d); }
  } g;
  g.d = d;
  std::vector<std::pair<int64_t, int64_t>> cells;
  for (int64_t i = 0; i < d; i++)
    for (int64_t j = 0; j < d; j++) cells.push_back({i, j});
  ColouredLattice lat = build_488_common(d, LatticeKind::Square488, g, cells);
  lat.periods = {{{2.0 * d, 0.0}, {0.0, 2.0 * d}}};
  return lat;
}

ColouredLattice build_rotated_488(uint32_t d) {
  if (d < 1) throw std::invalid_argument("rotated 4.8.8 needs d >= 1");
  // Same local tiling, torus quotient by (d, d) and (d, -d): the bulk is the
  // standard 4.8.8 rotated 45 degrees. Octagon parity (i + j) is invariant
  // under both quotient vectors for every d.
  struct Grid : SquareGrid {
    int64_t d;
    uint32_t cell_index(int64_t i, int64_t j) const override {
      int64_t u = floormod(i + j, 2 * d);
      int64_t w = floormod(i - j, 2 * d);
      return (uint32_t)(u * d + w / 2);
    }
    uint32_t n_cells() const override { return (uint32_t)(2 * d * d); }
  } g;
  g.d = d;
  std::vector<std::pair<int64_t, int64_t>> cells;
  for (int64_t u = 0; u < 2 * (int64_t)d; u++) {
    for (int64_t w = u % 2; w < 2 * (int64_t)d; w += 2) {
      cells.push_back({(u + w) / 2, (u - w) / 2});
    }
  }
  ColouredLattice lat = build_488_common(d, LatticeKind::Rotated488, g, cells);
  lat.periods = {{{2.0 * d, 2.0 * d}, {2.0 * d, -2.0 * d}}};
  return lat;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_colouring(const ColouredLattice& lat) {
  std::vector<std::string> report;
  auto complain = [&](std::string s) { report.push_back(std::move(s)); };

  std::vector<std::array<int, 3>> colour_count(lat.n_qubits, {0, 0, 0});
  for (const LatticeEdge& e : lat.edges) {
    if (e.a >= lat.n_qubits || e.b >= lat.n_qubits || e.a >= e.b) {
      complain("malformed edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
      continue;
    }
    colour_count[e.a][(uint8_t)e.colour]++;
    colour_count[e.b][(uint8_t)e.colour]++;
  }
  for (uint32_t q = 0; q < lat.n_qubits; q++) {
    for (int c = 0; c < 3; c++) {
      if (colour_count[q][c] != 1) {
        complain("qubit " + std::to_string(q) + " has " + std::to_string(colour_count[q][c]) +
                 " edges of colour " + colour_char((Colour)c));
      }
    }
  }
  if (!report.empty()) return report;  // face walks need a clean colouring

  // Face structure: walk 2-colour cycles and count.
  size_t n_faces = 0;
  std::map<std::pair<uint32_t, Colour>, int> face_id;
  for (Colour face : {Colour::Red, Colour::Green, Colour::Blue}) {
    Colour c1 = (Colour)(((uint8_t)face + 1) % 3);
    Colour c2 = (Colour)(((uint8_t)face + 2) % 3);
    std::vector<bool> seen(lat.n_qubits, false);
    for (uint32_t q0 = 0; q0 < lat.n_qubits; q0++) {
      if (seen[q0]) continue;
      uint32_t q = q0;
      Colour take = c1;
      size_t len = 0;
      do {
        seen[q] = true;
        face_id[{q, face}] = (int)n_faces;
        int32_t ei = lat.edge_at[q][(uint8_t)take];
        const LatticeEdge& e = lat.edges[ei];
        q = e.a == q ? e.b : e.a;
        take = take == c1 ? c2 : c1;
        len++;
      } while (q != q0 && len <= lat.n_qubits);
      if (q != q0) {
        complain("face walk of colour " + std::string(1, colour_char(face)) +
                 " from qubit " + std::to_string(q0) + " does not close");
        return report;
      }
      n_faces++;
    }
  }
  // Every edge borders two faces whose colours are the two non-edge colours,
  // and they are distinct faces (else the "face" wraps the edge).
  for (const LatticeEdge& e : lat.edges) {
    Colour f1 = (Colour)(((uint8_t)e.colour + 1) % 3);
    Colour f2 = (Colour)(((uint8_t)e.colour + 2) % 3);
    if (face_id[{e.a, f1}] != face_id[{e.b, f1}] || face_id[{e.a, f2}] != face_id[{e.b, f2}]) {
      complain("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
               " endpoints disagree on bordering faces");
    }
  }
  int64_t euler = (int64_t)lat.n_qubits - (int64_t)lat.edges.size() + (int64_t)n_faces;
  if (euler != 0) {
    complain("euler characteristic " + std::to_string(euler) + " != 0");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Twist loops

bool is_twist_eligible_pattern(const std::vector<Colour>& pattern) {
  if (pattern.empty() || pattern.size() % 2 != 0) return false;
  bool has_r = false, has_b = false;
  for (size_t i = 0; i < pattern.size(); i++) {
    if (i % 2 == 0) {
      if (pattern[i] != Colour::Green) return false;
    } else {
      if (pattern[i] == Colour::Green) return false;
      has_r |= pattern[i] == Colour::Red;
      has_b |= pattern[i] == Colour::Blue;
    }
  }
  return has_r && has_b;
}

namespace {

// GF(2) cycle space of the lattice (spanned by plaquette boundaries), used
// for contractibility and homology-class tests on edge-set vectors.
struct CycleSpace {
  size_t words;
  std::vector<std::vector<uint64_t>> rows;
  std::vector<int32_t> pivot;

  explicit CycleSpace(const ColouredLattice& lat) {
    words = (lat.edges.size() + 63) / 64;
    pivot.assign(words * 64, -1);
    for (const PlaquetteFace& p : lat.plaquettes) {
      std::vector<uint64_t> v(words, 0);
      for (size_t k = 0; k < p.cycle.size(); k++) {
        uint32_t a = p.cycle[k], b = p.cycle[(k + 1) % p.cycle.size()];
        int32_t ei = lat.edge_index(a, b);
        assert(ei >= 0);
        v[ei / 64] ^= 1ull << (ei % 64);
      }
      insert(std::move(v));
    }
  }
  void insert(std::vector<uint64_t> v) {
    while (true) {
      int hi = -1;
      for (int w = (int)words - 1; w >= 0; w--) {
        if (v[w]) { hi = w * 64 + 63 - __builtin_clzll(v[w]); break; }
      }
      if (hi < 0) return;
      if (pivot[hi] < 0) {
        pivot[hi] = (int32_t)rows.size();
        rows.push_back(std::move(v));
        return;
      }
      const auto& r = rows[pivot[hi]];
      for (size_t w = 0; w < words; w++) v[w] ^= r[w];
    }
  }
  bool contains(std::vector<uint64_t> v) const {
    while (true) {
      int hi = -1;
      for (int w = (int)words - 1; w >= 0; w--) {
        if (v[w]) { hi = w * 64 + 63 - __builtin_clzll(v[w]); break; }
      }
      if (hi < 0) return true;
      if (pivot[hi] < 0) return false;
      const auto& r = rows[pivot[hi]];
      for (size_t w = 0; w < words; w++) v[w] ^= r[w];
    }
  }
};

std::vector<uint64_t> edge_vec(const ColouredLattice& lat, const std::vector<uint32_t>& edge_ids) {
  std::vector<uint64_t> v((lat.edges.size() + 63) / 64, 0);
  for (uint32_t e : edge_ids) v[e / 64] ^= 1ull << (e % 64);
  return v;
}

// Walk a loop with the given non-green colour sequence starting from a green
// edge. Returns the cyclic edge list when it closes with matching phase.
std::optional<std::vector<uint32_t>> walk_pattern(const ColouredLattice& lat,
                                                  uint32_t start_qubit,
                                                  const std::vector<Colour>& nongreen) {
  std::vector<uint32_t> edge_ids;
  uint32_t q = start_qubit;
  size_t phase = 0;
  const size_t limit = 2 * lat.n_qubits + 4;
  while (true) {
    // green step
    int32_t ge = lat.edge_at[q][(uint8_t)Colour::Green];
    edge_ids.push_back((uint32_t)ge);
    q = lat.neighbour(q, Colour::Green);
    // non-green step of the required colour
    Colour want = nongreen[phase % nongreen.size()];
    int32_t ne = lat.edge_at[q][(uint8_t)want];
    if (ne < 0) return std::nullopt;
    edge_ids.push_back((uint32_t)ne);
    q = lat.neighbour(q, want);
    phase++;
    if (q == start_qubit && phase % nongreen.size() == 0) break;
    if (edge_ids.size() > limit) return std::nullopt;
  }
  return edge_ids;
}

HomologyLoop make_loop(const ColouredLattice& lat, const std::vector<uint32_t>& edge_ids) {
  HomologyLoop loop;
  loop.edge_ids = edge_ids;
  for (uint32_t e : edge_ids) loop.colour_pattern.push_back(lat.edges[e].colour);
  // slots: walk the edge list tracking the current qubit
  // first edge is green from some qubit; recover qubit order
  // Determine starting qubit: shared endpoint structure.
  const LatticeEdge& e0 = lat.edges[edge_ids[0]];
  const LatticeEdge& e1 = lat.edges[edge_ids[1]];
  uint32_t q0 = (e0.a == e1.a || e0.a == e1.b) ? e0.b : e0.a;
  uint32_t q = q0;
  std::vector<uint32_t> order;
  for (uint32_t e : edge_ids) {
    order.push_back(q);
    const LatticeEdge& ed = lat.edges[e];
    q = ed.a == q ? ed.b : ed.a;
  }
  for (size_t k = 0; k < edge_ids.size(); k++) {
    const LatticeEdge& ed = lat.edges[edge_ids[k]];
    if (ed.colour == Colour::Green) continue;
    loop.slots.push_back({ed.colour, order[k], order[(k + 1) % order.size()]});
  }
  return loop;
}

}  // namespace

std::vector<uint32_t> HomologyLoop::qubits_cyclic() const {
  std::vector<uint32_t> out;
  for (const Slot& s : slots) {
    out.push_back(s.first);
    out.push_back(s.second);
  }
  return out;
}

uint32_t HomologyLoop::min_qubit() const {
  uint32_t m = UINT32_MAX;
  for (const Slot& s : slots) m = std::min({m, s.first, s.second});
  return m;
}

bool loop_is_noncontractible(const ColouredLattice& lat, const HomologyLoop& loop) {
  CycleSpace cs(lat);
  return !cs.contains(edge_vec(lat, loop.edge_ids));
}

namespace {

// Joint analysis of twist-loop families and dualities. The honeycomb torus
// carries three loop directions; "horizontal" and "vertical" are the pair a
// colour-swapping symmetry exchanges (that pairing is what turns the fold
// into a plain per-qubit gate).
struct LatticeAnalysis {
  std::vector<std::vector<HomologyLoop>> families;  // disjoint maximal, sorted
  std::vector<std::vector<uint64_t>> family_vec;    // one class rep vector each
  int horizontal = -1, vertical = -1;
  std::vector<ZxDuality> dualities;
};

LatticeAnalysis analyze_lattice(const ColouredLattice& lat) {
  LatticeAnalysis an;
  CycleSpace cs(lat);

  // --- collect loops ---------------------------------------------------
  // The 4.8.8 torus also admits diagonal (g,r,g,b) loops; its twist loops
  // follow the period-8 pattern instead.
  std::vector<Colour> pat =
      lat.kind == LatticeKind::Square488
          ? std::vector<Colour>{Colour::Red, Colour::Red, Colour::Blue, Colour::Blue}
          : std::vector<Colour>{Colour::Red, Colour::Blue};
  std::set<std::vector<uint32_t>> seen;
  std::vector<HomologyLoop> all;
  for (uint32_t q = 0; q < lat.n_qubits; q++) {
    for (size_t phase = 0; phase < pat.size(); phase++) {
      std::vector<Colour> rot(pat.begin() + phase, pat.end());
      rot.insert(rot.end(), pat.begin(), pat.begin() + phase);
      auto ids = walk_pattern(lat, q, rot);
      if (!ids) continue;
      std::vector<uint32_t> key = *ids;
      std::sort(key.begin(), key.end());
      key.erase(std::unique(key.begin(), key.end()), key.end());
      if (key.size() != ids->size()) continue;  // revisited an edge
      if (seen.count(key)) continue;
      if (cs.contains(edge_vec(lat, *ids))) continue;  // contractible
      seen.insert(key);
      all.push_back(make_loop(lat, *ids));
    }
  }
  std::sort(all.begin(), all.end(), [](const HomologyLoop& x, const HomologyLoop& y) {
    return x.min_qubit() < y.min_qubit();
  });

  // --- group by homology class ------------------------------------------
  auto xor_in_span = [&](const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
    auto v = a;
    for (size_t k = 0; k < v.size(); k++) v[k] ^= b[k];
    return cs.contains(v);
  };
  std::vector<std::vector<HomologyLoop>> groups;
  for (HomologyLoop& l : all) {
    auto v = edge_vec(lat, l.edge_ids);
    bool placed = false;
    for (size_t f = 0; f < groups.size() && !placed; f++) {
      if (xor_in_span(v, an.family_vec[f])) {
        groups[f].push_back(std::move(l));
        placed = true;
      }
    }
    if (!placed) {
      an.family_vec.push_back(v);
      groups.push_back({std::move(l)});
    }
  }
  // Greedy maximal family per class. Parallel loops must be disjoint and
  // non-adjacent (interleaved loops share plaquettes and cannot be twisted
  // in the same layer).
  for (auto& g : groups) {
    std::vector<HomologyLoop> fam;
    std::vector<bool> used(lat.n_qubits, false);
    for (HomologyLoop& l : g) {
      bool clash = false;
      for (uint32_t q : l.qubits_cyclic()) {
        clash |= used[q];
        for (int c = 0; c < 3 && !clash; c++) clash |= used[lat.neighbour(q, (Colour)c)];
      }
      if (clash) continue;
      for (uint32_t q : l.qubits_cyclic()) used[q] = true;
      fam.push_back(std::move(l));
    }
    an.families.push_back(std::move(fam));
  }

  // --- dualities ----------------------------------------------------------
  auto swapc = [](Colour c) {
    if (c == Colour::Red) return Colour::Blue;
    if (c == Colour::Blue) return Colour::Red;
    return Colour::Green;
  };
  struct Found {
    ZxDuality d;
    std::vector<int> class_image;  // family index -> family index, -1 unknown
  };
  std::vector<Found> found;
  for (uint32_t image0 = 0; image0 < lat.n_qubits; image0++) {
    std::vector<uint32_t> map(lat.n_qubits, UINT32_MAX);
    map[0] = image0;
    std::vector<uint32_t> stack = {0};
    bool ok = true;
    while (!stack.empty() && ok) {
      uint32_t q = stack.back();
      stack.pop_back();
      for (int c = 0; c < 3 && ok; c++) {
        uint32_t nq = lat.neighbour(q, (Colour)c);
        uint32_t nm = lat.neighbour(map[q], swapc((Colour)c));
        if (map[nq] == UINT32_MAX) {
          map[nq] = nm;
          stack.push_back(nq);
        } else if (map[nq] != nm) {
          ok = false;
        }
      }
    }
    if (!ok) continue;
    bool involution = true;
    for (uint32_t q = 0; q < lat.n_qubits && involution; q++) {
      involution = map[q] < lat.n_qubits && map[map[q]] == q;
    }
    if (!involution) continue;
    Found f;
    f.d.map = std::move(map);
    for (uint32_t q = 0; q < lat.n_qubits; q++) {
      if (f.d.map[q] == q) f.d.fixed_points.push_back(q);
    }
    f.class_image.assign(an.families.size(), -1);
    for (size_t fi = 0; fi < an.families.size(); fi++) {
      std::vector<uint32_t> eids;
      for (uint32_t e : an.families[fi][0].edge_ids) {
        const LatticeEdge& ed = lat.edges[e];
        int32_t ni = lat.edge_index(f.d.map[ed.a], f.d.map[ed.b]);
        if (ni < 0) { eids.clear(); break; }
        eids.push_back((uint32_t)ni);
      }
      if (eids.empty()) continue;
      auto v = edge_vec(lat, eids);
      for (size_t fj = 0; fj < an.families.size(); fj++) {
        if (xor_in_span(v, an.family_vec[fj])) f.class_image[fi] = (int)fj;
      }
    }
    found.push_back(std::move(f));
  }

  // --- pick the horizontal/vertical pair ----------------------------------
  // Prefer a pair swapped by some duality; otherwise the first two classes.
  for (const Found& f : found) {
    for (size_t i = 0; i < an.families.size() && an.horizontal < 0; i++) {
      int j = i < f.class_image.size() ? f.class_image[i] : -1;
      if (j >= 0 && (size_t)j != i && f.class_image[j] == (int)i) {
        an.horizontal = (int)std::min<size_t>(i, j);
        an.vertical = (int)std::max<size_t>(i, j);
      }
    }
  }
  if (an.horizontal < 0 && an.families.size() >= 2) {
    an.horizontal = 0;
    an.vertical = 1;
  }
  for (Found& f : found) {
    f.d.swaps_classes = an.horizontal >= 0 &&
                        f.class_image[an.horizontal] == an.vertical &&
                        f.class_image[an.vertical] == an.horizontal;
    an.dualities.push_back(std::move(f.d));
  }
  std::stable_sort(an.dualities.begin(), an.dualities.end(),
                   [](const ZxDuality& x, const ZxDuality& y) {
                     if (x.swaps_classes != y.swaps_classes)
                       return x.swaps_classes > y.swaps_classes;
                     return x.map[0] < y.map[0];
                   });
  return an;
}

}  // namespace

namespace {

// Net displacement of a loop using minimal-image steps (wrap-aware).
std::pair<double, double> loop_direction(const ColouredLattice& lat,
                                         const HomologyLoop& loop) {
  double dx = 0, dy = 0;
  std::vector<uint32_t> qs = loop.qubits_cyclic();
  for (size_t k = 0; k < qs.size(); k++) {
    auto [ax, ay] = lat.coords[qs[k]];
    auto [bx, by] = lat.coords[qs[(k + 1) % qs.size()]];
    double sx = bx - ax, sy = by - ay;
    double best = 1e300, bx2 = sx, by2 = sy;
    for (int k1 = -1; k1 <= 1; k1++) {
      for (int k2 = -1; k2 <= 1; k2++) {
        double cx = sx - k1 * lat.periods[0].first - k2 * lat.periods[1].first;
        double cy = sy - k1 * lat.periods[0].second - k2 * lat.periods[1].second;
        double norm = cx * cx + cy * cy;
        if (norm < best) {
          best = norm;
          bx2 = cx;
          by2 = cy;
        }
      }
    }
    dx += bx2;
    dy += by2;
  }
  return {dx, dy};
}

void reverse_loop(HomologyLoop& l) {
  std::reverse(l.edge_ids.begin(), l.edge_ids.end());
  std::reverse(l.colour_pattern.begin(), l.colour_pattern.end());
  std::reverse(l.slots.begin(), l.slots.end());
  for (auto& s : l.slots) std::swap(s.first, s.second);
}

}  // namespace

std::vector<HomologyLoop> find_twist_loops(const ColouredLattice& lat, Homology h) {
  LatticeAnalysis an = analyze_lattice(lat);
  int idx = h == Homology::Horizontal ? an.horizontal : an.vertical;
  if (idx < 0) return {};
  std::vector<HomologyLoop> fam = an.families[idx];
  for (HomologyLoop& l : fam) l.homology_class = h;
  // orient the family consistently so parallel stages shear the same way
  if (!fam.empty()) {
    auto [rx, ry] = loop_direction(lat, fam[0]);
    for (size_t i = 1; i < fam.size(); i++) {
      auto [dx, dy] = loop_direction(lat, fam[i]);
      if (rx * dx + ry * dy < 0) reverse_loop(fam[i]);
    }
  }
  return fam;
}

std::vector<ZxDuality> find_all_zx_dualities(const ColouredLattice& lat) {
  return analyze_lattice(lat).dualities;
}

std::optional<ZxDuality> find_zx_duality(const ColouredLattice& lat) {
  auto all = find_all_zx_dualities(lat);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace floq
