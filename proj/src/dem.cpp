#include "floq/dem.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace floq {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

struct RecordMembership {
  // per measurement index: flipped detectors and observables
  std::vector<std::vector<uint32_t>> dets;
  std::vector<uint32_t> obs;
  std::vector<std::array<double, 4>> det_coords;
};

RecordMembership record_membership(const Circuit& c) {
  RecordMembership rm;
  rm.dets.resize(c.n_measurements);
  rm.obs.assign(c.n_measurements, 0);
  uint32_t meas = 0, det = 0;
  for (const Instruction& in : c.instrs) {
    switch (in.op) {
      case OpCode::MeasureZ:
      case OpCode::MeasureX:
      case OpCode::Mpp:
        meas++;
        break;
      case OpCode::Detector: {
        for (int64_t off : in.rec_offsets) {
          rm.dets[meas + off].push_back(det);
        }
        std::array<double, 4> xyz{0, 0, 0, 0};
        for (size_t i = 0; i < in.coords.size() && i < 4; i++) xyz[i] = in.coords[i];
        rm.det_coords.push_back(xyz);
        det++;
        break;
      }
      case OpCode::Observable:
        for (int64_t off : in.rec_offsets) {
          rm.obs[meas + off] |= 1u << in.obs_index;
        }
        break;
      default:
        break;
    }
  }
  return rm;
}

struct Sens {
  size_t words;
  std::vector<uint64_t> bits;  // [qubit][word] for X and Z stacked
  std::vector<uint32_t> obs;   // [qubit] x2
  uint32_t nq;

  Sens(uint32_t n, uint32_t n_det) : words((n_det + 63) / 64), nq(n) {
    bits.assign((size_t)2 * n * words, 0);
    obs.assign((size_t)2 * n, 0);
  }
  uint64_t* x(uint32_t q) { return bits.data() + (size_t)q * 2 * words; }
  uint64_t* z(uint32_t q) { return bits.data() + ((size_t)q * 2 + 1) * words; }
  uint32_t& xo(uint32_t q) { return obs[(size_t)q * 2]; }
  uint32_t& zo(uint32_t q) { return obs[(size_t)q * 2 + 1]; }

  void clear(uint32_t q) {
    std::fill(x(q), x(q) + words, 0);
    std::fill(z(q), z(q) + words, 0);
    xo(q) = zo(q) = 0;
  }
  void add_det(uint64_t* side, uint32_t d) { side[d / 64] ^= 1ull << (d % 64); }
};

// sens(before) = sens_after(g P g~); compute images of X and Z per target.
void backward_gate(Sens& s, GateKind kind, uint32_t a, uint32_t b) {
  auto collect = [&](const PauliString& img, std::vector<uint64_t>& acc, uint32_t& oacc) {
    for (const auto& t : img.terms()) {
      uint64_t* px = s.x(t.qubit);
      uint64_t* pz = s.z(t.qubit);
      bool has_x = t.p == Pauli::X || t.p == Pauli::Y;
      bool has_z = t.p == Pauli::Z || t.p == Pauli::Y;
      for (size_t w = 0; w < s.words; w++) {
        if (has_x) acc[w] ^= px[w];
        if (has_z) acc[w] ^= pz[w];
      }
      if (has_x) oacc ^= s.xo(t.qubit);
      if (has_z) oacc ^= s.zo(t.qubit);
    }
  };
  uint32_t targets[2] = {a, b};
  int nt = gate_is_two_qubit(kind) ? 2 : 1;
  std::vector<std::vector<uint64_t>> nx(nt, std::vector<uint64_t>(s.words, 0)),
      nz(nt, std::vector<uint64_t>(s.words, 0));
  std::vector<uint32_t> nxo(nt, 0), nzo(nt, 0);
  for (int i = 0; i < nt; i++) {
    for (int basis = 0; basis < 2; basis++) {
      PauliString p = PauliString::single(targets[i], basis == 0 ? Pauli::X : Pauli::Z);
      CliffordGate g = nt == 2 ? CliffordGate::two(kind, a, b)
                               : CliffordGate::one(kind, a);
      p.conjugate(g);
      collect(p, basis == 0 ? nx[i] : nz[i], basis == 0 ? nxo[i] : nzo[i]);
    }
  }
  for (int i = 0; i < nt; i++) {
    std::copy(nx[i].begin(), nx[i].end(), s.x(targets[i]));
    std::copy(nz[i].begin(), nz[i].end(), s.z(targets[i]));
    s.xo(targets[i]) = nxo[i];
    s.zo(targets[i]) = nzo[i];
  }
}

struct SymptomKey {
  std::vector<uint32_t> dets;
  uint32_t obs;
  bool operator<(const SymptomKey& o) const {
    return std::tie(dets, obs) < std::tie(o.dets, o.obs);
  }
};

std::vector<uint32_t> to_det_list(const uint64_t* w, size_t words) {
  std::vector<uint32_t> out;
  for (size_t k = 0; k < words; k++) {
    uint64_t v = w[k];
    while (v) {
      out.push_back((uint32_t)(k * 64 + __builtin_ctzll(v)));
      v &= v - 1;
    }
  }
  return out;
}

}  // namespace

DetectorErrorModel build_dem(const Circuit& c, bool allow_undetectable) {
  RecordMembership rm = record_membership(c);
  Sens sens(c.n_qubits, c.n_detectors);
  std::map<SymptomKey, double> merged;

  auto add_mech = [&](std::vector<uint32_t> dets, uint32_t obs, double p) {
    if (p <= 0) return;
    if (dets.empty() && obs == 0) return;
    if (dets.empty() && obs != 0 && !allow_undetectable) {
      throw std::runtime_error(
          "undetectable logical fault: a noise component flips an observable "
          "and no detector (circuit-distance violation)");
    }
    double& cur = merged[{std::move(dets), obs}];
    cur = cur * (1 - p) + p * (1 - cur);
  };

  uint32_t meas = c.n_measurements;
  // walk backwards keeping per-qubit sensitivity of X and Z errors
  for (auto it = c.instrs.rbegin(); it != c.instrs.rend(); ++it) {
    const Instruction& in = *it;
    switch (in.op) {
      case OpCode::QubitCoords:
      case OpCode::Tick:
      case OpCode::Detector:
      case OpCode::Observable:
        break;
      case OpCode::ResetZ:
      case OpCode::ResetX:
        for (uint32_t q : in.targets) sens.clear(q);
        break;
      case OpCode::Gate: {
        size_t stride = gate_is_two_qubit(in.gate) ? 2 : 1;
        for (size_t i = 0; i + stride <= in.targets.size(); i += stride) {
          backward_gate(sens, in.gate, in.targets[i],
                        stride == 2 ? in.targets[i + 1] : in.targets[i]);
        }
        break;
      }
      case OpCode::MeasureZ:
      case OpCode::MeasureX: {
        meas--;
        uint32_t q = in.targets[0];
        if (in.p > 0) {
          add_mech(rm.dets[meas], rm.obs[meas], in.p);
        }
        uint64_t* side = in.op == OpCode::MeasureZ ? sens.x(q) : sens.z(q);
        uint32_t& oside = in.op == OpCode::MeasureZ ? sens.xo(q) : sens.zo(q);
        for (uint32_t d : rm.dets[meas]) sens.add_det(side, d);
        oside ^= rm.obs[meas];
        break;
      }
      case OpCode::Mpp: {
        meas--;
        for (size_t i = 0; i < in.targets.size(); i++) {
          uint32_t q = in.targets[i];
          bool flip_x = in.letters[i] == Pauli::Z || in.letters[i] == Pauli::Y;
          bool flip_z = in.letters[i] == Pauli::X || in.letters[i] == Pauli::Y;
          if (flip_x) {
            for (uint32_t d : rm.dets[meas]) sens.add_det(sens.x(q), d);
            sens.xo(q) ^= rm.obs[meas];
          }
          if (flip_z) {
            for (uint32_t d : rm.dets[meas]) sens.add_det(sens.z(q), d);
            sens.zo(q) ^= rm.obs[meas];
          }
        }
        break;
      }
      case OpCode::Dep1: {
        for (uint32_t q : in.targets) {
          std::vector<uint64_t> y(sens.words);
          for (size_t w = 0; w < sens.words; w++) y[w] = sens.x(q)[w] ^ sens.z(q)[w];
          add_mech(to_det_list(sens.x(q), sens.words), sens.xo(q), in.p / 3);
          add_mech(to_det_list(sens.z(q), sens.words), sens.zo(q), in.p / 3);
          add_mech(to_det_list(y.data(), sens.words), sens.xo(q) ^ sens.zo(q), in.p / 3);
        }
        break;
      }
      case OpCode::Dep2: {
        for (size_t i = 0; i + 2 <= in.targets.size(); i += 2) {
          uint32_t a = in.targets[i], b = in.targets[i + 1];
          std::vector<uint64_t> buf(sens.words);
          for (int pa = 0; pa < 4; pa++) {
            for (int pb = 0; pb < 4; pb++) {
              if (pa == 0 && pb == 0) continue;
              std::fill(buf.begin(), buf.end(), 0);
              uint32_t obs = 0;
              auto add_side = [&](uint32_t q, int letter) {
                if (letter & 1) {
                  for (size_t w = 0; w < sens.words; w++) buf[w] ^= sens.x(q)[w];
                  obs ^= sens.xo(q);
                }
                if (letter & 2) {
                  for (size_t w = 0; w < sens.words; w++) buf[w] ^= sens.z(q)[w];
                  obs ^= sens.zo(q);
                }
              };
              add_side(a, pa);
              add_side(b, pb);
              add_mech(to_det_list(buf.data(), sens.words), obs, in.p / 15);
            }
          }
        }
        break;
      }
    }
  }

  DetectorErrorModel dem;
  dem.n_detectors = c.n_detectors;
  dem.n_observables = c.n_observables;
  dem.detector_coords = rm.det_coords;
  for (auto& [key, p] : merged) {
    dem.mechanisms.push_back({p, key.dets, key.obs});
    if (key.dets.size() > 2) dem.graphlike = false;
  }
  return dem;
}

// ---------------------------------------------------------------------------
// Forward single-fault propagation (test oracle)

namespace {

struct FaultSite {
  size_t instr;
  size_t slot;      // target index (Dep1), pair index (Dep2), 0 for flips
  int component;    // 1..3 Dep1, 1..15 Dep2, 0 flip
  double p;
};

std::vector<FaultSite> fault_sites(const Circuit& c) {
  std::vector<FaultSite> out;
  for (size_t i = 0; i < c.instrs.size(); i++) {
    const Instruction& in = c.instrs[i];
    if (in.op == OpCode::Dep1) {
      for (size_t t = 0; t < in.targets.size(); t++) {
        for (int comp = 1; comp <= 3; comp++) out.push_back({i, t, comp, in.p / 3});
      }
    } else if (in.op == OpCode::Dep2) {
      for (size_t t = 0; t + 2 <= in.targets.size(); t += 2) {
        for (int comp = 1; comp <= 15; comp++)
          out.push_back({i, t / 2, comp, in.p / 15});
      }
    } else if ((in.op == OpCode::MeasureZ || in.op == OpCode::MeasureX) && in.p > 0) {
      out.push_back({i, 0, 0, in.p});
    }
  }
  return out;
}

}  // namespace

size_t count_faults(const Circuit& c) { return fault_sites(c).size(); }

FaultSymptom fault_symptom(const Circuit& c, size_t fault_index) {
  std::vector<FaultSite> sites = fault_sites(c);
  const FaultSite& site = sites.at(fault_index);
  FaultSymptom out;
  out.p = site.p;
  std::vector<uint8_t> fx(c.n_qubits, 0), fz(c.n_qubits, 0);
  bool injected = false;
  bool flip_pending = false;
  uint32_t meas = 0;
  std::set<uint32_t> flipped;  // flipped measurement records
  for (size_t i = 0; i < c.instrs.size(); i++) {
    const Instruction& in = c.instrs[i];
    if (i == site.instr && in.op != OpCode::MeasureZ && in.op != OpCode::MeasureX) {
      // inject after this noise op's position
      if (in.op == OpCode::Dep1) {
        uint32_t q = in.targets[site.slot];
        fx[q] ^= site.component & 1;
        fz[q] ^= (site.component >> 1) & 1;
      } else {
        uint32_t a = in.targets[site.slot * 2], b = in.targets[site.slot * 2 + 1];
        int pa = site.component & 3, pb = (site.component >> 2) & 3;
        fx[a] ^= pa & 1;
        fz[a] ^= (pa >> 1) & 1;
        fx[b] ^= pb & 1;
        fz[b] ^= (pb >> 1) & 1;
      }
      injected = true;
      continue;
    }
    if (i == site.instr) flip_pending = true;
    switch (in.op) {
      case OpCode::Gate: {
        size_t stride = gate_is_two_qubit(in.gate) ? 2 : 1;
        for (size_t t = 0; t + stride <= in.targets.size(); t += stride) {
          uint32_t a = in.targets[t], b = stride == 2 ? in.targets[t + 1] : 0;
          uint8_t xa = fx[a], za = fz[a];
          switch (in.gate) {
            case GateKind::H: fx[a] = za; fz[a] = xa; break;
            case GateKind::S: fz[a] ^= fx[a]; break;
            case GateKind::SQRT_X: fx[a] ^= fz[a]; break;
            case GateKind::CNOT: fx[b] ^= fx[a]; fz[a] ^= fz[b]; break;
            case GateKind::CZ: fz[a] ^= fx[b]; fz[b] ^= fx[a]; break;
            case GateKind::XCX: fx[a] ^= fz[b]; fx[b] ^= fz[a]; break;
            case GateKind::SWAP:
              std::swap(fx[a], fx[b]);
              std::swap(fz[a], fz[b]);
              break;
          }
        }
        break;
      }
      case OpCode::ResetZ:
      case OpCode::ResetX:
        for (uint32_t q : in.targets) fx[q] = fz[q] = 0;
        break;
      case OpCode::MeasureZ:
      case OpCode::MeasureX: {
        uint32_t q = in.targets[0];
        bool flip = in.op == OpCode::MeasureZ ? fx[q] : fz[q];
        if (flip_pending) {
          flip = !flip;
          flip_pending = false;
          injected = true;
        }
        if (flip) flipped.insert(meas);
        meas++;
        break;
      }
      case OpCode::Mpp: {
        bool flip = false;
        for (size_t t = 0; t < in.targets.size(); t++) {
          uint32_t q = in.targets[t];
          Pauli l = in.letters[t];
          bool ax = l == Pauli::Z || l == Pauli::Y;  // X frame anticommutes
          bool az = l == Pauli::X || l == Pauli::Y;  // Z frame anticommutes
          flip ^= (ax && fx[q]) ^ (az && fz[q]);
        }
        if (flip) flipped.insert(meas);
        meas++;
        break;
      }
      default:
        break;
    }
  }
  if (!injected) throw std::logic_error("fault not injected");
  // detector/observable parities from flipped records
  uint32_t det = 0;
  meas = 0;
  for (const Instruction& in : c.instrs) {
    if (in.op == OpCode::MeasureZ || in.op == OpCode::MeasureX || in.op == OpCode::Mpp) {
      meas++;
    } else if (in.op == OpCode::Detector) {
      bool parity = false;
      for (int64_t off : in.rec_offsets) parity ^= flipped.count((uint32_t)(meas + off));
      if (parity) out.detectors.push_back(det);
      det++;
    } else if (in.op == OpCode::Observable) {
      bool parity = false;
      for (int64_t off : in.rec_offsets) parity ^= flipped.count((uint32_t)(meas + off));
      if (parity) out.observables |= 1u << in.obs_index;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string DetectorErrorModel::emit_text() const {
  std::ostringstream os;
  os << "# floq-dem v1 detectors=" << n_detectors << " observables=" << n_observables
     << "\n";
  for (const DemMechanism& m : mechanisms) {
    os << "error(" << fmt_double(m.p) << ")";
    for (uint32_t d : m.detectors) os << " D" << d;
    for (uint32_t k = 0; k < 32; k++) {
      if (m.observables & (1u << k)) os << " L" << k;
    }
    os << "\n";
  }
  return os.str();
}

DetectorErrorModel DetectorErrorModel::parse_text(const std::string& text) {
  DetectorErrorModel dem;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line);
      std::string tok;
      while (hs >> tok) {
        if (tok.rfind("detectors=", 0) == 0) dem.n_detectors = std::stoul(tok.substr(10));
        if (tok.rfind("observables=", 0) == 0)
          dem.n_observables = std::stoul(tok.substr(12));
      }
      continue;
    }
    if (line.rfind("error(", 0) != 0) throw std::invalid_argument("bad dem line: " + line);
    size_t close = line.find(')');
    DemMechanism m;
    m.p = std::stod(line.substr(6, close - 6));
    std::istringstream ls(line.substr(close + 1));
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == 'D') m.detectors.push_back(std::stoul(tok.substr(1)));
      else if (tok[0] == 'L') m.observables |= 1u << std::stoul(tok.substr(1));
    }
    if (m.detectors.size() > 2) dem.graphlike = false;
    dem.mechanisms.push_back(std::move(m));
  }
  return dem;
}

// ---------------------------------------------------------------------------

std::optional<uint32_t> dem_distance(const DetectorErrorModel& dem,
                                     uint32_t max_weight) {
  // mechanisms touching each detector, for ordered branching
  std::vector<std::vector<uint32_t>> by_det(dem.n_detectors);
  for (uint32_t i = 0; i < dem.mechanisms.size(); i++) {
    for (uint32_t d : dem.mechanisms[i].detectors) by_det[d].push_back(i);
  }
  size_t max_clear = 1;
  for (const auto& m : dem.mechanisms) max_clear = std::max(max_clear, m.detectors.size());

  std::set<uint32_t> active;
  uint32_t obs = 0;
  std::optional<uint32_t> best;

  std::function<void(uint32_t, uint32_t)> go = [&](uint32_t used, uint32_t min_mech) {
    if (best && used >= *best) return;
    if (active.empty()) {
      if (obs != 0) best = used;
      return;
    }
    uint32_t budget = (best ? *best - 1 : max_weight) - used;
    if (active.size() > budget * max_clear) return;
    if (budget == 0) return;
    uint32_t d = *active.begin();
    for (uint32_t mi : by_det[d]) {
      if (active.empty() && mi < min_mech) continue;  // canonical start only
      const DemMechanism& m = dem.mechanisms[mi];
      for (uint32_t dd : m.detectors) {
        if (!active.erase(dd)) active.insert(dd);
      }
      obs ^= m.observables;
      go(used + 1, 0);
      for (uint32_t dd : m.detectors) {
        if (!active.erase(dd)) active.insert(dd);
      }
      obs ^= m.observables;
    }
  };

  // seed with each observable-flipping mechanism
  for (uint32_t i = 0; i < dem.mechanisms.size(); i++) {
    const DemMechanism& m = dem.mechanisms[i];
    if (m.observables == 0) continue;
    if (best && *best <= 1 + 0) break;
    for (uint32_t dd : m.detectors) active.insert(dd);
    obs = m.observables;
    go(1, i + 1);
    active.clear();
    obs = 0;
  }
  if (best && *best <= max_weight) return best;
  return std::nullopt;
}

}  // namespace floq
