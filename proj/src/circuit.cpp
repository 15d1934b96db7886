#include "floq/circuit.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "floq/tableau.hpp"

namespace floq {

const char* protocol_kind_name(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::Memory2d1: return "memory_2d1";
    case ProtocolKind::Memory3d: return "memory_3d";
    case ProtocolKind::FoldH: return "fold_h";
    case ProtocolKind::FoldS: return "fold_s";
    case ProtocolKind::FoldSqrtX: return "fold_sqrt_x";
    case ProtocolKind::DehnLinearH: return "dehn_linear_h";
    case ProtocolKind::DehnLinearV: return "dehn_linear_v";
    case ProtocolKind::DehnInstH: return "dehn_inst_h";
    case ProtocolKind::DehnInstV: return "dehn_inst_v";
  }
  return "?";
}

std::optional<ProtocolKind> protocol_kind_from_name(const std::string& s) {
  for (int k = 0; k <= (int)ProtocolKind::DehnInstV; k++) {
    if (s == protocol_kind_name((ProtocolKind)k)) return (ProtocolKind)k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Text form

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

std::string Circuit::emit_text() const {
  std::ostringstream os;
  os << "# floq-circuit v1 n=" << n_qubits << " " << metadata << "\n";
  for (const Instruction& in : instrs) {
    switch (in.op) {
      case OpCode::QubitCoords:
        os << "QC " << in.targets[0] << " " << fmt_double(in.coords[0]) << " "
           << fmt_double(in.coords[1]);
        break;
      case OpCode::ResetZ:
      case OpCode::ResetX:
        os << (in.op == OpCode::ResetZ ? "R" : "RX");
        for (uint32_t t : in.targets) os << " " << t;
        break;
      case OpCode::Gate:
        os << "GATE " << gate_name(in.gate);
        for (uint32_t t : in.targets) os << " " << t;
        break;
      case OpCode::Dep1:
      case OpCode::Dep2:
        os << (in.op == OpCode::Dep1 ? "DEP1 " : "DEP2 ") << fmt_double(in.p);
        for (uint32_t t : in.targets) os << " " << t;
        break;
      case OpCode::MeasureZ:
      case OpCode::MeasureX:
        os << (in.op == OpCode::MeasureZ ? "MZ " : "MX ") << fmt_double(in.p) << " "
           << in.targets[0];
        break;
      case OpCode::Mpp: {
        os << "MPP ";
        if (in.neg) os << "-";
        for (size_t i = 0; i < in.targets.size(); i++) {
          if (i) os << "*";
          os << pauli_char(in.letters[i]) << in.targets[i];
        }
        break;
      }
      case OpCode::Tick:
        os << "TICK";
        break;
      case OpCode::Detector: {
        os << "DET";
        for (int64_t r : in.rec_offsets) os << " rec[" << r << "]";
        os << " @";
        for (double cvalue : in.coords) os << " " << fmt_double(cvalue);
        if (in.expected_odd) os << " !";
        break;
      }
      case OpCode::Observable: {
        os << "OBS " << in.obs_index;
        for (int64_t r : in.rec_offsets) os << " rec[" << r << "]";
        if (in.expected_odd) os << " !";
        break;
      }
    }
    os << "\n";
  }
  return os.str();
}

Circuit Circuit::parse_text(const std::string& text) {
  Circuit c;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (first) {
        std::istringstream hs(line);
        std::string tok;
        while (hs >> tok) {
          if (tok.rfind("n=", 0) == 0) c.n_qubits = std::stoul(tok.substr(2));
        }
        size_t meta = line.find("n=");
        if (meta != std::string::npos) {
          size_t sp = line.find(' ', meta);
          if (sp != std::string::npos) c.metadata = line.substr(sp + 1);
        }
        first = false;
      }
      continue;
    }
    first = false;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    Instruction ins;
    auto read_targets = [&] {
      uint32_t t;
      while (ls >> t) ins.targets.push_back(t);
    };
    if (word == "QC") {
      ins.op = OpCode::QubitCoords;
      uint32_t q;
      double x, y;
      ls >> q >> x >> y;
      ins.targets = {q};
      ins.coords = {x, y};
    } else if (word == "R" || word == "RX") {
      ins.op = word == "R" ? OpCode::ResetZ : OpCode::ResetX;
      read_targets();
    } else if (word == "GATE") {
      ins.op = OpCode::Gate;
      std::string g;
      ls >> g;
      auto kind = gate_from_name(g);
      if (!kind) throw std::invalid_argument("bad gate: " + g);
      ins.gate = *kind;
      read_targets();
    } else if (word == "DEP1" || word == "DEP2") {
      ins.op = word == "DEP1" ? OpCode::Dep1 : OpCode::Dep2;
      ls >> ins.p;
      read_targets();
    } else if (word == "MZ" || word == "MX") {
      ins.op = word == "MZ" ? OpCode::MeasureZ : OpCode::MeasureX;
      uint32_t t;
      ls >> ins.p >> t;
      ins.targets = {t};
      c.n_measurements++;
    } else if (word == "MPP") {
      ins.op = OpCode::Mpp;
      std::string prod;
      ls >> prod;
      size_t i = 0;
      if (prod[0] == '-') {
        ins.neg = true;
        i = 1;
      } else if (prod[0] == '+') {
        i = 1;
      }
      while (i < prod.size()) {
        if (prod[i] == '*') {
          i++;
          continue;
        }
        Pauli p = pauli_from_char(prod[i++]);
        uint32_t q = 0;
        auto [ptr, ec] = std::from_chars(prod.data() + i, prod.data() + prod.size(), q);
        if (ec != std::errc()) throw std::invalid_argument("bad MPP: " + prod);
        i = ptr - prod.data();
        ins.targets.push_back(q);
        ins.letters.push_back(p);
      }
      c.n_measurements++;
    } else if (word == "TICK") {
      ins.op = OpCode::Tick;
    } else if (word == "DET" || word == "OBS") {
      ins.op = word == "DET" ? OpCode::Detector : OpCode::Observable;
      if (ins.op == OpCode::Observable) {
        ls >> ins.obs_index;
        c.n_observables = std::max(c.n_observables, ins.obs_index + 1);
      } else {
        c.n_detectors++;
      }
      std::string tok;
      bool in_coords = false;
      while (ls >> tok) {
        if (tok == "@") {
          in_coords = true;
        } else if (tok == "!") {
          ins.expected_odd = true;
        } else if (in_coords) {
          ins.coords.push_back(std::stod(tok));
        } else {
          // rec[-k]
          ins.rec_offsets.push_back(std::stoll(tok.substr(4, tok.size() - 5)));
        }
      }
    } else {
      throw std::invalid_argument("bad circuit line: " + line);
    }
    c.instrs.push_back(std::move(ins));
  }
  return c;
}

std::string Circuit::emit_stim() const {
  std::ostringstream os;
  for (const Instruction& in : instrs) {
    switch (in.op) {
      case OpCode::QubitCoords:
        os << "QUBIT_COORDS(" << fmt_double(in.coords[0]) << ", "
           << fmt_double(in.coords[1]) << ") " << in.targets[0];
        break;
      case OpCode::ResetZ:
      case OpCode::ResetX:
        os << (in.op == OpCode::ResetZ ? "R" : "RX");
        for (uint32_t t : in.targets) os << " " << t;
        break;
      case OpCode::Gate: {
        const char* name = gate_name(in.gate);
        os << name;
        for (uint32_t t : in.targets) os << " " << t;
        break;
      }
      case OpCode::Dep1:
        os << "DEPOLARIZE1(" << fmt_double(in.p) << ")";
        for (uint32_t t : in.targets) os << " " << t;
        break;
      case OpCode::Dep2:
        os << "DEPOLARIZE2(" << fmt_double(in.p) << ")";
        for (uint32_t t : in.targets) os << " " << t;
        break;
      case OpCode::MeasureZ:
      case OpCode::MeasureX:
        os << (in.op == OpCode::MeasureZ ? "M" : "MX");
        if (in.p > 0) os << "(" << fmt_double(in.p) << ")";
        os << " " << in.targets[0];
        break;
      case OpCode::Mpp: {
        os << "MPP ";
        for (size_t i = 0; i < in.targets.size(); i++) {
          if (i) os << "*";
          if (i == 0 && in.neg) os << "!";  // stim: inverted result marker
          os << pauli_char(in.letters[i]) << in.targets[i];
        }
        break;
      }
      case OpCode::Tick:
        os << "TICK";
        break;
      case OpCode::Detector: {
        os << "DETECTOR(";
        for (size_t i = 0; i < in.coords.size(); i++) {
          if (i) os << ", ";
          os << fmt_double(in.coords[i]);
        }
        os << ")";
        for (int64_t r : in.rec_offsets) os << " rec[" << r << "]";
        break;
      }
      case OpCode::Observable: {
        os << "OBSERVABLE_INCLUDE(" << in.obs_index << ")";
        for (int64_t r : in.rec_offsets) os << " rec[" << r << "]";
        break;
      }
    }
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Check-circuit expansion (Fig. 17 decomposition)

namespace {

void push_gate_layer(Circuit& c, GateKind kind, const std::vector<uint32_t>& targets,
                     double eps) {
  if (targets.empty()) return;
  Instruction g;
  g.op = OpCode::Gate;
  g.gate = kind;
  g.targets = targets;
  c.instrs.push_back(std::move(g));
  if (eps > 0) {
    Instruction n;
    n.op = gate_is_two_qubit(kind) ? OpCode::Dep2 : OpCode::Dep1;
    n.p = eps;
    n.targets = targets;
    c.instrs.push_back(std::move(n));
  }
}

}  // namespace

uint32_t expand_check_layer(Circuit& c, const ColouredLattice& lat, Colour colour,
                            Pauli basis, double eps) {
  std::vector<uint32_t> all, controls, measured;
  for (const LatticeEdge& e : lat.edges) {
    if (e.colour != colour) continue;
    all.push_back(e.a);
    all.push_back(e.b);
    controls.push_back(e.a);
    measured.push_back(e.b);  // lexicographically larger qubit is measured
  }
  GateKind rot = basis == Pauli::X ? GateKind::H : GateKind::SQRT_X;
  if (basis != Pauli::Z) push_gate_layer(c, rot, all, eps);
  std::vector<uint32_t> pairs;
  for (size_t i = 0; i < controls.size(); i++) {
    pairs.push_back(controls[i]);
    pairs.push_back(measured[i]);
  }
  push_gate_layer(c, GateKind::CNOT, pairs, eps);
  uint32_t first_record = c.n_measurements;
  for (uint32_t m : measured) {
    Instruction mi;
    mi.op = OpCode::MeasureZ;
    mi.p = eps;
    mi.targets = {m};
    c.instrs.push_back(std::move(mi));
    c.n_measurements++;
  }
  push_gate_layer(c, GateKind::CNOT, pairs, eps);
  if (basis != Pauli::Z) push_gate_layer(c, rot, all, eps);
  return first_record;
}

// ---------------------------------------------------------------------------
// Protocol builder

namespace {

struct BuildState {
  Circuit& c;
  TrackedIsg& isg;
  const Schedule& sched;
  double eps;

  void measurement_layer(const ColouredLattice& lat, const SubRoundSpec& sr,
                         bool noisy) {
    double e = noisy ? eps : 0.0;
    uint32_t first = expand_check_layer(c, lat, sr.colour, sr.basis, e);
    auto checks = edge_checks(lat, sr.colour, sr.basis, first);
    auto events = isg.apply_checks(checks);
    if (sr.basis == Pauli::Y) {
      // the sqrt-X sandwich leaves a residual X on every participating qubit
      std::vector<PauliString::Term> ts;
      for (const CheckInput& ci : checks) {
        for (const auto& t : ci.op.terms()) ts.push_back({t.qubit, Pauli::X});
      }
      isg.apply_pauli(PauliString::from_terms(std::move(ts)));
    }
    for (const DetectorEvent& ev : events) {
      Instruction det;
      det.op = OpCode::Detector;
      for (uint32_t m : ev.records) {
        det.rec_offsets.push_back((int64_t)m - (int64_t)c.n_measurements);
      }
      std::sort(det.rec_offsets.begin(), det.rec_offsets.end());
      det.coords = {ev.x, ev.y, (double)ev.sub_round, (double)(uint8_t)ev.basis};
      det.expected_odd = ev.expected_odd;
      c.instrs.push_back(std::move(det));
      c.n_detectors++;
    }
    c.instrs.push_back({.op = OpCode::Tick});
  }

  void qec_round(const ColouredLattice& lat, bool noisy) {
    for (size_t i = 0; i < sched.period(); i++) {
      measurement_layer(lat, sched.sub_rounds[i], noisy);
    }
  }

  void gate_layer(const std::vector<CliffordGate>& gates, bool noisy) {
    if (gates.empty()) return;
    // batch by kind for compact output; layers are target-disjoint
    std::vector<uint32_t> batch;
    for (size_t i = 0; i < gates.size();) {
      GateKind kind = gates[i].kind;
      batch.clear();
      size_t j = i;
      while (j < gates.size() && gates[j].kind == kind) {
        batch.push_back(gates[j].a);
        if (gate_is_two_qubit(kind)) batch.push_back(gates[j].b);
        j++;
      }
      push_gate_layer(c, kind, batch, noisy ? eps : 0.0);
      i = j;
    }
    isg.apply_gate_layer(gates);
    c.instrs.push_back({.op = OpCode::Tick});
  }
};

}  // namespace

Circuit build_protocol_circuit(const ProtocolSpec& spec) {
  ColouredLattice lat;
  switch (spec.lattice) {
    case LatticeKind::Honeycomb: lat = build_honeycomb_torus(spec.d); break;
    case LatticeKind::Square488: lat = build_488_torus(spec.d); break;
    case LatticeKind::Rotated488: lat = build_rotated_488(spec.d); break;
  }
  Schedule sched = Schedule::css6();
  LogicalBasis basis = build_logical_basis(lat, sched);

  GatePlan plan;
  switch (spec.kind) {
    case ProtocolKind::Memory2d1:
    case ProtocolKind::Memory3d: {
      uint32_t rounds = spec.kind == ProtocolKind::Memory2d1 ? 1 : spec.d;
      PlanStep step;
      step.lattice_after = lat;
      step.rounds_after = rounds;
      plan.steps.push_back(std::move(step));
      plan.rounds_cost = rounds;
      plan.claimed = LogicalAction::identity();
      plan.name = protocol_kind_name(spec.kind);
      break;
    }
    case ProtocolKind::FoldH:
    case ProtocolKind::FoldS:
    case ProtocolKind::FoldSqrtX: {
      auto tau = find_zx_duality(lat);
      if (!tau) throw std::runtime_error("no duality on this lattice");
      plan = spec.kind == ProtocolKind::FoldH    ? fold_hadamard(lat, *tau)
             : spec.kind == ProtocolKind::FoldS ? fold_s(lat, *tau)
                                                : fold_sqrt_x(lat, *tau);
      break;
    }
    case ProtocolKind::DehnLinearH:
      plan = dehn_twist_linear(lat, Homology::Horizontal);
      break;
    case ProtocolKind::DehnLinearV:
      plan = dehn_twist_linear(lat, Homology::Vertical);
      break;
    case ProtocolKind::DehnInstH: {
      uint32_t p = (uint32_t)find_twist_loops(lat, Homology::Horizontal).size();
      plan = dehn_twist_instantaneous(lat, Homology::Horizontal, p);
      break;
    }
    case ProtocolKind::DehnInstV: {
      uint32_t p = (uint32_t)find_twist_loops(lat, Homology::Vertical).size();
      plan = dehn_twist_instantaneous(lat, Homology::Vertical, p);
      break;
    }
  }

  Circuit c;
  c.n_qubits = lat.n_qubits;
  {
    std::ostringstream meta;
    meta << "kind=" << protocol_kind_name(spec.kind) << " d=" << spec.d
         << " eps=" << fmt_double(spec.eps) << " bases="
         << pauli_char(spec.basis0) << pauli_char(spec.basis1);
    c.metadata = meta.str();
  }
  for (uint32_t q = 0; q < lat.n_qubits; q++) {
    Instruction qc;
    qc.op = OpCode::QubitCoords;
    qc.targets = {q};
    qc.coords = {lat.coords[q].first, lat.coords[q].second};
    c.instrs.push_back(std::move(qc));
  }

  TrackedIsg isg(lat.n_qubits);
  size_t max_plq = 0;
  for (const auto& p : lat.plaquettes) max_plq = std::max(max_plq, p.cycle.size());
  isg.set_record_cap(2 * max_plq);

  // noiseless product-state preparation fixing both logical strings
  const PauliString& p_str = spec.basis0 == Pauli::X ? basis.x0() : basis.z0();
  const PauliString& q_str = spec.basis1 == Pauli::X ? basis.x1() : basis.z1();
  std::vector<uint32_t> reset_x, reset_z;
  {
    std::vector<Pauli> want(lat.n_qubits, Pauli::Z);
    for (const auto& [str, b] : {std::make_pair(&p_str, spec.basis0),
                                 std::make_pair(&q_str, spec.basis1)}) {
      for (const auto& t : str->terms()) {
        if (want[t.qubit] != Pauli::Z && want[t.qubit] != t.p)
          throw std::logic_error("conflicting reset bases (basis overlap)");
        want[t.qubit] = t.p;
      }
      (void)b;
    }
    for (uint32_t q = 0; q < lat.n_qubits; q++) {
      (want[q] == Pauli::X ? reset_x : reset_z).push_back(q);
      isg.apply_reset(q, want[q]);
    }
  }
  if (!reset_z.empty()) {
    Instruction r;
    r.op = OpCode::ResetZ;
    r.targets = reset_z;
    c.instrs.push_back(std::move(r));
  }
  if (!reset_x.empty()) {
    Instruction r;
    r.op = OpCode::ResetX;
    r.targets = reset_x;
    c.instrs.push_back(std::move(r));
  }
  c.instrs.push_back({.op = OpCode::Tick});
  isg.add_observable(p_str);
  isg.add_observable(q_str);

  BuildState st{c, isg, sched, spec.eps};
  // prep projection + the perfect QEC round
  st.qec_round(lat, false);
  st.qec_round(lat, false);
  // d noisy rounds before the logical operation
  for (uint32_t r = 0; r < spec.d; r++) st.qec_round(lat, true);
  // the logical operation with its own QEC rounds
  ColouredLattice current = lat;
  for (const PlanStep& step : plan.steps) {
    st.gate_layer(step.layer1, true);
    st.gate_layer(step.layer2, true);
    current = step.lattice_after;
    // relabelling is bookkeeping only: the emitted circuit keeps physical
    // indices and simply continues on the post-twist lattice
    for (uint32_t r = 0; r < step.rounds_after; r++) st.qec_round(current, true);
  }
  // d noisy rounds after, one perfect round, then logical readout
  for (uint32_t r = 0; r < spec.d; r++) st.qec_round(current, true);
  st.qec_round(current, false);

  for (int i = 0; i < 2; i++) {
    const TrackedElement& obs = isg.observables()[i];
    Instruction mpp;
    mpp.op = OpCode::Mpp;
    for (const auto& t : obs.op.terms()) {
      mpp.targets.push_back(t.qubit);
      mpp.letters.push_back(t.p);
    }
    mpp.neg = false;  // measure the unsigned word; the sign feeds the flag
    c.instrs.push_back(std::move(mpp));
    c.n_measurements++;
    Instruction ob;
    ob.op = OpCode::Observable;
    ob.obs_index = (uint32_t)i;
    ob.rec_offsets.push_back(-1);
    for (uint32_t m : obs.records) {
      ob.rec_offsets.push_back((int64_t)m - (int64_t)c.n_measurements);
    }
    std::sort(ob.rec_offsets.begin(), ob.rec_offsets.end());
    ob.expected_odd = obs.op.negative();
    c.instrs.push_back(std::move(ob));
  }
  c.n_observables = 2;
  return c;
}

// ---------------------------------------------------------------------------
// Noiseless replay oracle

ReplayResult replay_noiseless(const Circuit& c, uint64_t seed) {
  Tableau t(c.n_qubits);
  uint64_t state = seed;
  t.set_coin([state]() mutable {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return ((state * 0x2545F4914F6CDD1Dull) >> 63) != 0;
  });
  std::vector<bool> record;
  bool last_mpp_det = true;
  ReplayResult res;
  res.all_detectors_deterministic = true;
  for (const Instruction& in : c.instrs) {
    switch (in.op) {
      case OpCode::QubitCoords:
      case OpCode::Tick:
      case OpCode::Dep1:
      case OpCode::Dep2:
        break;
      case OpCode::ResetZ:
        for (uint32_t q : in.targets) t.reset(q, Pauli::Z);
        break;
      case OpCode::ResetX:
        for (uint32_t q : in.targets) t.reset(q, Pauli::X);
        break;
      case OpCode::Gate: {
        size_t stride = gate_is_two_qubit(in.gate) ? 2 : 1;
        for (size_t i = 0; i + stride <= in.targets.size(); i += stride) {
          if (stride == 1) t.apply(CliffordGate::one(in.gate, in.targets[i]));
          else t.apply(CliffordGate::two(in.gate, in.targets[i], in.targets[i + 1]));
        }
        break;
      }
      case OpCode::MeasureZ:
        record.push_back(t.measure(PauliString::single(in.targets[0], Pauli::Z)).value);
        break;
      case OpCode::MeasureX:
        record.push_back(t.measure(PauliString::single(in.targets[0], Pauli::X)).value);
        break;
      case OpCode::Mpp: {
        std::vector<PauliString::Term> ts;
        for (size_t i = 0; i < in.targets.size(); i++)
          ts.push_back({in.targets[i], in.letters[i]});
        auto r = t.measure(PauliString::from_terms(std::move(ts), in.neg));
        last_mpp_det = r.deterministic;
        record.push_back(r.value);
        break;
      }
      case OpCode::Detector: {
        res.n_detectors++;
        bool parity = in.expected_odd;
        for (int64_t off : in.rec_offsets) {
          parity = parity != record[record.size() + off];
        }
        if (parity) {
          res.odd_detectors++;
          res.all_detectors_deterministic = false;
        }
        break;
      }
      case OpCode::Observable: {
        bool parity = in.expected_odd;
        for (int64_t off : in.rec_offsets) {
          parity = parity != record[record.size() + off];
        }
        if (res.observable_values.size() <= in.obs_index) {
          res.observable_values.resize(in.obs_index + 1, false);
          res.observables_deterministic.resize(in.obs_index + 1, true);
        }
        res.observable_values[in.obs_index] = parity;
        res.observables_deterministic[in.obs_index] = last_mpp_det;
        break;
      }
    }
  }
  return res;
}

}  // namespace floq
