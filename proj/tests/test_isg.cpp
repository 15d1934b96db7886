#include "floq/isg.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <set>

#include "doctest.h"

using namespace floq;

namespace {

struct Runner {
  const ColouredLattice& lat;
  TrackedIsg isg;
  uint32_t m_counter = 0;
  std::map<uint32_t, uint64_t> layer_of_record;

  explicit Runner(const ColouredLattice& l) : lat(l), isg(l.n_qubits) {
    size_t max_plq = 0;
    for (auto& pl : l.plaquettes) max_plq = std::max(max_plq, pl.cycle.size());
    isg.set_record_cap(2 * max_plq);
  }

  std::vector<DetectorEvent> layer(Colour c, Pauli p) {
    auto checks = edge_checks(lat, c, p, m_counter);
    uint64_t t = isg.sub_round_counter();
    for (const CheckInput& ci : checks) layer_of_record[ci.m_index] = t;
    m_counter += (uint32_t)checks.size();
    return isg.apply_checks(checks);
  }

  std::vector<DetectorEvent> run_schedule(const Schedule& s, size_t n_layers,
                                          std::vector<uint64_t>* per_layer = nullptr) {
    std::vector<DetectorEvent> all;
    for (size_t i = 0; i < n_layers; i++) {
      const SubRoundSpec& sr = s.sub_rounds[i % s.period()];
      auto ev = layer(sr.colour, sr.basis);
      if (per_layer) per_layer->push_back(ev.size());
      for (auto& e : ev) all.push_back(std::move(e));
    }
    return all;
  }

  uint64_t span_of(const DetectorEvent& ev) {
    uint64_t lo = UINT64_MAX, hi = 0;
    for (uint32_t m : ev.records) {
      lo = std::min(lo, layer_of_record[m]);
      hi = std::max(hi, layer_of_record[m]);
    }
    return hi - lo + 1;
  }
};

}  // namespace

TEST_CASE("repeating a layer gives per-edge two-record detectors") {
  ColouredLattice lat = build_honeycomb_torus(2);
  Runner r(lat);
  auto ev0 = r.layer(Colour::Red, Pauli::X);
  CHECK(ev0.empty());
  auto ev1 = r.layer(Colour::Red, Pauli::X);
  size_t n_red = 0;
  for (auto& e : lat.edges) n_red += e.colour == Colour::Red;
  CHECK(ev1.size() == n_red);
  for (auto& e : ev1) {
    CHECK(e.records.size() == 2);
    CHECK_FALSE(e.expected_odd);
  }
}

TEST_CASE("css bulk detecting regions live five sub-rounds") {
  for (uint32_t d : {2u, 3u}) {
    ColouredLattice lat = build_honeycomb_torus(d);
    Runner r(lat);
    std::vector<uint64_t> per_layer;
    auto events = r.run_schedule(Schedule::css6(), 12, &per_layer);
    // steady state from layer 4 onwards: one closure per plaquette of one
    // colour per sub-round
    for (size_t i = 4; i < 12; i++) {
      CHECK(per_layer[i] == d * d);
    }
    for (auto& ev : events) {
      CHECK(r.span_of(ev) == 5);
      CHECK(ev.records.size() == 6);
      CHECK_FALSE(ev.expected_odd);
    }
  }
}

TEST_CASE("period-3 bulk detectors use twelve records") {
  ColouredLattice lat = build_honeycomb_torus(2);
  Runner r(lat);
  std::vector<uint64_t> per_layer;
  auto events = r.run_schedule(Schedule::period3(), 10, &per_layer);
  CHECK(per_layer[0] == 0);
  CHECK(per_layer[1] == 0);
  // blue-plaquette regions: X at rXX(0) ... measured out at gYY(4)
  for (size_t i = 4; i < 10; i++) {
    CHECK(per_layer[i] == lat.d * lat.d);
  }
  for (auto& ev : events) {
    CHECK(ev.records.size() == 12);
    CHECK(r.span_of(ev) == 5);
  }
}

TEST_CASE("snapshot between bZZ and rXX matches the css family list") {
  ColouredLattice lat = build_honeycomb_torus(2);
  Runner r(lat);
  r.run_schedule(Schedule::css6(), 12);  // ends after bZZ
  auto snap = r.isg.snapshot_stabilizers(lat);
  // the five generating families of the css seam, plus their derived
  // products (rZ from the blue edges inside a red plaquette, and the Y
  // letters they imply)
  std::map<std::string, size_t> want = {
      {"edge:bZ", 3u * lat.d * lat.d}, {"plaq:bZ", lat.d * lat.d},
      {"plaq:gX", lat.d * lat.d},      {"plaq:gZ", lat.d * lat.d},
      {"plaq:rX", lat.d * lat.d},      {"plaq:rZ", lat.d * lat.d},
      {"plaq:rY", lat.d * lat.d},      {"plaq:gY", lat.d * lat.d},
  };
  std::map<std::string, size_t> got(snap.begin(), snap.end());
  CHECK(got == want);
  CHECK_FALSE(got.count("plaq:bX"));
  // two logical qubits on the torus
  CHECK(r.isg.group_rank() == lat.n_qubits - 2);
}

TEST_CASE("cold start snapshot is empty") {
  ColouredLattice lat = build_honeycomb_torus(2);
  TrackedIsg isg(lat.n_qubits);
  CHECK(isg.snapshot_stabilizers(lat).empty());
  CHECK(isg.group_rank() == 0);
}

TEST_CASE("fold-H layer turns blue edge checks into red-edge X checks") {
  ColouredLattice lat = build_honeycomb_torus(2);
  auto dual = find_zx_duality(lat);
  REQUIRE(dual.has_value());
  Runner r(lat);
  r.run_schedule(Schedule::css6(), 12);
  std::vector<CliffordGate> hs, swaps;
  for (uint32_t q = 0; q < lat.n_qubits; q++) hs.push_back(CliffordGate::one(GateKind::H, q));
  for (uint32_t q = 0; q < lat.n_qubits; q++) {
    if (q < dual->map[q]) swaps.push_back(CliffordGate::two(GateKind::SWAP, q, dual->map[q]));
  }
  r.isg.apply_gate_layer(hs);
  r.isg.apply_gate_layer(swaps);
  auto snap = r.isg.snapshot_stabilizers(lat);
  std::map<std::string, size_t> got(snap.begin(), snap.end());
  std::map<std::string, size_t> want = {
      {"edge:rX", 3u * lat.d * lat.d}, {"plaq:bZ", lat.d * lat.d},
      {"plaq:gX", lat.d * lat.d},      {"plaq:gZ", lat.d * lat.d},
      {"plaq:rX", lat.d * lat.d},      {"plaq:bX", lat.d * lat.d},
      {"plaq:bY", lat.d * lat.d},      {"plaq:gY", lat.d * lat.d},
  };
  CHECK(got == want);
  CHECK_FALSE(got.count("edge:bZ"));
}

TEST_CASE("fold-S layer keeps the seam group but widens closures") {
  ColouredLattice lat = build_honeycomb_torus(3);
  auto dual = find_zx_duality(lat);
  REQUIRE(dual.has_value());
  Runner r(lat);
  r.run_schedule(Schedule::css6(), 12);
  auto group_before = r.isg.snapshot_stabilizers(lat);
  std::vector<CliffordGate> layer;
  for (uint32_t q : dual->fixed_points) layer.push_back(CliffordGate::one(GateKind::S, q));
  for (uint32_t q = 0; q < lat.n_qubits; q++) {
    if (q < dual->map[q]) layer.push_back(CliffordGate::two(GateKind::CZ, q, dual->map[q]));
  }
  r.isg.apply_gate_layer(layer);
  // the S-type fold is a symmetry of the seam stabiliser group
  CHECK(r.isg.snapshot_stabilizers(lat) == group_before);
  // the X detecting regions pick up a Z component: their closures now use
  // nine records instead of six, first at rXX and again at bXX
  auto ev_rxx = r.layer(Colour::Red, Pauli::X);
  REQUIRE(ev_rxx.size() == lat.d * lat.d);
  for (auto& e : ev_rxx) CHECK(e.records.size() == 9);
  auto ev_gzz = r.layer(Colour::Green, Pauli::Z);
  for (auto& e : ev_gzz) CHECK(e.records.size() == 6);
  auto ev_bxx = r.layer(Colour::Blue, Pauli::X);
  REQUIRE(ev_bxx.size() == lat.d * lat.d);
  for (auto& e : ev_bxx) CHECK(e.records.size() == 9);
  // and the code settles back to the plain six-record bulk
  r.layer(Colour::Red, Pauli::Z);
  r.layer(Colour::Green, Pauli::X);
  r.layer(Colour::Blue, Pauli::Z);
  auto ev = r.layer(Colour::Red, Pauli::X);
  for (auto& e : ev) CHECK(e.records.size() == 6);
}

TEST_CASE("gate layers reject overlapping targets") {
  TrackedIsg isg(4);
  std::vector<CliffordGate> bad = {CliffordGate::two(GateKind::CNOT, 0, 1),
                                   CliffordGate::two(GateKind::CZ, 1, 2)};
  CHECK_THROWS_AS(isg.apply_gate_layer(bad), std::invalid_argument&);
}

TEST_CASE("identity gate layer leaves the isg unchanged") {
  ColouredLattice lat = build_honeycomb_torus(2);
  Runner r(lat);
  r.run_schedule(Schedule::css6(), 6);
  auto before = r.isg.snapshot_stabilizers(lat);
  r.isg.apply_gate_layer({});
  CHECK(r.isg.snapshot_stabilizers(lat) == before);
}
