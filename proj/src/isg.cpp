#include "floq/isg.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace floq {

Schedule Schedule::css6() {
  return {ScheduleKind::Period6Css,
          {{Colour::Red, Pauli::X},
           {Colour::Green, Pauli::Z},
           {Colour::Blue, Pauli::X},
           {Colour::Red, Pauli::Z},
           {Colour::Green, Pauli::X},
           {Colour::Blue, Pauli::Z}}};
}

Schedule Schedule::period3() {
  return {ScheduleKind::Period3,
          {{Colour::Red, Pauli::X},
           {Colour::Green, Pauli::Y},
           {Colour::Blue, Pauli::Z}}};
}

std::string Schedule::name(size_t i) const {
  const SubRoundSpec& s = sub_rounds[i % sub_rounds.size()];
  std::string out(1, colour_char(s.colour));
  out += pauli_char(s.basis);
  out += pauli_char(s.basis);
  return out;
}

std::vector<CheckInput> edge_checks(const ColouredLattice& lat, Colour c,
                                    Pauli p, uint32_t m0) {
  std::vector<CheckInput> out;
  for (const LatticeEdge& e : lat.edges) {
    if (e.colour != c) continue;
    CheckInput ci;
    ci.op = PauliString::from_terms({{e.a, p}, {e.b, p}});
    ci.m_index = m0 + (uint32_t)out.size();
    ci.x = (lat.coords[e.a].first + lat.coords[e.b].first) / 2;
    ci.y = (lat.coords[e.a].second + lat.coords[e.b].second) / 2;
    out.push_back(std::move(ci));
  }
  return out;
}

TrackedIsg::TrackedIsg(uint32_t n_qubits) : n_(n_qubits) {}

void TrackedIsg::apply_reset(uint32_t q, Pauli basis) {
  // Resets occur only at circuit start here; the fresh stabilizer has no
  // record dependence.
  elems_.push_back({PauliString::single(q, basis), {}, birth_counter_++});
}

void TrackedIsg::add_observable(PauliString op) {
  obs_.push_back({std::move(op), {}, birth_counter_++});
}

namespace {

std::vector<uint32_t> xor_records(const std::vector<uint32_t>& a,
                                  const std::vector<uint32_t>& b) {
  std::vector<uint32_t> out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<DetectorEvent> TrackedIsg::apply_checks(
    std::span<const CheckInput> checks) {
  std::vector<DetectorEvent> events;

  // Pass A: detectors. Derivations are taken over the layer-start elements
  // plus the earlier checks of this same layer; the subset product commutes
  // with every intervening measurement, so its parity is deterministic.
  // Newest-first insertion biases decompositions toward recent, local
  // record sets.
  std::vector<size_t> order(elems_.size());
  for (size_t i = 0; i < order.size(); i++) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return elems_[a].birth > elems_[b].birth; });
  GroupSolver solver(n_);
  for (size_t i : order) solver.add_generator(elems_[i].op);
  size_t n_start = elems_.size();
  for (size_t k = 0; k < checks.size(); k++) {
    auto dec = solver.decompose(checks[k].op);
    if (dec) {
      if (dec->imaginary)
        throw std::logic_error("imaginary check derivation (tracker bug)");
      DetectorEvent ev;
      ev.records = {checks[k].m_index};
      for (uint32_t gi : dec->gen_indices) {
        if (gi < n_start) {
          ev.records = xor_records(ev.records, elems_[order[gi]].records);
        } else {
          ev.records = xor_records(ev.records, {checks[gi - n_start].m_index});
        }
      }
      ev.expected_odd = dec->negated;
      ev.x = checks[k].x;
      ev.y = checks[k].y;
      ev.sub_round = sub_rounds_;
      // basis tag: the letter the check measures on its first qubit
      ev.basis = checks[k].op.terms().empty() ? Pauli::I : checks[k].op.terms()[0].p;
      events.push_back(std::move(ev));
    }
    solver.add_generator(checks[k].op);
  }
  // Sparsify with the whole layer plus recent history available; the raw
  // record sets stay in the dictionary so later layers can reuse them. The
  // per-layer sums capture the global parity directions a torus code
  // accumulates, which would otherwise contaminate local closures.
  std::vector<uint32_t> layer_sum;
  bool layer_odd = false;
  for (const DetectorEvent& ev : events) {
    recent_events_.push_back({ev.records, ev.expected_odd});
    layer_sum = xor_records(layer_sum, ev.records);
    layer_odd = layer_odd != ev.expected_odd;
  }
  if (!layer_sum.empty()) layer_sums_.push_back({layer_sum, layer_odd});
  for (DetectorEvent& ev : events) minimize_event(ev);
  std::erase_if(events, [&](const DetectorEvent& ev) {
    return ev.records.size() > record_cap_;
  });
  const size_t window = 4u * std::max<uint32_t>(n_, 8);
  if (recent_events_.size() > window) {
    recent_events_.erase(recent_events_.begin(),
                         recent_events_.end() - (ptrdiff_t)window);
  }
  if (layer_sums_.size() > 64) {
    layer_sums_.erase(layer_sums_.begin(), layer_sums_.end() - 64);
  }

  // Pass B: state update. Anticommuting elements merge through a pivot which
  // is then discarded; observables are restored the same way ("measurement
  // outcomes multiplied into the observables").
  for (const CheckInput& c : checks) {
    std::vector<size_t> anti;
    for (size_t i = 0; i < elems_.size(); i++) {
      if (!elems_[i].op.commutes_with(c.op)) anti.push_back(i);
    }
    if (!anti.empty()) {
      size_t pivot = anti[0];
      for (size_t i : anti) {
        auto better = std::make_pair(elems_[i].op.weight(), elems_[i].birth);
        auto cur = std::make_pair(elems_[pivot].op.weight(), elems_[pivot].birth);
        if (better < cur) pivot = i;
      }
      for (size_t i : anti) {
        if (i == pivot) continue;
        elems_[i].op = elems_[i].op.times(elems_[pivot].op);
        elems_[i].records = xor_records(elems_[i].records, elems_[pivot].records);
      }
      for (TrackedElement& o : obs_) {
        if (!o.op.commutes_with(c.op)) {
          o.op = o.op.times(elems_[pivot].op);
          o.records = xor_records(o.records, elems_[pivot].records);
        }
      }
      elems_.erase(elems_.begin() + pivot);
    } else {
      for (TrackedElement& o : obs_) {
        if (!o.op.commutes_with(c.op))
          throw std::runtime_error(
              "logical observable cannot be restored to commuting form");
      }
    }
    elems_.push_back({c.op, {c.m_index}, birth_counter_++});
  }

  prune_dependent();
  sub_rounds_++;
  return events;
}

void TrackedIsg::minimize_event(DetectorEvent& ev) const {
  // XOR of deterministic parity sets is deterministic; greedily shrink.
  auto strict_pass = [&](std::vector<uint32_t>& recs, bool& odd) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto* dict : {&recent_events_, &layer_sums_}) {
        for (const auto& [r, o] : *dict) {
          std::vector<uint32_t> merged = xor_records(recs, r);
          if (!merged.empty() && merged.size() < recs.size()) {
            recs = std::move(merged);
            odd = odd != o;
            changed = true;
          }
        }
      }
    }
  };
  strict_pass(ev.records, ev.expected_odd);
  // Sideways moves through layer sums unlock further strict reduction of
  // globally contaminated closures; pairs cover period-3 schedules where
  // two whole-layer parities combine.
  bool improved = true;
  while (improved && ev.records.size() > record_cap_) {
    improved = false;
    for (size_t i = 0; i < layer_sums_.size() && !improved; i++) {
      for (size_t j = i; j < layer_sums_.size() && !improved; j++) {
        std::vector<uint32_t> base = layer_sums_[i].first;
        bool bodd = layer_sums_[i].second;
        if (j != i) {
          base = xor_records(base, layer_sums_[j].first);
          bodd = bodd != layer_sums_[j].second;
        }
        std::vector<uint32_t> cand = xor_records(ev.records, base);
        bool codd = ev.expected_odd != bodd;
        strict_pass(cand, codd);
        if (!cand.empty() && cand.size() < ev.records.size()) {
          ev.records = std::move(cand);
          ev.expected_odd = codd;
          improved = true;
        }
      }
    }
  }
}

void TrackedIsg::prune_dependent() {
  // Newest-first insertion keeps re-measured checks and drops stale copies;
  // the group span is unchanged.
  std::vector<size_t> order(elems_.size());
  for (size_t i = 0; i < order.size(); i++) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return elems_[a].birth > elems_[b].birth;
  });
  GroupSolver solver(n_);
  std::vector<bool> keep(elems_.size(), false);
  for (size_t i : order) {
    size_t before = solver.rank();
    solver.add_generator(elems_[i].op);
    keep[i] = solver.rank() > before;
  }
  std::vector<TrackedElement> kept;
  kept.reserve(elems_.size());
  for (size_t i = 0; i < elems_.size(); i++) {
    if (keep[i]) kept.push_back(std::move(elems_[i]));
  }
  elems_ = std::move(kept);
}

void TrackedIsg::apply_gate_layer(std::span<const CliffordGate> gates) {
  std::vector<bool> touched(n_, false);
  for (const CliffordGate& g : gates) {
    if (touched[g.a]) throw std::invalid_argument("overlapping gate targets in layer");
    touched[g.a] = true;
    if (gate_is_two_qubit(g.kind)) {
      if (touched[g.b]) throw std::invalid_argument("overlapping gate targets in layer");
      touched[g.b] = true;
    }
  }
  for (TrackedElement& e : elems_) {
    for (const CliffordGate& g : gates) e.op.conjugate(g);
  }
  for (TrackedElement& o : obs_) {
    for (const CliffordGate& g : gates) o.op.conjugate(g);
  }
}

void TrackedIsg::apply_pauli(const PauliString& p) {
  for (TrackedElement& e : elems_) {
    if (!e.op.commutes_with(p)) e.op.set_negative(!e.op.negative());
  }
  for (TrackedElement& o : obs_) {
    if (!o.op.commutes_with(p)) o.op.set_negative(!o.op.negative());
  }
}

void TrackedIsg::permute(std::span<const uint32_t> perm) {
  for (TrackedElement& e : elems_) e.op.permute(perm);
  for (TrackedElement& o : obs_) o.op.permute(perm);
}

bool TrackedIsg::group_contains(const PauliString& p) const {
  GroupSolver solver(n_);
  for (const TrackedElement& e : elems_) solver.add_generator(e.op);
  return solver.contains_word(p);
}

size_t TrackedIsg::group_rank() const {
  GroupSolver solver(n_);
  for (const TrackedElement& e : elems_) solver.add_generator(e.op);
  return solver.rank();
}

std::vector<std::pair<std::string, size_t>> TrackedIsg::snapshot_stabilizers(
    const ColouredLattice& lat, const std::vector<uint32_t>* tau) const {
  GroupSolver solver(n_);
  for (const TrackedElement& e : elems_) solver.add_generator(e.op);
  std::map<std::string, size_t> hits;
  auto uniform = [](const std::vector<uint32_t>& qs, Pauli p) {
    std::vector<PauliString::Term> ts;
    for (uint32_t q : qs) ts.push_back({q, p});
    return PauliString::from_terms(std::move(ts));
  };
  const Pauli letters[3] = {Pauli::X, Pauli::Y, Pauli::Z};
  for (const LatticeEdge& e : lat.edges) {
    for (Pauli p : letters) {
      if (solver.contains_word(uniform({e.a, e.b}, p))) {
        hits[std::string("edge:") + colour_char(e.colour) + pauli_char(p)]++;
      }
    }
  }
  std::vector<std::vector<bool>> single_ok(lat.plaquettes.size(),
                                           std::vector<bool>(3, false));
  for (size_t pi = 0; pi < lat.plaquettes.size(); pi++) {
    for (int li = 0; li < 3; li++) {
      if (solver.contains_word(uniform(lat.plaquettes[pi].cycle, letters[li]))) {
        single_ok[pi][li] = true;
        hits[std::string("plaq:") + colour_char(lat.plaquettes[pi].colour) +
             pauli_char(letters[li])]++;
      }
    }
  }
  if (tau) {
    for (size_t pi = 0; pi < lat.plaquettes.size(); pi++) {
      // partner plaquette: image of this one under tau, same colour family
      uint32_t q0 = (*tau)[lat.plaquettes[pi].cycle[0]];
      for (Colour c2 : {Colour::Red, Colour::Green, Colour::Blue}) {
        uint32_t pj = lat.plaquette_of(q0, c2);
        if (pj <= pi) continue;  // unordered pairs once
        for (int l1 = 0; l1 < 3; l1++) {
          for (int l2 = 0; l2 < 3; l2++) {
            if (single_ok[pi][l1] || single_ok[pj][l2]) continue;  // implied
            PauliString probe = uniform(lat.plaquettes[pi].cycle, letters[l1])
                                    .times(uniform(lat.plaquettes[pj].cycle, letters[l2]));
            if (!solver.contains_word(probe)) continue;
            std::string a = std::string(1, colour_char(lat.plaquettes[pi].colour)) +
                            pauli_char(letters[l1]);
            std::string b = std::string(1, colour_char(lat.plaquettes[pj].colour)) +
                            pauli_char(letters[l2]);
            hits["plaq2:" + std::min(a, b) + ":" + std::max(a, b)]++;
          }
        }
      }
    }
  }
  return {hits.begin(), hits.end()};
}

}  // namespace floq
