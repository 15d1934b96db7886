#include "floq/sampler.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace floq {

namespace {

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// one uniform double per (seed, batch, site, draw)
inline double rng_double(uint64_t seed, uint64_t batch, uint64_t site, uint64_t draw) {
  uint64_t v = mix64(seed ^ mix64(batch ^ mix64(site ^ mix64(draw))));
  return (double)(v >> 11) * 0x1.0p-53;
}

inline uint64_t rng_u64(uint64_t seed, uint64_t batch, uint64_t site, uint64_t draw) {
  return mix64(0x5851f42d4c957f2dull ^ seed ^ mix64(batch ^ mix64(site ^ mix64(draw))));
}

// Compiled instruction stream for the frame simulator.
struct SimOp {
  enum Kind : uint8_t { G1, G2, DepOne, DepTwo, Meas, MppOp, Reset } kind;
  GateKind gate = GateKind::H;
  uint32_t a = 0, b = 0;
  double p = 0;
  double log1m = 0;  // log(1 - p)
  uint32_t site = 0;
  bool x_basis = false;  // Meas: MX; Reset: RX
  std::vector<uint32_t> dets;       // Meas/Mpp: flipped detectors
  uint64_t obs = 0;                 // flipped observables mask
  std::vector<std::pair<uint32_t, uint8_t>> mpp;  // (qubit, letter bits)
};

struct CompiledCircuit {
  uint32_t n_qubits = 0;
  uint32_t n_detectors = 0;
  uint32_t n_observables = 0;
  std::vector<SimOp> ops;
};

CompiledCircuit compile(const Circuit& c) {
  CompiledCircuit cc;
  cc.n_qubits = c.n_qubits;
  cc.n_detectors = c.n_detectors;
  cc.n_observables = c.n_observables;
  // record -> detector/observable membership
  std::vector<std::vector<uint32_t>> mdets(c.n_measurements);
  std::vector<uint64_t> mobs(c.n_measurements, 0);
  {
    uint32_t meas = 0, det = 0;
    for (const Instruction& in : c.instrs) {
      if (in.op == OpCode::MeasureZ || in.op == OpCode::MeasureX || in.op == OpCode::Mpp) {
        meas++;
      } else if (in.op == OpCode::Detector) {
        for (int64_t off : in.rec_offsets) mdets[meas + off].push_back(det);
        det++;
      } else if (in.op == OpCode::Observable) {
        for (int64_t off : in.rec_offsets) mobs[meas + off] |= 1ull << in.obs_index;
      }
    }
  }
  uint32_t site = 0, meas = 0;
  for (const Instruction& in : c.instrs) {
    switch (in.op) {
      case OpCode::Gate: {
        size_t stride = gate_is_two_qubit(in.gate) ? 2 : 1;
        for (size_t i = 0; i + stride <= in.targets.size(); i += stride) {
          SimOp op;
          op.kind = stride == 2 ? SimOp::G2 : SimOp::G1;
          op.gate = in.gate;
          op.a = in.targets[i];
          if (stride == 2) op.b = in.targets[i + 1];
          cc.ops.push_back(std::move(op));
        }
        break;
      }
      case OpCode::Dep1:
        for (uint32_t q : in.targets) {
          SimOp op;
          op.kind = SimOp::DepOne;
          op.a = q;
          op.p = in.p;
          op.log1m = std::log1p(-in.p);
          op.site = site++;
          cc.ops.push_back(std::move(op));
        }
        break;
      case OpCode::Dep2:
        for (size_t i = 0; i + 2 <= in.targets.size(); i += 2) {
          SimOp op;
          op.kind = SimOp::DepTwo;
          op.a = in.targets[i];
          op.b = in.targets[i + 1];
          op.p = in.p;
          op.log1m = std::log1p(-in.p);
          op.site = site++;
          cc.ops.push_back(std::move(op));
        }
        break;
      case OpCode::MeasureZ:
      case OpCode::MeasureX: {
        SimOp op;
        op.kind = SimOp::Meas;
        op.a = in.targets[0];
        op.x_basis = in.op == OpCode::MeasureX;
        op.p = in.p;
        op.log1m = in.p > 0 ? std::log1p(-in.p) : 0;
        op.site = in.p > 0 ? site++ : 0;
        op.dets = mdets[meas];
        op.obs = mobs[meas];
        meas++;
        cc.ops.push_back(std::move(op));
        break;
      }
      case OpCode::Mpp: {
        SimOp op;
        op.kind = SimOp::MppOp;
        for (size_t i = 0; i < in.targets.size(); i++) {
          op.mpp.push_back({in.targets[i], (uint8_t)in.letters[i]});
        }
        op.dets = mdets[meas];
        op.obs = mobs[meas];
        meas++;
        cc.ops.push_back(std::move(op));
        break;
      }
      case OpCode::ResetZ:
      case OpCode::ResetX:
        for (uint32_t q : in.targets) {
          SimOp op;
          op.kind = SimOp::Reset;
          op.a = q;
          op.x_basis = in.op == OpCode::ResetX;
          cc.ops.push_back(std::move(op));
        }
        break;
      default:
        break;
    }
  }
  return cc;
}

// visit error lanes for a site with probability p over 64 lanes
template <typename F>
void sample_lanes(double p, double log1m, uint64_t seed, uint64_t batch, uint32_t site,
                  F&& apply) {
  if (p <= 0) return;
  uint64_t draw = 0;
  double pos = 0;
  while (true) {
    double u = rng_double(seed, batch, site, draw++);
    pos += std::floor(std::log(std::max(u, 1e-300)) / log1m) + 1;
    if (pos > 64) break;
    int lane = (int)pos - 1;
    uint64_t r = rng_u64(seed, batch, site, draw++);
    apply(lane, r);
  }
}

void run_batch(const CompiledCircuit& cc, uint64_t seed, uint64_t batch,
               std::vector<uint64_t>& xf, std::vector<uint64_t>& zf,
               std::vector<uint64_t>& det_lanes, std::vector<uint64_t>& obs_lanes) {
  std::fill(xf.begin(), xf.end(), 0);
  std::fill(zf.begin(), zf.end(), 0);
  std::fill(det_lanes.begin(), det_lanes.end(), 0);
  std::fill(obs_lanes.begin(), obs_lanes.end(), 0);
  for (const SimOp& op : cc.ops) {
    switch (op.kind) {
      case SimOp::G1: {
        uint64_t x = xf[op.a], z = zf[op.a];
        switch (op.gate) {
          case GateKind::H: xf[op.a] = z; zf[op.a] = x; break;
          case GateKind::S: zf[op.a] = z ^ x; break;
          case GateKind::SQRT_X: xf[op.a] = x ^ z; break;
          default: throw std::logic_error("bad 1q gate in sim");
        }
        break;
      }
      case SimOp::G2: {
        switch (op.gate) {
          case GateKind::CNOT:
            xf[op.b] ^= xf[op.a];
            zf[op.a] ^= zf[op.b];
            break;
          case GateKind::CZ:
            zf[op.a] ^= xf[op.b];
            zf[op.b] ^= xf[op.a];
            break;
          case GateKind::XCX:
            xf[op.a] ^= zf[op.b];
            xf[op.b] ^= zf[op.a];
            break;
          case GateKind::SWAP:
            std::swap(xf[op.a], xf[op.b]);
            std::swap(zf[op.a], zf[op.b]);
            break;
          default: throw std::logic_error("bad 2q gate in sim");
        }
        break;
      }
      case SimOp::DepOne:
        sample_lanes(op.p, op.log1m, seed, batch, op.site, [&](int lane, uint64_t r) {
          int comp = 1 + (int)(r % 3);
          if (comp & 1) xf[op.a] ^= 1ull << lane;
          if (comp & 2) zf[op.a] ^= 1ull << lane;
        });
        break;
      case SimOp::DepTwo:
        sample_lanes(op.p, op.log1m, seed, batch, op.site, [&](int lane, uint64_t r) {
          int comp = 1 + (int)(r % 15);
          int pa = comp & 3, pb = comp >> 2;
          if (pa & 1) xf[op.a] ^= 1ull << lane;
          if (pa & 2) zf[op.a] ^= 1ull << lane;
          if (pb & 1) xf[op.b] ^= 1ull << lane;
          if (pb & 2) zf[op.b] ^= 1ull << lane;
        });
        break;
      case SimOp::Meas: {
        uint64_t flips = op.x_basis ? zf[op.a] : xf[op.a];
        if (op.p > 0) {
          sample_lanes(op.p, op.log1m, seed, batch, op.site,
                       [&](int lane, uint64_t) { flips ^= 1ull << lane; });
        }
        if (flips) {
          for (uint32_t d : op.dets) det_lanes[d] ^= flips;
          uint64_t obs = op.obs;
          while (obs) {
            int k = __builtin_ctzll(obs);
            obs &= obs - 1;
            obs_lanes[k] ^= flips;
          }
        }
        break;
      }
      case SimOp::MppOp: {
        uint64_t flips = 0;
        for (auto [q, letter] : op.mpp) {
          if (letter & 2) flips ^= xf[q];  // Z or Y letter: X frame flips
          if (letter & 1) flips ^= zf[q];  // X or Y letter: Z frame flips
        }
        if (flips) {
          for (uint32_t d : op.dets) det_lanes[d] ^= flips;
          uint64_t obs = op.obs;
          while (obs) {
            int k = __builtin_ctzll(obs);
            obs &= obs - 1;
            obs_lanes[k] ^= flips;
          }
        }
        break;
      }
      case SimOp::Reset:
        xf[op.a] = 0;
        zf[op.a] = 0;
        break;
    }
  }
}

void transpose_into(ShotBatch& out, uint64_t shot0, uint64_t count,
                    const std::vector<uint64_t>& det_lanes,
                    const std::vector<uint64_t>& obs_lanes) {
  size_t rww = out.row_words(), dw = out.det_words();
  for (uint32_t d = 0; d < out.n_detectors; d++) {
    uint64_t lanes = det_lanes[d];
    while (lanes) {
      int lane = __builtin_ctzll(lanes);
      lanes &= lanes - 1;
      if ((uint64_t)lane >= count) break;
      out.rows[(shot0 + lane) * rww + d / 64] ^= 1ull << (d % 64);
    }
  }
  for (uint32_t k = 0; k < out.n_observables; k++) {
    uint64_t lanes = obs_lanes[k];
    while (lanes) {
      int lane = __builtin_ctzll(lanes);
      lanes &= lanes - 1;
      if ((uint64_t)lane >= count) break;
      out.rows[(shot0 + lane) * rww + dw + k / 64] ^= 1ull << (k % 64);
    }
  }
}

}  // namespace

ShotBatch sample_circuit(const Circuit& c, uint64_t shots, uint64_t seed, int threads) {
  CompiledCircuit cc = compile(c);
  ShotBatch out;
  out.n_detectors = cc.n_detectors;
  out.n_observables = cc.n_observables;
  out.resize(shots);
  uint64_t batches = (shots + 63) / 64;
  auto work = [&](uint64_t b0, uint64_t b1) {
    std::vector<uint64_t> xf(cc.n_qubits), zf(cc.n_qubits);
    std::vector<uint64_t> det_lanes(cc.n_detectors), obs_lanes(cc.n_observables);
    for (uint64_t b = b0; b < b1; b++) {
      run_batch(cc, seed, b, xf, zf, det_lanes, obs_lanes);
      uint64_t shot0 = b * 64;
      transpose_into(out, shot0, std::min<uint64_t>(64, shots - shot0), det_lanes,
                     obs_lanes);
    }
  };
  if (threads <= 1 || batches <= 1) {
    work(0, batches);
  } else {
    std::vector<std::thread> pool;
    uint64_t per = (batches + threads - 1) / threads;
    for (int t = 0; t < threads; t++) {
      uint64_t b0 = t * per, b1 = std::min(batches, b0 + per);
      if (b0 >= b1) break;
      pool.emplace_back(work, b0, b1);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

ShotBatch sample_dem(const DetectorErrorModel& dem, uint64_t shots, uint64_t seed,
                     int threads) {
  ShotBatch out;
  out.n_detectors = dem.n_detectors;
  out.n_observables = dem.n_observables;
  out.resize(shots);
  uint64_t batches = (shots + 63) / 64;
  std::vector<double> log1m(dem.mechanisms.size());
  for (size_t i = 0; i < dem.mechanisms.size(); i++)
    log1m[i] = std::log1p(-dem.mechanisms[i].p);
  auto work = [&](uint64_t b0, uint64_t b1) {
    std::vector<uint64_t> det_lanes(dem.n_detectors), obs_lanes(dem.n_observables);
    for (uint64_t b = b0; b < b1; b++) {
      std::fill(det_lanes.begin(), det_lanes.end(), 0);
      std::fill(obs_lanes.begin(), obs_lanes.end(), 0);
      for (size_t i = 0; i < dem.mechanisms.size(); i++) {
        const DemMechanism& m = dem.mechanisms[i];
        sample_lanes(m.p, log1m[i], seed, b, (uint32_t)i, [&](int lane, uint64_t) {
          for (uint32_t d : m.detectors) det_lanes[d] ^= 1ull << lane;
          uint64_t obs = m.observables;
          while (obs) {
            int k = __builtin_ctzll(obs);
            obs &= obs - 1;
            obs_lanes[k] ^= 1ull << lane;
          }
        });
      }
      uint64_t shot0 = b * 64;
      transpose_into(out, shot0, std::min<uint64_t>(64, shots - shot0), det_lanes,
                     obs_lanes);
    }
  };
  if (threads <= 1 || batches <= 1) {
    work(0, batches);
  } else {
    std::vector<std::thread> pool;
    uint64_t per = (batches + threads - 1) / threads;
    for (int t = 0; t < threads; t++) {
      uint64_t b0 = t * per, b1 = std::min(batches, b0 + per);
      if (b0 >= b1) break;
      pool.emplace_back(work, b0, b1);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

void ShotBatch::write_binary(std::ostream& os) const {
  uint32_t magic = 0x46515331;  // "FQS1"
  uint32_t sh = (uint32_t)shots;
  os.write((const char*)&magic, 4);
  os.write((const char*)&sh, 4);
  os.write((const char*)&n_detectors, 4);
  os.write((const char*)&n_observables, 4);
  size_t det_bytes = (n_detectors + 7) / 8, obs_bytes = (n_observables + 7) / 8;
  for (uint64_t s = 0; s < shots; s++) {
    const uint64_t* row = rows.data() + s * row_words();
    os.write((const char*)row, det_bytes);
    const uint64_t* orow = row + det_words();
    os.write((const char*)orow, obs_bytes);
  }
}

ShotBatch ShotBatch::read_binary(std::istream& is) {
  uint32_t magic = 0, sh = 0;
  ShotBatch out;
  is.read((char*)&magic, 4);
  if (magic != 0x46515331) throw std::runtime_error("bad shot file magic");
  is.read((char*)&sh, 4);
  is.read((char*)&out.n_detectors, 4);
  is.read((char*)&out.n_observables, 4);
  out.resize(sh);
  size_t det_bytes = (out.n_detectors + 7) / 8, obs_bytes = (out.n_observables + 7) / 8;
  for (uint64_t s = 0; s < out.shots; s++) {
    uint64_t* row = out.rows.data() + s * out.row_words();
    is.read((char*)row, det_bytes);
    is.read((char*)(row + out.det_words()), obs_bytes);
  }
  if (!is) throw std::runtime_error("truncated shot file");
  return out;
}

void ShotBatch::write_text(std::ostream& os) const {
  for (uint64_t s = 0; s < shots; s++) {
    for (uint32_t d = 0; d < n_detectors; d++) os << (det(s, d) ? '1' : '0');
    os << ' ';
    for (uint32_t k = 0; k < n_observables; k++) os << (obs(s, k) ? '1' : '0');
    os << '\n';
  }
}

}  // namespace floq
