#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "negprob/errors.hpp"
#include "negprob/quantum.hpp"

namespace negprob {

enum class GateSetKind { clifford, clifford_t, extended, haar };

inline std::string to_string(GateSetKind k) {
  switch (k) {
    case GateSetKind::clifford: return "clifford";
    case GateSetKind::clifford_t: return "clifford_t";
    case GateSetKind::extended: return "extended";
    case GateSetKind::haar: return "haar";
  }
  return "?";
}

inline GateSetKind gate_set_from_string(const std::string& s) {
  if (s == "clifford") return GateSetKind::clifford;
  if (s == "clifford_t") return GateSetKind::clifford_t;
  if (s == "extended") return GateSetKind::extended;
  if (s == "haar") return GateSetKind::haar;
  throw input_error("unknown gate set '" + s + "'");
}

struct GateSpec {
  std::string name;
  int arity = 1;
  int n_params = 0;
  // Builds the 2x2 (arity 1) or 4x4 (arity 2, basis ordered (first,second)
  // target) unitary for the given parameters.
  std::function<CMat(const std::vector<double>&)> build;
};

namespace cdetail {

inline CMat fixed1(std::initializer_list<c64> m) { return CMat(m); }

inline std::vector<GateSpec> clifford_gates() {
  using std::numbers::sqrt2;
  const double is2 = 1.0 / sqrt2;
  const c64 i(0, 1);
  std::vector<GateSpec> g;
  auto fixed = [](std::string name, int arity, CMat m) {
    return GateSpec{std::move(name), arity, 0, [m](const std::vector<double>&) { return m; }};
  };
  g.push_back(fixed("H", 1, {is2, is2, is2, -is2}));
  g.push_back(fixed("S", 1, {1, 0, 0, i}));
  g.push_back(fixed("Sdg", 1, {1, 0, 0, -i}));
  g.push_back(fixed("X", 1, {0, 1, 1, 0}));
  g.push_back(fixed("Y", 1, {0, -i, i, 0}));
  g.push_back(fixed("Z", 1, {1, 0, 0, -1}));
  g.push_back(fixed("CX", 2, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0}));
  g.push_back(fixed("CZ", 2, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1}));
  g.push_back(fixed("SWAP", 2, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1}));
  return g;
}

inline std::vector<GateSpec> t_gates() {
  const c64 w = std::polar(1.0, std::numbers::pi / 4.0);
  std::vector<GateSpec> g;
  g.push_back({"T", 1, 0, [w](const std::vector<double>&) { return CMat{1, 0, 0, w}; }});
  g.push_back({"Tdg", 1, 0,
               [w](const std::vector<double>&) { return CMat{1, 0, 0, std::conj(w)}; }});
  return g;
}

inline std::vector<GateSpec> parameterized_gates() {
  const c64 i(0, 1);
  std::vector<GateSpec> g;
  g.push_back({"RX", 1, 1, [i](const std::vector<double>& p) {
                 double h = p[0] / 2;
                 return CMat{std::cos(h), -i * std::sin(h), -i * std::sin(h), std::cos(h)};
               }});
  g.push_back({"RY", 1, 1, [](const std::vector<double>& p) {
                 double h = p[0] / 2;
                 return CMat{std::cos(h), -std::sin(h), std::sin(h), std::cos(h)};
               }});
  g.push_back({"RZ", 1, 1, [](const std::vector<double>& p) {
                 return CMat{std::polar(1.0, -p[0] / 2), 0, 0, std::polar(1.0, p[0] / 2)};
               }});
  g.push_back({"U", 1, 3, [](const std::vector<double>& p) {
                 double th = p[0], phi = p[1], lam = p[2];
                 return CMat{std::cos(th / 2),
                             -std::polar(1.0, lam) * std::sin(th / 2),
                             std::polar(1.0, phi) * std::sin(th / 2),
                             std::polar(1.0, phi + lam) * std::cos(th / 2)};
               }});
  g.push_back({"CP", 2, 1, [](const std::vector<double>& p) {
                 CMat m(16, c64(0));
                 m[0] = m[5] = m[10] = 1;
                 m[15] = std::polar(1.0, p[0]);
                 return m;
               }});
  return g;
}

// Deterministic helpers independent of std::uniform_* (whose output is
// implementation-defined).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;  // modulo bias is negligible for the tiny n used here
}

inline double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double next_normal(std::mt19937_64& rng) {
  double u1 = next_unit(rng), u2 = next_unit(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cdetail

struct GateSet {
  GateSetKind kind = GateSetKind::clifford;
  std::vector<GateSpec> gates;

  static GateSet for_kind(GateSetKind kind) {
    GateSet s;
    s.kind = kind;
    switch (kind) {
      case GateSetKind::haar:
        break;  // circuits degenerate to a single Haar unitary
      case GateSetKind::extended: {
        s.gates = cdetail::clifford_gates();
        auto t = cdetail::t_gates();
        s.gates.insert(s.gates.end(), t.begin(), t.end());
        auto p = cdetail::parameterized_gates();
        s.gates.insert(s.gates.end(), p.begin(), p.end());
        break;
      }
      case GateSetKind::clifford_t: {
        s.gates = cdetail::clifford_gates();
        auto t = cdetail::t_gates();
        s.gates.insert(s.gates.end(), t.begin(), t.end());
        break;
      }
      case GateSetKind::clifford:
        s.gates = cdetail::clifford_gates();
        break;
    }
    return s;
  }
};

struct CircuitOp {
  std::size_t gate = 0;
  std::array<int, 2> targets{0, -1};  // targets[1] < 0 for 1-qubit gates
  std::vector<double> params;
};

struct Circuit {
  std::size_t depth = 0;
  std::vector<CircuitOp> ops;
  std::uint64_t seed = 0;
};

// Uniform sampling: gate from the set, targets among valid assignments,
// parameters in [0, 2*pi). Fully determined by the seed.
inline Circuit random_circuit(const GateSet& set, std::size_t depth, std::uint64_t seed) {
  if (set.gates.empty()) throw input_error("gate set has no generators");
  Circuit c;
  c.depth = depth;
  c.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t d = 0; d < depth; ++d) {
    CircuitOp op;
    op.gate = cdetail::next_below(rng, set.gates.size());
    const GateSpec& g = set.gates[op.gate];
    if (g.arity == 1) {
      op.targets = {static_cast<int>(cdetail::next_below(rng, 2)), -1};
    } else {
      bool swap = cdetail::next_below(rng, 2) == 1;
      op.targets = swap ? std::array<int, 2>{1, 0} : std::array<int, 2>{0, 1};
    }
    for (int k = 0; k < g.n_params; ++k)
      op.params.push_back(2.0 * std::numbers::pi * cdetail::next_unit(rng));
    c.ops.push_back(std::move(op));
  }
  return c;
}

namespace cdetail {

// Basis convention: index = 2*q0 + q1.
inline void apply_1q(CMat& psi, const CMat& u, int qubit) {
  const std::size_t stride = qubit == 0 ? 2 : 1;
  for (std::size_t base : {std::size_t(0), std::size_t(qubit == 0 ? 1 : 2)}) {
    c64 lo = psi[base], hi = psi[base + stride];
    psi[base] = u[0] * lo + u[1] * hi;
    psi[base + stride] = u[2] * lo + u[3] * hi;
  }
}

inline void apply_2q(CMat& psi, const CMat& u, int first, int second) {
  auto bit = [](std::size_t s, int q) { return (s >> (1 - q)) & 1u; };
  CMat out(4, c64(0));
  for (std::size_t s = 0; s < 4; ++s) {
    std::size_t g = 2 * bit(s, first) + bit(s, second);
    for (std::size_t sp = 0; sp < 4; ++sp) {
      std::size_t gp = 2 * bit(sp, first) + bit(sp, second);
      out[s] += u[g * 4 + gp] * psi[sp];
    }
  }
  psi = std::move(out);
}

}  // namespace cdetail

// State-vector simulation from |00>.
inline QuantumState run(const Circuit& circuit, const GateSet& set) {
  CMat psi{c64(1), c64(0), c64(0), c64(0)};
  for (const auto& op : circuit.ops) {
    const GateSpec& g = set.gates.at(op.gate);
    CMat u = g.build(op.params);
    if (g.arity == 1)
      cdetail::apply_1q(psi, u, op.targets[0]);
    else
      cdetail::apply_2q(psi, u, op.targets[0], op.targets[1]);
  }
  double norm = 0.0;
  for (const auto& a : psi) norm += std::norm(a);
  norm = std::sqrt(norm);
  for (auto& a : psi) a /= norm;  // renormalize drift of order 1e-15
  return QuantumState::pure(std::move(psi));
}

// Haar-random unitary via QR of a complex Ginibre matrix with the positive
// diagonal normalization (Mezzadri construction), done with modified
// Gram-Schmidt (whose R diagonal is already real positive).
inline CMat haar_unitary(std::size_t dim, std::uint64_t seed) {
  if (dim != 2 && dim != 4) throw input_error("haar_unitary supports dim 2 or 4");
  std::mt19937_64 rng(seed);
  std::vector<CMat> cols(dim, CMat(dim));
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < dim; ++i)
      cols[j][i] = c64(cdetail::next_normal(rng), cdetail::next_normal(rng));
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      c64 d(0);
      for (std::size_t i = 0; i < dim; ++i) d += std::conj(cols[k][i]) * cols[j][i];
      for (std::size_t i = 0; i < dim; ++i) cols[j][i] -= d * cols[k][i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) norm += std::norm(cols[j][i]);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < dim; ++i) cols[j][i] /= norm;
  }
  CMat u(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) u[i * dim + j] = cols[j][i];
  return u;
}

struct CircuitSample {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double contextuality = 0.0;
  double chsh = 0.0;
  double entanglement = 0.0;
};

struct DistributionStats {
  GateSetKind gates = GateSetKind::clifford;
  std::size_t n_circuits = 0;
  std::size_t depth = 0;
  std::uint64_t seed = 0;
  double zero_threshold = 1e-6;
  std::vector<CircuitSample> samples;        // ordered by circuit index
  std::vector<double> bin_edges;             // 51 edges over (threshold, sqrt2-1]
  std::vector<double> bin_probs;             // renormalized over nonzero samples
  double shannon_entropy_bits = 0.0;
  double zero_fraction = 0.0;
  double max_contextuality = 0.0;
  std::size_t distinct_clusters = 0;
};

inline constexpr std::size_t kHistogramBins = 50;
inline constexpr double kZeroThreshold = 1e-6;
inline const double kMaxQuantumContextuality = std::numbers::sqrt2 - 1.0;

namespace cdetail {

inline void fill_statistics(DistributionStats& st) {
  const double lo = st.zero_threshold;
  const double hi = kMaxQuantumContextuality;
  st.bin_edges.resize(kHistogramBins + 1);
  for (std::size_t i = 0; i <= kHistogramBins; ++i)
    st.bin_edges[i] = lo + (hi - lo) * static_cast<double>(i) / kHistogramBins;
  std::vector<double> counts(kHistogramBins, 0.0);
  std::size_t zeros = 0, nonzeros = 0;
  std::vector<double> values;
  values.reserve(st.samples.size());
  for (const auto& s : st.samples) {
    values.push_back(s.contextuality);
    st.max_contextuality = std::max(st.max_contextuality, s.contextuality);
    if (s.contextuality <= st.zero_threshold) {
      ++zeros;
      continue;
    }
    ++nonzeros;
    double frac = (s.contextuality - lo) / (hi - lo);
    auto bin = static_cast<std::size_t>(frac * kHistogramBins);
    counts[std::min(bin, kHistogramBins - 1)] += 1.0;
  }
  st.zero_fraction =
      st.samples.empty() ? 0.0 : static_cast<double>(zeros) / st.samples.size();
  st.bin_probs.assign(kHistogramBins, 0.0);
  if (nonzeros > 0) {
    for (std::size_t i = 0; i < kHistogramBins; ++i)
      st.bin_probs[i] = counts[i] / static_cast<double>(nonzeros);
    double h = 0.0;
    for (double p : st.bin_probs)
      if (p > 0.0) h -= p * std::log2(p);
    st.shannon_entropy_bits = h;
  }
  std::sort(values.begin(), values.end());
  st.distinct_clusters = values.empty() ? 0 : 1;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] - values[i - 1] > 1e-6) ++st.distinct_clusters;
}

}  // namespace cdetail

// Runs n circuits (or n Haar unitaries applied to |00>), scores each output
// state by the L1 contextuality at its CHSH-optimal setting, and aggregates
// the distribution. Deterministic for a fixed seed regardless of worker
// count: per-circuit seeds are derived by index, results are keyed by index.
inline DistributionStats experiment(GateSetKind kind, std::size_t n_circuits,
                                    std::size_t depth, std::uint64_t seed,
                                    std::size_t workers = 1) {
  if (n_circuits < 1) throw input_error("experiment needs at least one circuit");
  if (workers < 1) workers = 1;
  GateSet set = GateSet::for_kind(kind);

  DistributionStats st;
  st.gates = kind;
  st.n_circuits = n_circuits;
  st.depth = depth;
  st.seed = seed;
  st.zero_threshold = kZeroThreshold;
  st.samples.resize(n_circuits);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      std::size_t i = next.fetch_add(1);
      if (i >= n_circuits) return;
      std::uint64_t circuit_seed =
          cdetail::splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (i + 1)));
      try {
        QuantumState state = [&] {
          if (kind == GateSetKind::haar) {
            CMat u = haar_unitary(4, circuit_seed);
            CMat psi(4);
            for (std::size_t r = 0; r < 4; ++r) psi[r] = u[r * 4];  // U|00>
            return QuantumState::pure(std::move(psi));
          }
          return run(random_circuit(set, depth, circuit_seed), set);
        }();
        auto [chsh, setting] = max_chsh(state);
        CircuitSample s;
        s.index = i;
        s.seed = circuit_seed;
        s.chsh = chsh;
        s.entanglement = entanglement_entropy(state);
        s.contextuality = contextuality_of_state(state, setting);
        st.samples[i] = s;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure = "circuit " + std::to_string(i) + " (seed " +
                  std::to_string(circuit_seed) + "): " + e.what();
        failed = true;
      }
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed) throw solver_error(failure);

  cdetail::fill_statistics(st);
  return st;
}

inline void write_samples_csv(const DistributionStats& st, std::ostream& os) {
  os << "circuit_index,seed,contextuality,chsh,entanglement_entropy\n";
  os.precision(15);
  for (const auto& s : st.samples)
    os << s.index << "," << s.seed << "," << s.contextuality << "," << s.chsh << ","
       << s.entanglement << "\n";
}

inline void write_histogram_csv(const DistributionStats& st, std::ostream& os) {
  os << "bin_lo,bin_hi,prob\n";
  os.precision(15);
  for (std::size_t i = 0; i < st.bin_probs.size(); ++i)
    os << st.bin_edges[i] << "," << st.bin_edges[i + 1] << "," << st.bin_probs[i] << "\n";
}

inline nlohmann::ordered_json summary_json(const DistributionStats& st) {
  nlohmann::ordered_json j;
  j["gates"] = to_string(st.gates);
  j["n_circuits"] = st.n_circuits;
  j["depth"] = st.depth;
  j["seed"] = st.seed;
  j["zero_threshold"] = st.zero_threshold;
  j["shannon_entropy_bits"] = st.shannon_entropy_bits;
  j["zero_fraction"] = st.zero_fraction;
  j["max_contextuality"] = st.max_contextuality;
  j["distinct_clusters"] = st.distinct_clusters;
  return j;
}

}  // namespace negprob
