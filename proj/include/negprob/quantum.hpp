#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <utility>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "negprob/constraints.hpp"
#include "negprob/errors.hpp"
#include "negprob/l1solver.hpp"
#include "negprob/linalg.hpp"
#include "negprob/measure.hpp"
#include "negprob/scenario.hpp"

namespace negprob {

using c64 = std::complex<double>;
using CMat = std::vector<c64>;  // row-major, square

namespace qdetail {

inline CMat matmul(const CMat& a, const CMat& b, std::size_t n) {
  CMat out(n * n, c64(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      c64 aik = a[i * n + k];
      if (aik == c64(0)) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
    }
  return out;
}

inline CMat kron2(const CMat& a, const CMat& b) {
  CMat out(16, c64(0));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l)
          out[(2 * i + k) * 4 + (2 * j + l)] = a[i * 2 + j] * b[k * 2 + l];
  return out;
}

inline c64 trace_product(const CMat& a, const CMat& b, std::size_t n) {
  c64 s(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + i];
  return s;
}

inline CMat identity2() { return {c64(1), c64(0), c64(0), c64(1)}; }

inline std::array<CMat, 3> paulis() {
  return {CMat{c64(0), c64(1), c64(1), c64(0)},
          CMat{c64(0), c64(0, -1), c64(0, 1), c64(0)},
          CMat{c64(1), c64(0), c64(0), c64(-1)}};
}

}  // namespace qdetail

// Two-qubit state, held as a density matrix; pure states also keep their
// amplitudes (needed by the entanglement entropy).
class QuantumState {
 public:
  static QuantumState pure(CMat amplitudes) {
    if (amplitudes.size() != 4) throw input_error("pure state needs 4 amplitudes");
    double norm2 = 0.0;
    for (const auto& a : amplitudes) norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > 1e-9) throw input_error("state vector is not normalized");
    QuantumState s;
    s.density_.assign(16, c64(0));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        s.density_[i * 4 + j] = amplitudes[i] * std::conj(amplitudes[j]);
    s.amplitudes_ = std::move(amplitudes);
    return s;
  }

  static QuantumState density(CMat rho) {
    if (rho.size() != 16) throw input_error("density matrix must be 4x4");
    c64 tr(0);
    for (std::size_t i = 0; i < 4; ++i) tr += rho[i * 4 + i];
    if (std::abs(tr - c64(1)) > 1e-10) throw input_error("density matrix trace != 1");
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (std::abs(rho[i * 4 + j] - std::conj(rho[j * 4 + i])) > 1e-10)
          throw input_error("density matrix is not Hermitian");
    for (double ev : hermitian_eigenvalues(rho, 4))
      if (ev < -1e-10) throw input_error("density matrix is not positive semidefinite");
    QuantumState s;
    s.density_ = std::move(rho);
    return s;
  }

  static QuantumState maximally_mixed() {
    CMat rho(16, c64(0));
    for (std::size_t i = 0; i < 4; ++i) rho[i * 4 + i] = c64(0.25);
    return density(std::move(rho));
  }

  std::size_t dim() const { return 4; }
  const CMat& density_matrix() const { return density_; }
  bool is_pure() const { return amplitudes_.has_value(); }
  const CMat& amplitudes() const {
    if (!amplitudes_) throw std::domain_error("state is not held in pure form");
    return *amplitudes_;
  }

 private:
  QuantumState() = default;
  CMat density_;
  std::optional<CMat> amplitudes_;
};

// Spin observable n.sigma on one party: Hermitian, eigenvalues +1/-1.
struct DichotomicObservable {
  int party = 1;  // 1 or 2
  std::array<double, 3> direction{0, 0, 1};
  CMat matrix;    // 2x2

  static DichotomicObservable along(int party, std::array<double, 3> n) {
    double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (std::abs(len - 1.0) > 1e-9) throw input_error("observable direction must be a unit vector");
    if (party != 1 && party != 2) throw input_error("party must be 1 or 2");
    DichotomicObservable o;
    o.party = party;
    o.direction = n;
    auto s = qdetail::paulis();
    o.matrix.assign(4, c64(0));
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < 4; ++i) o.matrix[i] += n[k] * s[k][i];
    return o;
  }
};

struct ChshSetting {
  DichotomicObservable a, a_prime;  // party 1
  DichotomicObservable b, b_prime;  // party 2
};

// tr(rho * tensor product of the observables); the observables must sit on
// distinct parties (they commute by construction).
inline double expectation(const QuantumState& state,
                          const std::vector<DichotomicObservable>& obs) {
  if (obs.empty() || obs.size() > 2) throw input_error("expected 1 or 2 observables");
  if (obs.size() == 2 && obs[0].party == obs[1].party)
    throw input_error("observables on the same party are not jointly measurable here");
  CMat op;
  if (obs.size() == 1) {
    op = obs[0].party == 1 ? qdetail::kron2(obs[0].matrix, qdetail::identity2())
                           : qdetail::kron2(qdetail::identity2(), obs[0].matrix);
  } else {
    const auto& first = obs[0].party == 1 ? obs[0] : obs[1];
    const auto& second = obs[0].party == 1 ? obs[1] : obs[0];
    op = qdetail::kron2(first.matrix, second.matrix);
  }
  c64 val = qdetail::trace_product(state.density_matrix(), op, 4);
  return val.real();
}

// Pauli correlation matrix T_ij = tr(rho sigma_i x sigma_j).
inline Mat correlation_matrix(const QuantumState& state) {
  auto s = qdetail::paulis();
  Mat t(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      t(i, j) = qdetail::trace_product(state.density_matrix(),
                                       qdetail::kron2(s[i], s[j]), 4)
                    .real();
  return t;
}

// Maximal CHSH value 2*sqrt(t1+t2) (t1, t2 the two largest eigenvalues of
// T'T) with an argmax setting reconstructed from the singular directions.
inline std::pair<double, ChshSetting> max_chsh(const QuantumState& state) {
  Mat t = correlation_matrix(state);
  Mat m(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += t(k, i) * t(k, j);
      m(i, j) = s;
    }
  std::vector<double> evals;
  Mat evecs;
  jacobi_eigen_sym(m, evals, evecs);
  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return evals[x] > evals[y]; });
  double t1 = std::max(0.0, evals[order[0]]);
  double t2 = std::max(0.0, evals[order[1]]);
  double value = 2.0 * std::sqrt(t1 + t2);

  auto col = [&](std::size_t j) {
    return std::array<double, 3>{evecs(0, j), evecs(1, j), evecs(2, j)};
  };
  auto apply_t = [&](const std::array<double, 3>& v) {
    std::array<double, 3> r{};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) r[i] += t(i, j) * v[j];
    return r;
  };
  auto normalize = [](std::array<double, 3> v, const std::array<double, 3>& fallback) {
    double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (len < 1e-12) return fallback;
    for (auto& x : v) x /= len;
    return v;
  };
  auto orthogonal_unit = [](const std::array<double, 3>& v) {
    std::array<double, 3> trial = std::abs(v[0]) < 0.9
                                      ? std::array<double, 3>{1, 0, 0}
                                      : std::array<double, 3>{0, 1, 0};
    double d = trial[0] * v[0] + trial[1] * v[1] + trial[2] * v[2];
    for (std::size_t i = 0; i < 3; ++i) trial[i] -= d * v[i];
    double len = std::sqrt(trial[0] * trial[0] + trial[1] * trial[1] + trial[2] * trial[2]);
    for (auto& x : trial) x /= len;
    return trial;
  };

  std::array<double, 3> c1 = col(order[0]);
  std::array<double, 3> c2 = col(order[1]);
  std::array<double, 3> a = normalize(apply_t(c1), {1, 0, 0});
  std::array<double, 3> ap = normalize(apply_t(c2), orthogonal_unit(a));

  double denom = std::sqrt(t1 + t2);
  double ct = denom < 1e-12 ? std::sqrt(0.5) : std::sqrt(t1) / denom;
  double st = denom < 1e-12 ? std::sqrt(0.5) : std::sqrt(t2) / denom;
  if (denom < 1e-12) {
    c1 = {1, 0, 0};
    c2 = {0, 1, 0};
    a = {1, 0, 0};
    ap = {0, 1, 0};
  }
  std::array<double, 3> b{}, bp{};
  for (std::size_t i = 0; i < 3; ++i) {
    b[i] = ct * c1[i] + st * c2[i];
    bp[i] = ct * c1[i] - st * c2[i];
  }
  ChshSetting setting{DichotomicObservable::along(1, a),
                      DichotomicObservable::along(1, ap),
                      DichotomicObservable::along(2, b),
                      DichotomicObservable::along(2, bp)};
  return {value, setting};
}

// CHSH functional at a fixed setting: <ab> + <ab'> + <a'b> - <a'b'>.
inline double chsh_value(const QuantumState& state, const ChshSetting& s) {
  return expectation(state, {s.a, s.b}) + expectation(state, {s.a, s.b_prime}) +
         expectation(state, {s.a_prime, s.b}) - expectation(state, {s.a_prime, s.b_prime});
}

// Four-context Bell-type empirical model from the projective joint
// distributions p(i,j) = tr(rho P_i x P_j); no-signal by construction.
inline EmpiricalModel empirical_model_from_state(const QuantumState& state,
                                                 const ChshSetting& setting) {
  EmpiricalModel m;
  m.variables = {dichotomic_variable("a"), dichotomic_variable("a'"),
                 dichotomic_variable("b"), dichotomic_variable("b'")};
  struct Named {
    std::string id;
    const DichotomicObservable* obs;
  };
  const Named party1[2] = {{"a", &setting.a}, {"a'", &setting.a_prime}};
  const Named party2[2] = {{"b", &setting.b}, {"b'", &setting.b_prime}};
  auto projector = [](const CMat& o, double sign) {
    CMat p = qdetail::identity2();
    for (std::size_t i = 0; i < 4; ++i) p[i] = 0.5 * (p[i] + sign * o[i]);
    return p;
  };
  const double signs[2] = {1.0, -1.0};
  for (const auto& x : party1) {
    for (const auto& y : party2) {
      ContextSpec ctx;
      ctx.id = x.id + ";" + y.id;
      ctx.members = {x.id, y.id};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          CMat op = qdetail::kron2(projector(x.obs->matrix, signs[i]),
                                   projector(y.obs->matrix, signs[j]));
          double p = qdetail::trace_product(state.density_matrix(), op, 4).real();
          ctx.table.push_back(std::max(0.0, p));  // clip roundoff negatives
        }
      }
      m.contexts.push_back(std::move(ctx));
    }
  }
  return m;
}

// sqrt(p)|00> + sqrt(1-p)|11>.
inline QuantumState cat_state(double p) {
  if (p < 0.0 || p > 0.5) throw input_error("cat state parameter must be in [0, 1/2]");
  return QuantumState::pure({c64(std::sqrt(p)), c64(0), c64(0), c64(std::sqrt(1.0 - p))});
}

// Shannon entropy (nats) of the squared Schmidt coefficients of a pure state.
inline double entanglement_entropy(const QuantumState& state) {
  if (!state.is_pure())
    throw std::domain_error("entanglement entropy is defined for pure states here");
  const auto& psi = state.amplitudes();
  CMat rho_a(4, c64(0));  // 2x2 reduced state of party 1
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        rho_a[i * 2 + j] += psi[i * 2 + k] * std::conj(psi[j * 2 + k]);
  double s = 0.0;
  for (double lam : hermitian_eigenvalues(rho_a, 2))
    if (lam > 1e-15) s -= lam * std::log(lam);
  return s;
}

struct CatSweepRow {
  double p = 0.0;
  double entanglement = 0.0;
  double chsh = 0.0;
  double contextuality = 0.0;
};

// Contextuality of a state at its CHSH-optimal setting: model -> system -> LP.
inline double contextuality_of_state(const QuantumState& state, const ChshSetting& setting) {
  auto model = empirical_model_from_state(state, setting);
  auto sys = build(model);
  auto sol = minimize_l1(sys);
  if (!sol.feasible) throw solver_error("quantum model unexpectedly infeasible");
  return sol.contextuality;
}

inline std::vector<CatSweepRow> cat_sweep(std::size_t n_points) {
  if (n_points < 2) throw input_error("cat_sweep needs at least 2 grid points");
  std::vector<CatSweepRow> rows(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    double p = 0.5 * static_cast<double>(i) / static_cast<double>(n_points - 1);
    auto state = cat_state(p);
    auto [chsh, setting] = max_chsh(state);
    rows[i] = {p, entanglement_entropy(state), chsh,
               contextuality_of_state(state, setting)};
  }
  return rows;
}

inline void write_cat_sweep_csv(const std::vector<CatSweepRow>& rows, std::ostream& os) {
  os << "p,entanglement_entropy,chsh,contextuality\n";
  os.precision(15);
  for (const auto& r : rows)
    os << r.p << "," << r.entanglement << "," << r.chsh << "," << r.contextuality << "\n";
}

}  // namespace negprob
