#pragma once

// Random scenario generators shared by the unit and acceptance suites.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "negprob/scenario.hpp"

namespace testgen {

inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// CHSH-scenario no-signal box as a random mixture of the 16 local
// deterministic boxes and the 8 PR-box extremals. Every such mixture is
// no-signal; PR weight > 0 usually makes it contextual.
inline negprob::EmpiricalModel random_no_signal_chsh(std::mt19937_64& rng,
                                                     double pr_weight_scale = 1.0) {
  // blocks[x][y][i][j], x in {a,b}, y in {a',b'}, outcomes + (0), - (1)
  double blocks[2][2][2][2] = {};
  std::vector<double> weights(24);
  double total = 0.0;
  for (std::size_t k = 0; k < 24; ++k) {
    weights[k] = unit_real(rng) * (k >= 16 ? pr_weight_scale : 1.0);
    total += weights[k];
  }
  for (auto& w : weights) w /= total;

  std::size_t k = 0;
  // Local deterministic: outcome bits (alpha for a, alpha' for b; beta, beta').
  for (int oa = 0; oa < 2; ++oa)
    for (int ob = 0; ob < 2; ++ob)
      for (int oap = 0; oap < 2; ++oap)
        for (int obp = 0; obp < 2; ++obp) {
          int pa[2] = {oa, ob}, pb[2] = {oap, obp};
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) blocks[x][y][pa[x]][pb[y]] += weights[k];
          ++k;
        }
  // PR extremals: i XOR j = x*y XOR alpha*x XOR beta*y XOR gamma.
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta)
      for (int gamma = 0; gamma < 2; ++gamma) {
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y)
            for (int i = 0; i < 2; ++i) {
              int j = (x * y) ^ (alpha * x) ^ (beta * y) ^ gamma ^ i;
              blocks[x][y][i][j] += 0.5 * weights[k];
            }
        ++k;
      }

  negprob::EmpiricalModel m;
  const char* party1[2] = {"a", "b"};
  const char* party2[2] = {"a'", "b'"};
  for (auto id : party1) m.variables.push_back(negprob::dichotomic_variable(id));
  for (auto id : party2) m.variables.push_back(negprob::dichotomic_variable(id));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      negprob::ContextSpec c;
      c.id = std::string(party1[x]) + ";" + party2[y];
      c.members = {party1[x], party2[y]};
      c.table = {blocks[x][y][0][0], blocks[x][y][0][1], blocks[x][y][1][0],
                 blocks[x][y][1][1]};
      m.contexts.push_back(std::move(c));
    }
  return m;
}

// Moments of a random global joint distribution on three dichotomic
// variables; the resulting cyclic model always admits a probability.
inline negprob::EmpiricalModel random_three_dichotomic(std::mt19937_64& rng) {
  std::array<double, 8> joint;
  double total = 0.0;
  for (auto& p : joint) {
    p = unit_real(rng);
    total += p;
  }
  for (auto& p : joint) p /= total;
  auto sign = [](std::size_t atom, int var) {
    return ((atom >> (2 - var)) & 1u) ? -1.0 : 1.0;
  };
  negprob::ThreeDichotomicMoments m;
  for (std::size_t atom = 0; atom < 8; ++atom) {
    m.x += sign(atom, 0) * joint[atom];
    m.y += sign(atom, 1) * joint[atom];
    m.z += sign(atom, 2) * joint[atom];
    m.xy += sign(atom, 0) * sign(atom, 1) * joint[atom];
    m.xz += sign(atom, 0) * sign(atom, 2) * joint[atom];
    m.yz += sign(atom, 1) * sign(atom, 2) * joint[atom];
  }
  return negprob::three_dichotomic(m);
}

// Bell table with one context's table shifted so a one-variable marginal
// moves by delta while the table stays a distribution: signaling.
inline negprob::EmpiricalModel signaling_bell_perturbation(std::mt19937_64& rng) {
  auto m = negprob::builtin_bell();
  std::size_t c = rng() % m.contexts.size();
  auto& t = m.contexts[c].table;
  // Move mass from the largest cell (>= 3/8 in every Bell block) into the
  // other row: the first member's marginal shifts by delta, the table stays
  // a distribution, and the paired context still reports the old marginal.
  std::size_t k = 0;
  for (std::size_t i = 1; i < 4; ++i)
    if (t[i] > t[k]) k = i;
  double delta = t[k] * (0.1 + 0.3 * unit_real(rng));
  std::size_t dst = ((1 - (k >> 1)) << 1) | (rng() % 2);
  t[k] -= delta;
  t[dst] += delta;
  return m;
}

// Convex mixture of the Bell table with a random no-signal box: no-signal.
inline negprob::EmpiricalModel no_signal_bell_perturbation(std::mt19937_64& rng) {
  auto bell = negprob::builtin_bell();
  auto other = random_no_signal_chsh(rng);
  double lam = 0.5 + 0.5 * unit_real(rng);
  for (std::size_t c = 0; c < bell.contexts.size(); ++c)
    for (std::size_t i = 0; i < 4; ++i)
      bell.contexts[c].table[i] =
          lam * bell.contexts[c].table[i] + (1 - lam) * other.contexts[c].table[i];
  return bell;
}

}  // namespace testgen
