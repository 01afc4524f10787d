#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "negprob/constraints.hpp"
#include "negprob/errors.hpp"
#include "negprob/linalg.hpp"
#include "negprob/measure.hpp"
#include "negprob/simplex.hpp"

namespace negprob {

struct L1Solution {
  SignedMeasure measure;     // a minimizer (meaningful only when feasible)
  double norm = 0.0;         // minimal total variation over {mu : A mu = b}
  double contextuality = 0.0;
  bool feasible = false;
  bool unique_hint = false;  // non-degenerate optimum, no alternative detected
  int iterations = 0;
};

// Minimizes ||mu||_1 over the affine set A*mu = b via the standard split
// mu = u - v, u,v >= 0, min sum(u + v). An infeasible LP means the model
// signals; that is reported, not thrown.
//
// Contextuality is reported as ||mu|| - 1 (nonnegative, matching the
// reference values); see docs/contextuality-sign.md for the convention.
inline L1Solution minimize_l1(const ConstraintSystem& sys, double tol = 1e-9) {
  const std::size_t n = sys.unknowns();
  Mat a(sys.rows(), 2 * n);
  for (std::size_t i = 0; i < sys.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = sys.matrix(i, j);
      a(i, n + j) = -sys.matrix(i, j);
    }
  }
  std::vector<double> c(2 * n, 1.0);

  LpResult lp = solve_lp_equality(a, sys.rhs, c, 1e-10, tol);
  if (lp.status == LpResult::Status::iteration_limit)
    throw solver_error("simplex hit the iteration cap after " +
                       std::to_string(lp.iterations) + " iterations");

  L1Solution sol{SignedMeasure(sys.space, std::vector<double>(n, 0.0))};
  sol.iterations = lp.iterations;
  if (lp.status == LpResult::Status::infeasible) return sol;

  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = lp.x[j] - lp.x[n + j];

  // Cross-check the constraints before reporting feasibility.
  double max_residual = 0.0;
  for (std::size_t i = 0; i < sys.rows(); ++i) {
    double s = -sys.rhs[i];
    for (std::size_t j = 0; j < n; ++j) s += sys.matrix(i, j) * w[j];
    max_residual = std::max(max_residual, std::abs(s));
  }
  sol.measure = SignedMeasure(sys.space, std::move(w));
  sol.norm = lp.objective;
  sol.contextuality = std::max(0.0, sol.norm - 1.0);
  sol.feasible = max_residual <= 1e-8;
  sol.unique_hint = !lp.degenerate_basis && !lp.alternative_optimum;
  return sol;
}

// Brute-force oracle: enumerates the basic solutions of A*mu = b (all column
// subsets of size rank of the reduced row system) and returns those that
// satisfy the full system. The minimum 1-norm over the returned vertices
// equals the LP optimum; kept independent of the simplex path on purpose.
inline std::vector<SignedMeasure> enumerate_vertices(const ConstraintSystem& sys,
                                                     double tol = 1e-8) {
  const std::size_t n = sys.unknowns();
  if (n > 20) throw input_error("enumerate_vertices guard: more than 20 unknowns");

  EchelonSystem ech = row_reduce(sys.matrix, sys.rhs);
  std::vector<SignedMeasure> out;
  if (!ech.consistent) return out;
  const std::size_t r = ech.rows.rows();

  std::vector<std::size_t> comb(r);
  for (std::size_t i = 0; i < r; ++i) comb[i] = i;
  auto advance = [&]() {
    std::size_t i = r;
    while (i-- > 0) {
      if (comb[i] + (r - i) <= n) {
        ++comb[i];
        for (std::size_t k = i + 1; k < r; ++k) comb[k] = comb[k - 1] + 1;
        return true;
      }
    }
    return false;
  };

  Mat sub(r, r);
  std::vector<double> xs;
  do {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t k = 0; k < r; ++k) sub(i, k) = ech.rows(i, comb[k]);
    if (!solve_square(sub, ech.rhs, xs)) continue;
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < r; ++k) w[comb[k]] = xs[k];
    bool ok = true;
    for (std::size_t i = 0; i < sys.rows() && ok; ++i) {
      double s = -sys.rhs[i];
      for (std::size_t j = 0; j < n; ++j) s += sys.matrix(i, j) * w[j];
      if (std::abs(s) > tol) ok = false;
    }
    if (ok) out.emplace_back(sys.space, std::move(w));
  } while (advance());
  return out;
}

inline double min_vertex_norm(const std::vector<SignedMeasure>& vertices) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) best = std::min(best, total_variation(v));
  return best;
}

}  // namespace negprob
