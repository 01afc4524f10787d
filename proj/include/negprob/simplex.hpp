#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "negprob/errors.hpp"
#include "negprob/linalg.hpp"

namespace negprob {

// Dense two-phase primal simplex for min c'x s.t. Ax = b, x >= 0.
// Dantzig pricing with a permanent switch to Bland's rule once the iteration
// count suggests cycling. Sized for the tiny systems this project produces.

struct LpResult {
  enum class Status { optimal, infeasible, iteration_limit };
  Status status = Status::iteration_limit;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  bool degenerate_basis = false;
  bool alternative_optimum = false;
};

namespace detail {

class SimplexTableau {
 public:
  SimplexTableau(const Mat& a, std::vector<double> b, std::vector<double> c,
                 double pivot_tol, double feas_tol)
      : m_(a.rows()),
        n_(a.cols()),
        c_(std::move(c)),
        pivot_tol_(pivot_tol),
        feas_tol_(feas_tol),
        t_(a.rows() + 1, a.cols() + a.rows() + 1) {
    iteration_cap_ = 50 * static_cast<int>(m_ + n_);
    bland_after_ = 10 * static_cast<int>(m_ + n_);
    for (std::size_t i = 0; i < m_; ++i) {
      double s = b[i] < 0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) t_(i, j) = s * a(i, j);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs_col()) = s * b[i];
    }
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  LpResult solve() {
    LpResult res;
    // Phase 1: minimize the sum of artificials.
    for (std::size_t j = 0; j <= rhs_col(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += t_(i, j);
      t_(m_, j) = (j >= n_ && j < n_ + m_) ? 0.0 : -s;
    }
    if (!iterate(res, /*limit_cols=*/n_)) return res;
    if (t_(m_, rhs_col()) < -feas_tol_) {
      res.status = LpResult::Status::infeasible;
      return res;
    }
    purge_artificials();

    // Phase 2: the real objective, priced out against the current basis.
    for (std::size_t j = 0; j < n_; ++j) {
      double r = c_[j];
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] < n_) r -= c_[basis_[i]] * t_(i, j);
      t_(m_, j) = r;
    }
    for (std::size_t j = n_; j < n_ + m_; ++j) t_(m_, j) = 1.0;  // block artificials
    double obj = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) obj += c_[basis_[i]] * t_(i, rhs_col());
    t_(m_, rhs_col()) = -obj;
    if (!iterate(res, n_)) return res;

    res.status = LpResult::Status::optimal;
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = t_(i, rhs_col());
    res.objective = -t_(m_, rhs_col());
    for (std::size_t i = 0; i < m_; ++i)
      if (t_(i, rhs_col()) < feas_tol_) res.degenerate_basis = true;
    std::vector<char> in_basis(n_ + m_, 0);
    for (auto b : basis_) in_basis[b] = 1;
    for (std::size_t j = 0; j < n_; ++j)
      if (!in_basis[j] && std::abs(t_(m_, j)) < feas_tol_) res.alternative_optimum = true;
    return res;
  }

 private:
  std::size_t rhs_col() const { return n_ + m_; }

  void pivot(std::size_t r, std::size_t j) {
    double p = t_(r, j);
    for (std::size_t k = 0; k <= rhs_col(); ++k) t_(r, k) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double f = t_(i, j);
      if (f == 0.0) continue;
      for (std::size_t k = 0; k <= rhs_col(); ++k) t_(i, k) -= f * t_(r, k);
    }
    basis_[r] = j;
  }

  // Returns false on iteration cap; true when the current phase is optimal.
  bool iterate(LpResult& res, std::size_t limit_cols) {
    while (true) {
      bool bland = res.iterations > bland_after_;
      std::size_t enter = limit_cols;
      double best = -pivot_tol_;
      for (std::size_t j = 0; j < limit_cols; ++j) {
        if (t_(m_, j) < best) {
          enter = j;
          if (bland) break;
          best = t_(m_, j);
        }
      }
      if (enter == limit_cols) return true;
      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (t_(i, enter) <= pivot_tol_) continue;
        double ratio = t_(i, rhs_col()) / t_(i, enter);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave == m_ || basis_[i] < basis_[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == m_)
        throw solver_error("LP unbounded: no leaving row for entering column " +
                           std::to_string(enter));
      pivot(leave, enter);
      if (++res.iterations > iteration_cap_) {
        res.status = LpResult::Status::iteration_limit;
        return false;
      }
    }
  }

  // Pivot artificial variables out of the phase-1 basis; a row that admits no
  // structural pivot is redundant and gets cleared.
  void purge_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t j = 0;
      while (j < n_ && std::abs(t_(i, j)) <= pivot_tol_) ++j;
      if (j < n_) {
        pivot(i, j);
      } else {
        for (std::size_t k = 0; k <= rhs_col(); ++k) t_(i, k) = 0.0;
        t_(i, basis_[i]) = 1.0;  // keep the zeroed artificial basic and inert
      }
    }
  }

  std::size_t m_, n_;
  std::vector<double> c_;
  double pivot_tol_, feas_tol_;
  int iteration_cap_, bland_after_;
  Mat t_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline LpResult solve_lp_equality(const Mat& a, const std::vector<double>& b,
                                  const std::vector<double>& c,
                                  double pivot_tol = 1e-10, double feas_tol = 1e-9) {
  detail::SimplexTableau tab(a, b, c, pivot_tol, feas_tol);
  return tab.solve();
}

}  // namespace negprob
