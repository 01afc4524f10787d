#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "negprob/errors.hpp"

namespace negprob {

// Dense row-major real matrix. Small problems only; no blocking, no views.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

// Numerical rank by Gaussian elimination with partial pivoting.
inline std::size_t numeric_rank(Mat a, double tol = 1e-10) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < a.cols() && rank < a.rows(); ++col) {
    std::size_t piv = rank;
    for (std::size_t r = rank + 1; r < a.rows(); ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= tol) continue;
    if (piv != rank)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(rank, j));
    for (std::size_t r = rank + 1; r < a.rows(); ++r) {
      double f = a(r, col) / a(rank, col);
      for (std::size_t j = col; j < a.cols(); ++j) a(r, j) -= f * a(rank, j);
    }
    ++rank;
  }
  return rank;
}

// Independent rows of [A|b] in echelon form. consistent == false when the
// elimination produces a row 0 = nonzero.
struct EchelonSystem {
  Mat rows;                 // rank x n
  std::vector<double> rhs;  // rank entries
  bool consistent = true;
};

inline EchelonSystem row_reduce(const Mat& a, const std::vector<double>& b,
                                double tol = 1e-10) {
  Mat w(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) w(i, j) = a(i, j);
    w(i, a.cols()) = b[i];
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < a.cols() && rank < w.rows(); ++col) {
    std::size_t piv = rank;
    for (std::size_t r = rank + 1; r < w.rows(); ++r)
      if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
    if (std::abs(w(piv, col)) <= tol) continue;
    if (piv != rank)
      for (std::size_t j = 0; j <= a.cols(); ++j) std::swap(w(piv, j), w(rank, j));
    for (std::size_t r = 0; r < w.rows(); ++r) {
      if (r == rank) continue;
      double f = w(r, col) / w(rank, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j <= a.cols(); ++j) w(r, j) -= f * w(rank, j);
    }
    ++rank;
  }
  EchelonSystem out;
  out.rows = Mat(rank, a.cols());
  out.rhs.resize(rank);
  std::size_t k = 0;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double mx = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) mx = std::max(mx, std::abs(w(i, j)));
    if (mx > tol) {
      for (std::size_t j = 0; j < a.cols(); ++j) out.rows(k, j) = w(i, j);
      out.rhs[k] = w(i, a.cols());
      ++k;
    } else if (std::abs(w(i, a.cols())) > 1e-8) {
      out.consistent = false;
    }
  }
  return out;
}

// Solves a square system in place; returns false when singular at tol.
inline bool solve_square(Mat a, std::vector<double> b, std::vector<double>& out,
                         double tol = 1e-10) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= tol) return false;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * out[j];
    out[i] = s / a(i, i);
  }
  return true;
}

// Cyclic Jacobi for a real symmetric matrix; eigenvectors in columns of v.
inline void jacobi_eigen_sym(Mat a, std::vector<double>& evals, Mat& v) {
  const std::size_t n = a.rows();
  v = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        double theta = 0.5 * std::atan2(2.0 * a(p, q), a(p, p) - a(q, q));
        double c = std::cos(theta), s = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + s * akq;
          a(k, q) = -s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + s * aqk;
          a(q, k) = -s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp + s * vkq;
          v(k, q) = -s * vkp + c * vkq;
        }
      }
    }
  }
  evals.resize(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = a(i, i);
}

// Eigenvalues of a row-major complex Hermitian matrix (cyclic Jacobi with
// phase-corrected rotations). Used for state validity and Schmidt spectra.
inline std::vector<double> hermitian_eigenvalues(
    std::vector<std::complex<double>> h, std::size_t n) {
  using c64 = std::complex<double>;
  auto at = [&](std::size_t i, std::size_t j) -> c64& { return h[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(at(p, q));
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double m = std::abs(at(p, q));
        if (m < 1e-300) continue;
        c64 u = at(p, q) / m;
        double alpha = at(p, p).real(), beta = at(q, q).real();
        double theta = 0.5 * std::atan2(2.0 * m, alpha - beta);
        double c = std::cos(theta), s = std::sin(theta);
        // Columns: col_p <- c*col_p + s*conj(u)*col_q ; col_q <- -s*u*col_p + c*col_q
        for (std::size_t k = 0; k < n; ++k) {
          c64 akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp + s * std::conj(u) * akq;
          at(k, q) = -s * u * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          c64 apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk + s * u * aqk;
          at(q, k) = -s * std::conj(u) * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> evals(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = at(i, i).real();
  return evals;
}

}  // namespace negprob
