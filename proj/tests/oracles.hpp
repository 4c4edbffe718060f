#pragma once

// Reference implementations used only by the tests. Everything here is plain
// loops over Eigen storage; none of it calls into the library, so agreement
// with the library is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd matmul(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd c = MatrixXd::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline MatrixXd transpose(const MatrixXd& a) {
  MatrixXd t(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline VectorXd col(const MatrixXd& a, Index j) {
  VectorXd v(a.rows());
  for (Index i = 0; i < a.rows(); ++i) v(i) = a(i, j);
  return v;
}

inline double dot(const VectorXd& a, const VectorXd& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a(i) * b(i);
  return s;
}

inline double norm(const VectorXd& a) { return std::sqrt(dot(a, a)); }

inline MatrixXd center(const MatrixXd& a) {
  MatrixXd c = a;
  for (Index j = 0; j < a.cols(); ++j) {
    double m = 0.0;
    for (Index i = 0; i < a.rows(); ++i) m += a(i, j);
    m /= static_cast<double>(a.rows());
    for (Index i = 0; i < a.rows(); ++i) c(i, j) -= m;
  }
  return c;
}

/// Two-pass sample standard deviation per column.
inline VectorXd column_sd(const MatrixXd& a) {
  VectorXd sd(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    double m = 0.0;
    for (Index i = 0; i < a.rows(); ++i) m += a(i, j);
    m /= static_cast<double>(a.rows());
    double ss = 0.0;
    for (Index i = 0; i < a.rows(); ++i) ss += (a(i, j) - m) * (a(i, j) - m);
    sd(j) = std::sqrt(ss / static_cast<double>(a.rows() - 1));
  }
  return sd;
}

struct EigenDecomposition {
  VectorXd values;   // descending
  MatrixXd vectors;  // columns
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline EigenDecomposition jacobi_eigen(MatrixXd a) {
  const Index n = a.rows();
  MatrixXd v = MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= 1e-34 * total || off == 0.0) break;
    for (Index p = 0; p < n - 1; ++p)
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });
  EigenDecomposition out{VectorXd(n), MatrixXd(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    for (Index i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// Gaussian elimination with partial pivoting: solves a·x = b.
inline MatrixXd solve(MatrixXd a, MatrixXd b) {
  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    for (Index i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    a.row(k).swap(a.row(piv));
    b.row(k).swap(b.row(piv));
    for (Index i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (Index j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  MatrixXd x(n, b.cols());
  for (Index j = 0; j < b.cols(); ++j)
    for (Index i = n - 1; i >= 0; --i) {
      double s = b(i, j);
      for (Index k = i + 1; k < n; ++k) s -= a(i, k) * x(k, j);
      x(i, j) = s / a(i, i);
    }
  return x;
}

struct TopPair {
  VectorXd left, right;
  double value = 0.0;
};

/// Top singular triple via the full eigendecomposition of cᵀc.
inline TopPair top_singular(const MatrixXd& c) {
  const EigenDecomposition e = jacobi_eigen(matmul(transpose(c), c));
  TopPair out;
  out.right = col(e.vectors, 0);
  const VectorXd cv = col(matmul(c, out.right), 0);
  out.value = norm(cv);
  out.left = cv / out.value;
  return out;
}

/// All singular values of c, descending.
inline VectorXd singular_values(const MatrixXd& c) {
  VectorXd ev = jacobi_eigen(matmul(transpose(c), c)).values;
  for (Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
  return ev;
}

struct XyPls {
  MatrixXd W, V, P, Q, T, U, B;
};

namespace detail {

// One block's reduction: weights from the top eigenvector of
// (Eᵀ·O)(Eᵀ·O)ᵀ with O the fixed opposite block, then score, regression
// loading and deflation.
inline void reduce(MatrixXd e, const MatrixXd& opposite, int k, MatrixXd& w, MatrixXd& p,
                   MatrixXd& t) {
  w.resize(e.cols(), k);
  p.resize(e.cols(), k);
  t.resize(e.rows(), k);
  for (int i = 0; i < k; ++i) {
    const MatrixXd s = matmul(transpose(e), opposite);
    const VectorXd wi = col(jacobi_eigen(matmul(s, transpose(s))).vectors, 0);
    const VectorXd ti = col(matmul(e, wi), 0);
    const VectorXd pi = col(matmul(transpose(e), ti), 0) / dot(ti, ti);
    for (Index r = 0; r < e.rows(); ++r)
      for (Index c = 0; c < e.cols(); ++c) e(r, c) -= ti(r) * pi(c);
    w.col(i) = wi;
    p.col(i) = pi;
    t.col(i) = ti;
  }
}

}  // namespace detail

/// Dense XY-PLS on raw (uncentered) blocks; centering is done here.
inline XyPls dense_xypls(const MatrixXd& x_raw, const MatrixXd& y_raw, int g, int h) {
  const MatrixXd x = center(x_raw);
  const MatrixXd y = center(y_raw);
  XyPls m;
  detail::reduce(y, x, g, m.V, m.Q, m.U);
  detail::reduce(x, y, h, m.W, m.P, m.T);
  const MatrixXd xw = matmul(x, m.W);
  const MatrixXd gram = matmul(transpose(xw), xw);
  const MatrixXd rhs = matmul(matmul(transpose(xw), y), m.V);
  m.B = matmul(matmul(m.W, solve(gram, rhs)), transpose(m.V));
  return m;
}

/// Flips columns of `ref` (and the same columns of the companions) so that
/// each has a nonnegative inner product with the matching column of `target`.
inline void align_columns(const MatrixXd& target, MatrixXd& ref, std::vector<MatrixXd*> companions) {
  for (Index j = 0; j < ref.cols(); ++j) {
    if (dot(col(ref, j), col(target, j)) < 0.0) {
      ref.col(j) *= -1.0;
      for (MatrixXd* m : companions) m->col(j) *= -1.0;
    }
  }
}

inline double max_abs_diff(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  double d = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

/// Largest |aᵢᵀaⱼ| / (‖aᵢ‖‖aⱼ‖) over i ≠ j.
inline double max_relative_cross(const MatrixXd& a) {
  double worst = 0.0;
  for (Index i = 0; i < a.cols(); ++i)
    for (Index j = i + 1; j < a.cols(); ++j) {
      const VectorXd ai = col(a, i), aj = col(a, j);
      worst = std::max(worst, std::abs(dot(ai, aj)) / (norm(ai) * norm(aj)));
    }
  return worst;
}

inline MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

inline bool bitwise_equal(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace oracle
