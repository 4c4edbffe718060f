#include "stpls/kernels.hpp"

#include <cmath>

#include "stpls/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stpls::kernels {

using Eigen::Index;

namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr double kParallelWork = 32768.0;

void require_rows(Index a, Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + ": row counts differ (" +
                                                   std::to_string(a) + " vs " +
                                                   std::to_string(b) + ")");
  }
}

}  // namespace

namespace serial {

Eigen::MatrixXd crossprod(const ConstMatrixRef& a, const ConstMatrixRef& b) {
  require_rows(a.rows(), b.rows(), "crossprod");
  const Index n = a.rows();
  Eigen::MatrixXd out(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = 0; i < a.cols(); ++i) {
      double acc = 0.0;
      for (Index k = 0; k < n; ++k) acc += a(k, i) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Eigen::VectorXd matvec(const ConstMatrixRef& a, const ConstVectorRef& x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::dimension_mismatch, "matvec: size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.rows());
  for (Index c = 0; c < a.cols(); ++c) {
    const double xc = x(c);
    for (Index r = 0; r < a.rows(); ++r) out(r) += a(r, c) * xc;
  }
  return out;
}

Eigen::VectorXd tmatvec(const ConstMatrixRef& a, const ConstVectorRef& x) {
  require_rows(a.rows(), x.size(), "tmatvec");
  Eigen::VectorXd out(a.cols());
  for (Index c = 0; c < a.cols(); ++c) {
    double acc = 0.0;
    for (Index r = 0; r < a.rows(); ++r) acc += a(r, c) * x(r);
    out(c) = acc;
  }
  return out;
}

void rank_one_downdate(Eigen::MatrixXd& block, const ConstVectorRef& score,
                       const ConstVectorRef& loading) {
  require_rows(block.rows(), score.size(), "rank_one_downdate");
  if (block.cols() != loading.size()) {
    throw Error(ErrorCode::dimension_mismatch, "rank_one_downdate: loading length mismatch");
  }
  for (Index c = 0; c < block.cols(); ++c) {
    const double lc = loading(c);
    for (Index r = 0; r < block.rows(); ++r) block(r, c) -= score(r) * lc;
  }
}

Eigen::VectorXd column_means(const ConstMatrixRef& a) {
  Eigen::VectorXd out(a.cols());
  for (Index c = 0; c < a.cols(); ++c) {
    double acc = 0.0;
    for (Index r = 0; r < a.rows(); ++r) acc += a(r, c);
    out(c) = acc / static_cast<double>(a.rows());
  }
  return out;
}

Eigen::VectorXd column_sd(const ConstMatrixRef& a, const ConstVectorRef& means) {
  Eigen::VectorXd out(a.cols());
  const double denom = static_cast<double>(a.rows() - 1);
  for (Index c = 0; c < a.cols(); ++c) {
    double acc = 0.0;
    for (Index r = 0; r < a.rows(); ++r) {
      const double d = a(r, c) - means(c);
      acc += d * d;
    }
    out(c) = std::sqrt(acc / denom);
  }
  return out;
}

}  // namespace serial

namespace parallel {

bool enabled() noexcept {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Eigen::MatrixXd crossprod(const ConstMatrixRef& a, const ConstMatrixRef& b) {
  require_rows(a.rows(), b.rows(), "crossprod");
  const Index n = a.rows();
  const Index p = a.cols();
  const Index q = b.cols();
  Eigen::MatrixXd out(p, q);
  const bool big = static_cast<double>(n) * static_cast<double>(p * q) > kParallelWork;
#pragma omp parallel for collapse(2) schedule(static) if (big)
  for (Index j = 0; j < q; ++j) {
    for (Index i = 0; i < p; ++i) {
      double acc = 0.0;
      for (Index k = 0; k < n; ++k) acc += a(k, i) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Eigen::VectorXd matvec(const ConstMatrixRef& a, const ConstVectorRef& x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::dimension_mismatch, "matvec: size mismatch");
  const Index rows = a.rows();
  const Index cols = a.cols();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(rows);
  const bool big = static_cast<double>(rows) * static_cast<double>(cols) > kParallelWork;
  // Row blocks per thread; within a block columns are visited in ascending
  // order, matching the serial accumulation order for every output entry.
  constexpr Index kBlock = 64;
  const Index nblocks = (rows + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static) if (big)
  for (Index blk = 0; blk < nblocks; ++blk) {
    const Index r0 = blk * kBlock;
    const Index r1 = std::min(rows, r0 + kBlock);
    for (Index c = 0; c < cols; ++c) {
      const double xc = x(c);
      for (Index r = r0; r < r1; ++r) out(r) += a(r, c) * xc;
    }
  }
  return out;
}

Eigen::VectorXd tmatvec(const ConstMatrixRef& a, const ConstVectorRef& x) {
  require_rows(a.rows(), x.size(), "tmatvec");
  const Index cols = a.cols();
  Eigen::VectorXd out(cols);
  const bool big = static_cast<double>(a.rows()) * static_cast<double>(cols) > kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (Index c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (Index r = 0; r < a.rows(); ++r) acc += a(r, c) * x(r);
    out(c) = acc;
  }
  return out;
}

void rank_one_downdate(Eigen::MatrixXd& block, const ConstVectorRef& score,
                       const ConstVectorRef& loading) {
  require_rows(block.rows(), score.size(), "rank_one_downdate");
  if (block.cols() != loading.size()) {
    throw Error(ErrorCode::dimension_mismatch, "rank_one_downdate: loading length mismatch");
  }
  const Index cols = block.cols();
  const bool big = static_cast<double>(block.rows()) * static_cast<double>(cols) > kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (Index c = 0; c < cols; ++c) {
    const double lc = loading(c);
    for (Index r = 0; r < block.rows(); ++r) block(r, c) -= score(r) * lc;
  }
}

Eigen::VectorXd column_means(const ConstMatrixRef& a) {
  const Index cols = a.cols();
  Eigen::VectorXd out(cols);
  const bool big = static_cast<double>(a.rows()) * static_cast<double>(cols) > kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (Index c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (Index r = 0; r < a.rows(); ++r) acc += a(r, c);
    out(c) = acc / static_cast<double>(a.rows());
  }
  return out;
}

Eigen::VectorXd column_sd(const ConstMatrixRef& a, const ConstVectorRef& means) {
  const Index cols = a.cols();
  Eigen::VectorXd out(cols);
  const double denom = static_cast<double>(a.rows() - 1);
  const bool big = static_cast<double>(a.rows()) * static_cast<double>(cols) > kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (Index c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (Index r = 0; r < a.rows(); ++r) {
      const double d = a(r, c) - means(c);
      acc += d * d;
    }
    out(c) = std::sqrt(acc / denom);
  }
  return out;
}

}  // namespace parallel

}  // namespace stpls::kernels
