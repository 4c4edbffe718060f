#pragma once

// Data-parallel inner loops of the estimators.
//
// Each kernel exists twice: a plain serial reference in `kernels::serial` and
// an OpenMP version in `kernels::parallel`. The parallel kernels split work
// over output entries only and keep every floating-point reduction in the
// same order as the serial loop, so both produce bitwise-identical results
// for any thread count. The unqualified functions in `kernels` are what the
// estimators call; they forward to the parallel versions.

#include <Eigen/Dense>

namespace stpls::kernels {

using ConstMatrixRef = Eigen::Ref<const Eigen::MatrixXd>;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;

namespace serial {

/// out = aᵀ·b for a (n×p), b (n×q).
Eigen::MatrixXd crossprod(const ConstMatrixRef& a, const ConstMatrixRef& b);
/// out = a·x.
Eigen::VectorXd matvec(const ConstMatrixRef& a, const ConstVectorRef& x);
/// out = aᵀ·x.
Eigen::VectorXd tmatvec(const ConstMatrixRef& a, const ConstVectorRef& x);
/// block ← block − score·loadingᵀ.
void rank_one_downdate(Eigen::MatrixXd& block, const ConstVectorRef& score,
                       const ConstVectorRef& loading);
Eigen::VectorXd column_means(const ConstMatrixRef& a);
/// Sample standard deviation (n−1 denominator), two-pass about `means`.
Eigen::VectorXd column_sd(const ConstMatrixRef& a, const ConstVectorRef& means);

}  // namespace serial

namespace parallel {

Eigen::MatrixXd crossprod(const ConstMatrixRef& a, const ConstMatrixRef& b);
Eigen::VectorXd matvec(const ConstMatrixRef& a, const ConstVectorRef& x);
Eigen::VectorXd tmatvec(const ConstMatrixRef& a, const ConstVectorRef& x);
void rank_one_downdate(Eigen::MatrixXd& block, const ConstVectorRef& score,
                       const ConstVectorRef& loading);
Eigen::VectorXd column_means(const ConstMatrixRef& a);
Eigen::VectorXd column_sd(const ConstMatrixRef& a, const ConstVectorRef& means);

/// True when the library was compiled with OpenMP.
bool enabled() noexcept;
/// Threads an outer parallel region would use (1 without OpenMP).
int max_threads() noexcept;

}  // namespace parallel

inline Eigen::MatrixXd crossprod(const ConstMatrixRef& a, const ConstMatrixRef& b) {
  return parallel::crossprod(a, b);
}
inline Eigen::VectorXd matvec(const ConstMatrixRef& a, const ConstVectorRef& x) {
  return parallel::matvec(a, x);
}
inline Eigen::VectorXd tmatvec(const ConstMatrixRef& a, const ConstVectorRef& x) {
  return parallel::tmatvec(a, x);
}
inline void rank_one_downdate(Eigen::MatrixXd& block, const ConstVectorRef& score,
                              const ConstVectorRef& loading) {
  parallel::rank_one_downdate(block, score, loading);
}
inline Eigen::VectorXd column_means(const ConstMatrixRef& a) { return parallel::column_means(a); }
inline Eigen::VectorXd column_sd(const ConstMatrixRef& a, const ConstVectorRef& means) {
  return parallel::column_sd(a, means);
}

}  // namespace stpls::kernels
