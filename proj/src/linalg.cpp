#include "stpls/linalg.hpp"

#include <cmath>
#include <unordered_set>

#include "stpls/error.hpp"
#include "stpls/kernels.hpp"

namespace stpls {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void DataMatrix::validate(std::string_view label, Index min_rows) const {
  const std::string who(label);
  if (values.rows() < min_rows) {
    throw Error(ErrorCode::too_few_rows, who + " has " + std::to_string(values.rows()) +
                                             " rows, need at least " + std::to_string(min_rows));
  }
  if (values.cols() < 1) throw Error(ErrorCode::invalid_argument, who + " has no columns");
  if (static_cast<Index>(col_names.size()) != values.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                who + ": " + std::to_string(col_names.size()) + " names for " +
                    std::to_string(values.cols()) + " columns");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& name : col_names) {
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::invalid_argument, who + ": duplicate column name '" + name + "'");
    }
  }
  for (Index c = 0; c < values.cols(); ++c) {
    for (Index r = 0; r < values.rows(); ++r) {
      if (!std::isfinite(values(r, c))) {
        throw Error(ErrorCode::non_finite_input, who + " row " + std::to_string(r + 1) +
                                                     ", column '" + col_names[c] + "'");
      }
    }
  }
}

DataMatrix DataMatrix::with_default_names(MatrixXd values, std::string_view prefix) {
  DataMatrix out{std::move(values), {}};
  out.col_names.reserve(out.values.cols());
  for (Index c = 0; c < out.values.cols(); ++c) {
    out.col_names.push_back(std::string(prefix) + std::to_string(c + 1));
  }
  return out;
}

std::string_view to_string(Scaling s) { return s == Scaling::center ? "center" : "autoscale"; }

Scaling parse_scaling(std::string_view text) {
  if (text == "center") return Scaling::center;
  if (text == "autoscale") return Scaling::autoscale;
  throw Error(ErrorCode::invalid_argument,
              "unknown scaling '" + std::string(text) + "' (expected center|autoscale)");
}

MatrixXd CenteringInfo::apply(const MatrixXd& x) const {
  if (x.cols() != means.size()) {
    throw Error(ErrorCode::dimension_mismatch, "centering: column count mismatch");
  }
  MatrixXd out = x.rowwise() - means.transpose();
  if (scales) out.array().rowwise() /= scales->transpose().array();
  return out;
}

MatrixXd CenteringInfo::invert(const MatrixXd& x) const {
  if (x.cols() != means.size()) {
    throw Error(ErrorCode::dimension_mismatch, "centering: column count mismatch");
  }
  MatrixXd out = x;
  if (scales) out.array().rowwise() *= scales->transpose().array();
  out.rowwise() += means.transpose();
  return out;
}

Centered center_scale(const DataMatrix& data, Scaling mode) {
  data.validate("input", 1);
  CenteringInfo info;
  info.means = kernels::column_means(data.values);
  if (mode == Scaling::autoscale) {
    if (data.rows() < 2) throw Error(ErrorCode::too_few_rows, "autoscale needs at least 2 rows");
    VectorXd sd = kernels::column_sd(data.values, info.means);
    for (Index c = 0; c < sd.size(); ++c) {
      // Relative floor so that a constant column with rounding noise in its
      // mean is still reported.
      const double floor = 1e-13 * std::max(1.0, std::abs(info.means(c)));
      if (!(sd(c) > floor)) throw Error(ErrorCode::constant_column, data.col_names[c]);
    }
    info.scales = std::move(sd);
  }
  DataMatrix out{info.apply(data.values), data.col_names};
  return {std::move(out), std::move(info)};
}

bool canonical_sign(VectorXd& v) {
  if (v.size() == 0) return false;
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  if (v(best) < 0.0) {
    v = -v;
    return true;
  }
  return false;
}

namespace {

constexpr double kPowerTolerance = 1e-10;
constexpr int kPowerMaxIterations = 10000;
constexpr int kRefinementSteps = 3;
constexpr double kRefinementShift = 1e-9;

double eigen_residual(const MatrixXd& gram, const VectorXd& x) {
  const VectorXd gx = gram * x;
  return (gx - x.dot(gx) * x).norm();
}

// Dominant eigenvector of a symmetric positive semidefinite matrix.
VectorXd dominant_eigenvector(const MatrixXd& gram) {
  Index start = 0;
  double best = -1.0;
  for (Index c = 0; c < gram.cols(); ++c) {
    const double norm = gram.col(c).norm();
    if (norm > best) {
      best = norm;
      start = c;
    }
  }
  VectorXd x = gram.col(start) / best;

  bool converged = false;
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    VectorXd next = gram * x;
    const double norm = next.norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::zero_matrix, "power iteration collapsed to zero");
    next /= norm;
    const double step = (next - x).norm();
    x = std::move(next);
    if (step < kPowerTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::no_convergence,
                "power iteration did not converge in " + std::to_string(kPowerMaxIterations) +
                    " iterations");
  }

  // Power iteration stops at a step size of 1e-10, which leaves an error of
  // about 1e-10·λ₂/(λ₁−λ₂) in the direction. A few Rayleigh-quotient steps take
  // it to rounding level; a step is only kept if it lowers the residual.
  double residual = eigen_residual(gram, x);
  const MatrixXd identity = MatrixXd::Identity(gram.rows(), gram.cols());
  for (int step = 0; step < kRefinementSteps && residual > 0.0; ++step) {
    // Shifting just past the Rayleigh quotient keeps the system nonsingular
    // while leaving it nearly so in the wanted direction. A rank-revealing
    // solver would discard exactly that direction.
    const double mu = x.dot(gram * x) * (1.0 + kRefinementShift);
    VectorXd y = (gram - mu * identity).partialPivLu().solve(x);
    const double norm = y.norm();
    if (!std::isfinite(norm) || !(norm > 0.0)) break;
    y /= norm;
    if (y.dot(x) < 0.0) y = -y;
    const double r = eigen_residual(gram, y);
    if (!(r < residual)) break;
    x = std::move(y);
    residual = r;
  }
  return x;
}

}  // namespace

SingularPair dominant_singular_pair(const MatrixXd& cross) {
  if (cross.size() == 0) throw Error(ErrorCode::zero_matrix, "empty cross-product matrix");
  if (!cross.allFinite()) throw Error(ErrorCode::non_finite_input, "cross-product matrix");
  if (!(cross.cwiseAbs().maxCoeff() > kNumericalZero)) {
    throw Error(ErrorCode::zero_matrix, "cross-product matrix has no nonzero entry");
  }

  SingularPair pair;
  if (cross.cols() <= cross.rows()) {
    pair.right = dominant_eigenvector(kernels::crossprod(cross, cross));
  } else {
    const MatrixXd crossT = cross.transpose();
    const VectorXd left = dominant_eigenvector(kernels::crossprod(crossT, crossT));
    pair.right = kernels::tmatvec(cross, left);
    pair.right /= pair.right.norm();
  }
  canonical_sign(pair.right);
  pair.left = kernels::matvec(cross, pair.right);
  pair.value = pair.left.norm();
  pair.left /= pair.value;
  return pair;
}

MatrixXd deflate(const MatrixXd& block, const VectorXd& score, const VectorXd& loading) {
  if (block.rows() != score.size() || block.cols() != loading.size()) {
    throw Error(ErrorCode::dimension_mismatch, "deflate: block is " +
                                                   std::to_string(block.rows()) + "x" +
                                                   std::to_string(block.cols()) + ", score " +
                                                   std::to_string(score.size()) + ", loading " +
                                                   std::to_string(loading.size()));
  }
  MatrixXd out = block;
  kernels::rank_one_downdate(out, score, loading);
  return out;
}

VectorXd regression_loading(const MatrixXd& block, const VectorXd& score) {
  const double ss = score.squaredNorm();
  if (!(ss > 0.0)) throw Error(ErrorCode::zero_vector, "score vector is zero");
  return kernels::tmatvec(block, score) / ss;
}

}  // namespace stpls
