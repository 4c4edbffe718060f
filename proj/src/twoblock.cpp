#include "stpls/twoblock.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "stpls/error.hpp"
#include "stpls/kernels.hpp"

namespace stpls {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// A reduction stops once the remaining cross-covariance falls below this
// fraction of its initial norm.
constexpr double kDegenerateRatio = 1e-12;

void check_sparsity(double s, const char* name) {
  if (!(s >= 0.0 && s < 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                std::string(name) + " must lie in [0, 1), got " + std::to_string(s));
  }
}

enum class Side { response, predictor };

// Reduces `block` against the fixed `opposite` block. Both sides work on the
// response-by-predictor cross product (Fᵀ·X or Yᵀ·E): response weights are its
// dominant left singular vector, predictor weights the right one. Sharing one
// orientation gives the first V and W columns a common sign.
BlockReduction reduce_block(const MatrixXd& block, const MatrixXd& opposite, int components,
                            double sparsity, Side side) {
  if (block.rows() != opposite.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "blocks have different row counts");
  }
  check_sparsity(sparsity, "sparsity");
  const Index n = block.rows();
  const Index m = block.cols();

  BlockReduction out;
  out.requested = components;
  out.weights.resize(m, components);
  out.loadings.resize(m, components);
  out.scores.resize(n, components);
  out.masks.resize(m, components);

  MatrixXd residual = block;
  const double block_norm = block.norm();
  double initial = 0.0;
  int achieved = 0;
  for (int i = 0; i < components; ++i) {
    const MatrixXd cross = side == Side::response ? kernels::crossprod(residual, opposite)
                                                  : kernels::crossprod(opposite, residual);
    const double cross_norm = cross.norm();
    if (i == 0) initial = cross_norm;
    if (!(cross_norm > kNumericalZero) || cross_norm <= kDegenerateRatio * initial) break;

    const SingularPair pair = dominant_singular_pair(cross);
    const VectorXd& dominant = side == Side::response ? pair.left : pair.right;
    ThresholdedVector thr = soft_threshold_vector(dominant, sparsity);
    VectorXd score = kernels::matvec(residual, thr.weights);
    const double ss = score.squaredNorm();
    if (!(std::sqrt(ss) > kDegenerateRatio * block_norm)) break;

    // Deflation uses the full least-squares loading so successive scores stay
    // orthogonal; the stored loading is masked to the weight's support.
    VectorXd loading = kernels::tmatvec(residual, score) / ss;
    kernels::rank_one_downdate(residual, score, loading);

    out.weights.col(i) = thr.weights;
    out.loadings.col(i) = loading.cwiseProduct(thr.mask);
    out.scores.col(i) = score;
    out.masks.col(i) = thr.mask;
    ++achieved;
  }
  out.achieved = achieved;
  out.weights.conservativeResize(m, achieved);
  out.loadings.conservativeResize(m, achieved);
  out.scores.conservativeResize(n, achieved);
  out.masks.conservativeResize(m, achieved);
  out.residual = std::move(residual);
  return out;
}

}  // namespace

void TwoblockHyperparams::validate() const {
  if (g < 1) throw Error(ErrorCode::invalid_argument, "g must be positive");
  if (h < 1) throw Error(ErrorCode::invalid_argument, "h must be positive");
  check_sparsity(kappa, "kappa");
  check_sparsity(eta, "eta");
}

ThresholdedVector soft_threshold_vector(const VectorXd& v, double sparsity) {
  check_sparsity(sparsity, "sparsity");
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::zero_vector, "cannot threshold a zero or non-finite vector");
  }
  const VectorXd unit = v / norm;
  const double tau = sparsity * unit.cwiseAbs().maxCoeff();

  ThresholdedVector out{VectorXd::Zero(v.size()), VectorXd::Zero(v.size())};
  for (Index k = 0; k < v.size(); ++k) {
    const double a = std::abs(unit(k));
    if (a > tau) {
      out.weights(k) = std::copysign(a - tau, unit(k));
      out.mask(k) = 1.0;
    }
  }
  out.weights /= out.weights.norm();
  return out;
}

BlockReduction response_reduction(const MatrixXd& x, const MatrixXd& y, int g, double kappa) {
  return reduce_block(y, x, g, kappa, Side::response);
}

BlockReduction predictor_reduction(const MatrixXd& x, const MatrixXd& y, int h, double eta) {
  return reduce_block(x, y, h, eta, Side::predictor);
}

MatrixXd compute_coefficients(const MatrixXd& w, const MatrixXd& x, const MatrixXd& y,
                              const MatrixXd& v) {
  if (x.rows() != y.rows() || w.rows() != x.cols() || v.rows() != y.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "compute_coefficients: nonconformable inputs");
  }
  if (w.cols() == 0 || v.cols() == 0) return MatrixXd::Zero(x.cols(), y.cols());

  const MatrixXd xw = x * w;
  const MatrixXd gram = kernels::crossprod(xw, xw);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxGramCondition) {
    throw Error(ErrorCode::singular_gram,
                "WᵀXᵀXW is numerically singular (condition estimate " +
                    (lo > 0.0 ? std::to_string(hi / lo) : std::string("inf")) +
                    "); reduce the number of predictor components h");
  }
  const MatrixXd rhs = kernels::crossprod(xw, y) * v;
  const MatrixXd solved = gram.llt().solve(rhs);
  // Left-to-right so that zero rows of W and zero rows of V propagate as
  // exact zero rows and columns of B.
  return (w * solved) * v.transpose();
}

MatrixXd TwoblockModel::coefficients_original_scale() const {
  MatrixXd out = B;
  if (x_center.scales) out.array().colwise() /= x_center.scales->array();
  if (y_center.scales) out.array().rowwise() *= y_center.scales->transpose().array();
  return out;
}

int component_bound(Index rows, Index cols) {
  return static_cast<int>(std::min<Index>(cols, rows - 1));
}

TwoblockModel fit_twoblock(const DataMatrix& x, const DataMatrix& y,
                           const TwoblockHyperparams& hyper, Scaling scaling) {
  x.validate("X");
  y.validate("Y");
  if (x.rows() != y.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "X has " + std::to_string(x.rows()) +
                                                   " rows but Y has " + std::to_string(y.rows()));
  }
  hyper.validate();
  const int g_max = component_bound(y.rows(), y.cols());
  const int h_max = component_bound(x.rows(), x.cols());
  if (hyper.g > g_max) {
    throw Error(ErrorCode::component_count_too_large,
                "g = " + std::to_string(hyper.g) + " exceeds min(q, n-1) = " + std::to_string(g_max));
  }
  if (hyper.h > h_max) {
    throw Error(ErrorCode::component_count_too_large,
                "h = " + std::to_string(hyper.h) + " exceeds min(p, n-1) = " + std::to_string(h_max));
  }

  Centered xc = center_scale(x, scaling);
  Centered yc = center_scale(y, scaling);
  const MatrixXd& xs = xc.data.values;
  const MatrixXd& ys = yc.data.values;

  BlockReduction resp = response_reduction(xs, ys, hyper.g, hyper.kappa);
  BlockReduction pred = predictor_reduction(xs, ys, hyper.h, hyper.eta);

  TwoblockModel model;
  model.B = compute_coefficients(pred.weights, xs, ys, resp.weights);
  model.W = std::move(pred.weights);
  model.P = std::move(pred.loadings);
  model.T = std::move(pred.scores);
  model.N = std::move(pred.masks);
  model.V = std::move(resp.weights);
  model.Q = std::move(resp.loadings);
  model.U = std::move(resp.scores);
  model.M = std::move(resp.masks);
  model.x_center = std::move(xc.info);
  model.y_center = std::move(yc.info);
  model.hyper = hyper;
  model.scaling = scaling;
  model.x_names = x.col_names;
  model.y_names = y.col_names;
  return model;
}

MatrixXd align_columns(const DataMatrix& x_new, const std::vector<std::string>& names) {
  std::unordered_map<std::string_view, Index> index;
  for (Index c = 0; c < static_cast<Index>(x_new.col_names.size()); ++c) {
    index.emplace(x_new.col_names[c], c);
  }
  std::vector<std::string> missing;
  for (const auto& name : names) {
    if (!index.contains(name)) missing.push_back(name);
  }
  std::vector<std::string> extra;
  {
    std::unordered_map<std::string_view, bool> expected;
    for (const auto& name : names) expected.emplace(name, true);
    for (const auto& name : x_new.col_names) {
      if (!expected.contains(name)) extra.push_back(name);
    }
  }
  if (!missing.empty() || !extra.empty()) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ", ") + e;
      return s.empty() ? std::string("none") : s;
    };
    throw Error(ErrorCode::column_mismatch,
                "missing columns: " + join(missing) + "; unexpected columns: " + join(extra));
  }
  MatrixXd out(x_new.rows(), static_cast<Index>(names.size()));
  for (Index c = 0; c < out.cols(); ++c) out.col(c) = x_new.values.col(index.at(names[c]));
  return out;
}

DataMatrix predict_twoblock(const TwoblockModel& model, const DataMatrix& x_new) {
  x_new.validate("X_new", 1);
  const MatrixXd aligned = align_columns(x_new, model.x_names);
  const MatrixXd fitted = model.x_center.apply(aligned) * model.B;
  return DataMatrix{model.y_center.invert(fitted), model.y_names};
}

std::vector<bool> nonzero_rows(const MatrixXd& m) {
  std::vector<bool> out(static_cast<std::size_t>(m.rows()), false);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) > kNumericalZero) {
        out[static_cast<std::size_t>(r)] = true;
        break;
      }
    }
  }
  return out;
}

SelectionReport selection_report(const TwoblockModel& model) {
  SelectionReport report;
  const auto xs = nonzero_rows(model.W);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    (xs[j] ? report.selected_predictors : report.deselected_predictors).push_back(model.x_names[j]);
  }
  const auto ys = nonzero_rows(model.V);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    (ys[k] ? report.selected_responses : report.deselected_responses).push_back(model.y_names[k]);
  }
  return report;
}

}  // namespace stpls
