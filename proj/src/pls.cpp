#include "stpls/pls.hpp"

#include <cmath>

#include "stpls/error.hpp"
#include "stpls/kernels.hpp"
#include "stpls/twoblock.hpp"

namespace stpls {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNipalsTolerance = 1e-10;
constexpr int kNipalsMaxIterations = 10000;
constexpr double kDegenerateRatio = 1e-12;

}  // namespace

MatrixXd PlsModel::coefficients_original_scale() const {
  MatrixXd out = coefficients;
  if (x_center.scales) out.array().colwise() /= x_center.scales->array();
  if (y_center.scales) out.array().rowwise() *= y_center.scales->transpose().array();
  return out;
}

PlsModel fit_pls(const DataMatrix& x, const DataMatrix& y, int h, Scaling scaling) {
  x.validate("X");
  y.validate("Y");
  if (x.rows() != y.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "X has " + std::to_string(x.rows()) +
                                                   " rows but Y has " + std::to_string(y.rows()));
  }
  if (h < 1) throw Error(ErrorCode::invalid_argument, "h must be positive");
  const int h_max = component_bound(x.rows(), x.cols());
  if (h > h_max) {
    throw Error(ErrorCode::component_count_too_large,
                "h = " + std::to_string(h) + " exceeds min(p, n-1) = " + std::to_string(h_max));
  }

  Centered xc = center_scale(x, scaling);
  Centered yc = center_scale(y, scaling);
  const Index n = x.rows();
  const Index p = x.cols();
  const Index q = y.cols();

  MatrixXd e = xc.data.values;
  MatrixXd f = yc.data.values;
  MatrixXd w_all(p, h), p_all(p, h), c_all(q, h), t_all(n, h);

  double initial = 0.0;
  int achieved = 0;
  for (int a = 0; a < h; ++a) {
    const MatrixXd cross = kernels::crossprod(e, f);
    const double cross_norm = cross.norm();
    if (a == 0) initial = cross_norm;
    if (!(cross_norm > kNumericalZero) || cross_norm <= kDegenerateRatio * initial) break;

    VectorXd w, t, c;
    if (q == 1) {
      w = cross.col(0) / cross.col(0).norm();
      t = kernels::matvec(e, w);
      c = kernels::tmatvec(f, t) / t.squaredNorm();
    } else {
      Index start = 0;
      f.colwise().squaredNorm().maxCoeff(&start);
      VectorXd u = f.col(start);
      VectorXd w_prev;
      bool converged = false;
      for (int it = 0; it < kNipalsMaxIterations; ++it) {
        w = kernels::tmatvec(e, u);
        const double wn = w.norm();
        if (!(wn > 0.0)) break;
        w /= wn;
        t = kernels::matvec(e, w);
        c = kernels::tmatvec(f, t) / t.squaredNorm();
        u = kernels::matvec(f, c) / c.squaredNorm();
        if (it > 0 && (w - w_prev).norm() < kNipalsTolerance) {
          converged = true;
          break;
        }
        w_prev = w;
      }
      if (!converged) {
        if (w.size() == 0 || !(w.norm() > 0.0)) break;
        throw Error(ErrorCode::no_convergence,
                    "NIPALS component " + std::to_string(a + 1) + " did not converge in " +
                        std::to_string(kNipalsMaxIterations) + " iterations");
      }
    }
    const double tt = t.squaredNorm();
    if (!(std::sqrt(tt) > kDegenerateRatio * xc.data.values.norm())) break;

    const VectorXd load = kernels::tmatvec(e, t) / tt;
    kernels::rank_one_downdate(e, t, load);
    kernels::rank_one_downdate(f, t, c);
    w_all.col(a) = w;
    p_all.col(a) = load;
    c_all.col(a) = c;
    t_all.col(a) = t;
    ++achieved;
  }

  PlsModel model;
  model.weights = w_all.leftCols(achieved);
  model.x_loadings = p_all.leftCols(achieved);
  model.y_loadings = c_all.leftCols(achieved);
  model.scores = t_all.leftCols(achieved);
  if (achieved == 0) {
    model.coefficients = MatrixXd::Zero(p, q);
  } else {
    const MatrixXd pw = model.x_loadings.transpose() * model.weights;
    model.coefficients = model.weights * pw.partialPivLu().solve(model.y_loadings.transpose());
  }
  model.x_center = std::move(xc.info);
  model.y_center = std::move(yc.info);
  model.scaling = scaling;
  model.requested_components = h;
  model.x_names = x.col_names;
  model.y_names = y.col_names;
  return model;
}

DataMatrix predict_pls(const PlsModel& model, const DataMatrix& x_new) {
  x_new.validate("X_new", 1);
  const MatrixXd aligned = align_columns(x_new, model.x_names);
  const MatrixXd fitted = model.x_center.apply(aligned) * model.coefficients;
  return DataMatrix{model.y_center.invert(fitted), model.y_names};
}

DataMatrix response_column(const DataMatrix& y, Index k) {
  return DataMatrix{y.values.col(k), {y.col_names.at(static_cast<std::size_t>(k))}};
}

Pls1Set fit_pls1_set(const DataMatrix& x, const DataMatrix& y, const std::vector<int>& h,
                     Scaling scaling) {
  if (static_cast<Index>(h.size()) != y.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "need one component count per response (" +
                                                   std::to_string(y.cols()) + "), got " +
                                                   std::to_string(h.size()));
  }
  Pls1Set set;
  for (Index k = 0; k < y.cols(); ++k) {
    set.models.push_back(fit_pls(x, response_column(y, k), h[static_cast<std::size_t>(k)], scaling));
  }
  return set;
}

DataMatrix predict_pls1_set(const Pls1Set& set, const DataMatrix& x_new) {
  if (set.models.empty()) throw Error(ErrorCode::invalid_argument, "empty PLS1 model set");
  DataMatrix out;
  out.values.resize(x_new.rows(), static_cast<Index>(set.models.size()));
  for (std::size_t k = 0; k < set.models.size(); ++k) {
    DataMatrix one = predict_pls(set.models[k], x_new);
    out.values.col(static_cast<Index>(k)) = one.values.col(0);
    out.col_names.push_back(one.col_names.at(0));
  }
  return out;
}

}  // namespace stpls
