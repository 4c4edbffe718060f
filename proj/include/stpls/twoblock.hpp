#pragma once

// Sparse twoblock PLS and its dense special case XY-PLS.
//
// Both blocks are reduced independently: response weights come from the
// dominant eigenvector of Fᵀ·X·Xᵀ·F with F the deflated response block and X
// the undeflated predictors, predictor weights from Eᵀ·Y·Yᵀ·E symmetrically.
// Weights are soft-thresholded at a fraction (kappa for responses, eta for
// predictors) of their largest entry. The coefficient matrix is
//
//     B = W (Wᵀ Xᵀ X W)⁻¹ Wᵀ Xᵀ Y V Vᵀ
//
// With kappa = eta = 0 the fit is exactly dense XY-PLS.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stpls/linalg.hpp"

namespace stpls {

struct TwoblockHyperparams {
  int g = 1;             ///< response components
  int h = 1;             ///< predictor components
  double kappa = 0.0;    ///< response sparsity in [0, 1)
  double eta = 0.0;      ///< predictor sparsity in [0, 1)

  /// Range checks only; rank bounds are checked against data in fit_twoblock.
  void validate() const;
};

struct ThresholdedVector {
  Eigen::VectorXd weights;  ///< unit 2-norm
  Eigen::VectorXd mask;     ///< 1 where the entry survived, else 0
};

/// Soft thresholding of v/‖v‖ at `sparsity`·max|v/‖v‖|, renormalized to unit
/// length. Throws ZeroVector for a zero input.
ThresholdedVector soft_threshold_vector(const Eigen::VectorXd& v, double sparsity);

/// Output of one block's reduction loop.
struct BlockReduction {
  Eigen::MatrixXd weights;   ///< thresholded, unit-norm weight columns
  Eigen::MatrixXd loadings;  ///< masked loadings
  Eigen::MatrixXd scores;
  Eigen::MatrixXd masks;
  Eigen::MatrixXd residual;  ///< block after the last deflation
  int requested = 0;
  int achieved = 0;
  bool truncated() const { return achieved < requested; }
};

/// Response-side loop: weights V, loadings Q, scores U, masks M. `x` and `y`
/// must already be centered.
BlockReduction response_reduction(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int g,
                                  double kappa);

/// Predictor-side loop: weights W, loadings P, scores T, masks N.
BlockReduction predictor_reduction(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int h,
                                   double eta);

/// Gram matrices with a condition estimate above this are rejected.
inline constexpr double kMaxGramCondition = 1e12;

/// B = W (WᵀXᵀXW)⁻¹ WᵀXᵀY V Vᵀ on centered blocks. An empty W or V yields a
/// zero matrix. Throws SingularGram when WᵀXᵀXW is numerically singular.
Eigen::MatrixXd compute_coefficients(const Eigen::MatrixXd& w, const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& y, const Eigen::MatrixXd& v);

struct TwoblockModel {
  Eigen::MatrixXd W, V;  ///< predictor (p×h) and response (q×g) weights
  Eigen::MatrixXd P, Q;  ///< masked loadings
  Eigen::MatrixXd T, U;  ///< training scores
  Eigen::MatrixXd N, M;  ///< predictor and response masks
  Eigen::MatrixXd B;     ///< coefficients in the centered (and scaled) space
  CenteringInfo x_center, y_center;
  TwoblockHyperparams hyper;
  Scaling scaling = Scaling::center;
  std::vector<std::string> x_names, y_names;

  int achieved_g() const { return static_cast<int>(V.cols()); }
  int achieved_h() const { return static_cast<int>(W.cols()); }
  /// True if either reduction stopped early on a vanished residual.
  bool truncated() const { return achieved_g() < hyper.g || achieved_h() < hyper.h; }

  /// B mapped to the original units: diag(1/sx)·B·diag(sy). Equals B under
  /// centering only; the zero pattern is the same in both.
  Eigen::MatrixXd coefficients_original_scale() const;
};

/// Rank bound used for g and h: min(columns, rows − 1).
int component_bound(Eigen::Index rows, Eigen::Index cols);

TwoblockModel fit_twoblock(const DataMatrix& x, const DataMatrix& y,
                           const TwoblockHyperparams& hyper, Scaling scaling = Scaling::center);

/// Predictions in original response units. Columns of `x_new` are matched
/// to the training predictors by name and must be the same set.
DataMatrix predict_twoblock(const TwoblockModel& model, const DataMatrix& x_new);

struct SelectionReport {
  std::vector<std::string> selected_predictors;
  std::vector<std::string> deselected_predictors;
  std::vector<std::string> selected_responses;
  std::vector<std::string> deselected_responses;
};

/// A predictor is selected iff its row of W has a nonzero entry; a response
/// iff its row of V does.
SelectionReport selection_report(const TwoblockModel& model);

/// Per-row "has any entry with |·| > kNumericalZero" indicator.
std::vector<bool> nonzero_rows(const Eigen::MatrixXd& m);

/// Reorders the columns of `x_new` to `names`. Throws ColumnMismatch listing
/// the missing and unexpected columns.
Eigen::MatrixXd align_columns(const DataMatrix& x_new, const std::vector<std::string>& names);

}  // namespace stpls
