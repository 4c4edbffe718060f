#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace stpls {

/// Observations in rows, variables in columns, one unique name per column.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> col_names;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// Checks finiteness, name count and uniqueness. `min_rows` is 2 for
  /// training blocks and 1 for prediction inputs.
  void validate(std::string_view label, Eigen::Index min_rows = 2) const;

  /// Builds a matrix with generated names `<prefix>1 … <prefix>m`.
  static DataMatrix with_default_names(Eigen::MatrixXd values, std::string_view prefix);
};

enum class Scaling { center, autoscale };

std::string_view to_string(Scaling s);
Scaling parse_scaling(std::string_view text);

/// Column location/scale learned on training data.
struct CenteringInfo {
  Eigen::VectorXd means;
  std::optional<Eigen::VectorXd> scales;

  /// (x − means) / scales.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  /// x · scales + means.
  Eigen::MatrixXd invert(const Eigen::MatrixXd& x) const;
};

struct Centered {
  DataMatrix data;
  CenteringInfo info;
};

/// Subtracts column means and, for `Scaling::autoscale`, divides by the
/// sample standard deviation. Throws ConstantColumn naming the offending
/// column when a column has zero spread in autoscale mode.
Centered center_scale(const DataMatrix& data, Scaling mode);

struct SingularPair {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  double value = 0.0;
};

/// Entries with absolute value at or below this are treated as zero.
inline constexpr double kNumericalZero = 1e-14;

/// Top singular triple of `cross` by power iteration on the smaller of the
/// two Gram matrices, refined by Rayleigh-quotient steps. The largest-|·|
/// entry of `right` is made positive. Deterministic for a given input.
SingularPair dominant_singular_pair(const Eigen::MatrixXd& cross);

/// block − score·loadingᵀ.
Eigen::MatrixXd deflate(const Eigen::MatrixXd& block, const Eigen::VectorXd& score,
                        const Eigen::VectorXd& loading);

/// Least-squares loading blockᵀ·score / (scoreᵀ·score).
Eigen::VectorXd regression_loading(const Eigen::MatrixXd& block, const Eigen::VectorXd& score);

/// Applies the sign convention shared by all weight vectors: the first entry
/// of largest magnitude is made positive. Returns true if `v` was flipped.
bool canonical_sign(Eigen::VectorXd& v);

}  // namespace stpls
