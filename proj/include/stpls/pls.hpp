#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stpls/linalg.hpp"

namespace stpls {

/// NIPALS PLS regression (PLS2; PLS1 when Y has one column).
struct PlsModel {
  Eigen::MatrixXd weights;       // p×h
  Eigen::MatrixXd x_loadings;    // p×h
  Eigen::MatrixXd y_loadings;    // q×h
  Eigen::MatrixXd scores;        // n×h
  Eigen::MatrixXd coefficients;  // p×q, centered/scaled space
  CenteringInfo x_center, y_center;
  Scaling scaling = Scaling::center;
  int requested_components = 0;
  std::vector<std::string> x_names, y_names;

  int n_components() const { return static_cast<int>(weights.cols()); }
  bool truncated() const { return n_components() < requested_components; }
  Eigen::MatrixXd coefficients_original_scale() const;
};

PlsModel fit_pls(const DataMatrix& x, const DataMatrix& y, int h, Scaling scaling = Scaling::center);

DataMatrix predict_pls(const PlsModel& model, const DataMatrix& x_new);

/// Independent PLS1 fits, one per response, each with its own h.
struct Pls1Set {
  std::vector<PlsModel> models;
};

Pls1Set fit_pls1_set(const DataMatrix& x, const DataMatrix& y, const std::vector<int>& h,
                     Scaling scaling = Scaling::center);

DataMatrix predict_pls1_set(const Pls1Set& set, const DataMatrix& x_new);

/// Column `k` of `y` as a one-column DataMatrix.
DataMatrix response_column(const DataMatrix& y, Eigen::Index k);

}  // namespace stpls
