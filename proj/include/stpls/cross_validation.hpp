#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stpls/linalg.hpp"
#include "stpls/model_io.hpp"

namespace stpls {

enum class Method { pls1, pls2, xypls, sparse_twoblock };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

enum class CvScore { mean_mse, standardized_mean_mse };

std::string_view to_string(CvScore s);
CvScore parse_cv_score(std::string_view text);

struct GridPoint {
  int g = 1;
  int h = 1;
  double eta = 0.0;
  double kappa = 0.0;

  bool operator==(const GridPoint&) const = default;
};

struct CvConfig {
  int folds = 10;
  std::vector<int> g_grid{1};
  std::vector<int> h_grid{1};
  std::vector<double> eta_grid{0.0};
  std::vector<double> kappa_grid{0.0};
  std::uint64_t seed = 0;
  bool shuffle = true;
  CvScore score = CvScore::mean_mse;
  Scaling scaling = Scaling::center;

  void validate(Eigen::Index n) const;
};

struct CvPointResult {
  GridPoint point;
  bool feasible = true;
  std::string reason;                  ///< why the point was skipped
  double score = 0.0;                  ///< fold-averaged, response-averaged
  std::vector<double> per_response_mse;  ///< fold-averaged raw MSE
};

struct CvReport {
  std::vector<CvPointResult> per_point;  ///< grid enumeration order
  GridPoint best;
  double best_score = 0.0;
  std::vector<int> fold_assignment;
  std::vector<std::string> response_names;
};

struct CvOutcome {
  CvReport report;
  AnyModel model;  ///< refit on all rows at the best point
  double training_score = 0.0;
};

/// Seeded shuffle (optional) followed by contiguous blocks; the first
/// n mod folds folds hold one extra row.
std::vector<int> make_folds(Eigen::Index n, int folds, std::uint64_t seed, bool shuffle);

/// Grid points relevant to `method`, in enumeration order g, h, eta, kappa.
/// PLS ignores g/eta/kappa; XY-PLS pins eta = kappa = 0.
std::vector<GridPoint> enumerate_grid(Method method, const CvConfig& config);

/// K-fold grid search for pls2, xypls or sparse_twoblock. Ties on the score
/// go to the smallest h, then smallest g, then largest eta, then largest kappa.
CvOutcome grid_search(const DataMatrix& x, const DataMatrix& y, Method method,
                      const CvConfig& config);

struct Pls1CvOutcome {
  std::vector<CvReport> per_response;
  Pls1Set model;
};

/// Independent grid search over h for each response column.
Pls1CvOutcome grid_search_pls1(const DataMatrix& x, const DataMatrix& y, const CvConfig& config);

/// One row per (grid point, response) plus a score row per point and a
/// final best row. `label` fills the leading `target` column.
std::string cv_report_csv(const CvReport& report, std::string_view label = "all",
                          bool with_header = true);

/// True if `a` beats `b` under the documented tie rule (scores equal).
bool prefer_on_tie(const GridPoint& a, const GridPoint& b);

}  // namespace stpls
