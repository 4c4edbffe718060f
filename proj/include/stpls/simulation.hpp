#pragma once

// Latent-variable simulation harness.
//
//   X = T·Pᵀ + G,  T ~ N(0, I_h),  G ~ N(0, σ² I)
//   Y = X·B + H,   H ~ N(0, σ² I)
//
// The first p1 predictors carry uniform loadings, the remaining p2 have zero
// loadings. B is uniform on the informative-predictor × informative-response
// block and exactly zero elsewhere.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stpls/cross_validation.hpp"
#include "stpls/pls.hpp"
#include "stpls/twoblock.hpp"

namespace stpls {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct SimScenario {
  Eigen::Index n = 100;
  int p1 = 100;
  int p2 = 200;
  int q1 = 3;
  int q2 = 2;
  int h_true = 3;
  double noise_sd = 0.1;
  Interval loading_range{-5.0, 5.0};
  Interval coef_range{0.02, 0.07};
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimTruth {
  Eigen::MatrixXd scores;        // n × h_true
  Eigen::MatrixXd loadings;      // (p1+p2) × h_true
  Eigen::MatrixXd coefficients;  // (p1+p2) × (q1+q2)
  std::vector<bool> informative_x;
  std::vector<bool> informative_y;
};

struct SimDataset {
  DataMatrix x;
  DataMatrix y;
  SimTruth truth;
};

/// Deterministic for a fixed scenario (including its seed).
SimDataset generate_dataset(const SimScenario& scenario);

/// MSEB and selection error rates (percent).
struct SimResult {
  double mseb = 0.0;
  double fpx = 0.0;
  double fnx = 0.0;
  double fpy = 0.0;
  double fny = 0.0;
};

/// MSEB averages squared coefficient errors over the informative-response
/// columns; selection masks say which predictors/responses a fit kept.
SimResult compute_metrics(const Eigen::MatrixXd& coefficients, const std::vector<bool>& selected_x,
                          const std::vector<bool>& selected_y, const SimTruth& truth);
/// Selection from nonzero rows of W and V.
SimResult compute_metrics(const TwoblockModel& model, const SimTruth& truth);
/// Selection from nonzero rows and columns of the coefficient matrix.
SimResult compute_metrics(const PlsModel& model, const SimTruth& truth);

struct EstimatorSpec {
  std::string label;
  Method method = Method::sparse_twoblock;  ///< pls2, xypls or sparse_twoblock
  TwoblockHyperparams hyper;                ///< pls2 uses hyper.h only
  Scaling scaling = Scaling::autoscale;
};

struct MetricSummary {
  double mean = 0.0;
  double se = 0.0;  ///< standard error of the mean
};

struct BatchResult {
  std::size_t scenario_index = 0;
  SimScenario scenario;
  std::string estimator;
  int runs = 0;      ///< successful runs
  int failures = 0;  ///< runs whose fit raised an error
  std::string first_error;
  MetricSummary mseb, fpx, fnx, fpy, fny;
};

/// Per-run seed from the master seed and two indices (SplitMix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Runs every estimator on the same `runs` datasets per scenario. Run r of
/// scenario s uses derive_seed(seed, s, r), so output is independent of
/// thread scheduling. Results come in scenario-major, estimator-minor order.
std::vector<BatchResult> run_batch(const std::vector<SimScenario>& scenarios,
                                   const std::vector<EstimatorSpec>& estimators, int runs,
                                   std::uint64_t seed);

std::string batch_metrics_csv(const std::vector<BatchResult>& results);

/// Long-format plot data for one metric ("mseb", "fpx", "fnx", "fpy", "fny"):
/// scenario, p1, estimator, mean, se.
std::string plot_data_csv(const std::vector<BatchResult>& results, std::string_view metric);

}  // namespace stpls
