#include "stpls/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "stpls/csv.hpp"
#include "stpls/error.hpp"

namespace stpls {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::pls1: return "pls1";
    case Method::pls2: return "pls2";
    case Method::xypls: return "xypls";
    case Method::sparse_twoblock: return "sparse-twoblock";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "pls1") return Method::pls1;
  if (text == "pls2") return Method::pls2;
  if (text == "xypls") return Method::xypls;
  if (text == "sparse-twoblock") return Method::sparse_twoblock;
  throw Error(ErrorCode::invalid_argument, "unknown method '" + std::string(text) +
                                               "' (expected pls1|pls2|xypls|sparse-twoblock)");
}

std::string_view to_string(CvScore s) {
  return s == CvScore::mean_mse ? "mean-mse" : "standardized-mean-mse";
}

CvScore parse_cv_score(std::string_view text) {
  if (text == "mean-mse") return CvScore::mean_mse;
  if (text == "standardized-mean-mse") return CvScore::standardized_mean_mse;
  throw Error(ErrorCode::invalid_argument, "unknown CV score '" + std::string(text) + "'");
}

void CvConfig::validate(Index n) const {
  if (folds < 2) throw Error(ErrorCode::invalid_argument, "folds must be at least 2");
  if (folds > n) {
    throw Error(ErrorCode::too_few_rows, std::to_string(folds) + " folds requested for " +
                                             std::to_string(n) + " rows");
  }
  if (g_grid.empty() || h_grid.empty() || eta_grid.empty() || kappa_grid.empty()) {
    throw Error(ErrorCode::invalid_argument, "every grid dimension needs at least one value");
  }
  for (int v : g_grid) {
    if (v < 1) throw Error(ErrorCode::invalid_argument, "g grid values must be positive");
  }
  for (int v : h_grid) {
    if (v < 1) throw Error(ErrorCode::invalid_argument, "h grid values must be positive");
  }
  for (double v : eta_grid) {
    if (!(v >= 0.0 && v < 1.0)) throw Error(ErrorCode::invalid_argument, "eta grid values must lie in [0, 1)");
  }
  for (double v : kappa_grid) {
    if (!(v >= 0.0 && v < 1.0)) throw Error(ErrorCode::invalid_argument, "kappa grid values must lie in [0, 1)");
  }
}

std::vector<int> make_folds(Index n, int folds, std::uint64_t seed, bool shuffle) {
  if (folds < 2 || folds > n) {
    throw Error(ErrorCode::too_few_rows, "cannot split " + std::to_string(n) + " rows into " +
                                             std::to_string(folds) + " folds");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  if (shuffle) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n));
  const Index base = n / folds;
  const Index extra = n % folds;
  std::size_t pos = 0;
  for (int f = 0; f < folds; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    for (Index i = 0; i < size; ++i) assignment[static_cast<std::size_t>(order[pos++])] = f;
  }
  return assignment;
}

std::vector<GridPoint> enumerate_grid(Method method, const CvConfig& config) {
  std::vector<GridPoint> points;
  switch (method) {
    case Method::pls1:
    case Method::pls2:
      for (int h : config.h_grid) points.push_back({1, h, 0.0, 0.0});
      break;
    case Method::xypls:
      for (int g : config.g_grid) {
        for (int h : config.h_grid) points.push_back({g, h, 0.0, 0.0});
      }
      break;
    case Method::sparse_twoblock:
      for (int g : config.g_grid) {
        for (int h : config.h_grid) {
          for (double eta : config.eta_grid) {
            for (double kappa : config.kappa_grid) points.push_back({g, h, eta, kappa});
          }
        }
      }
      break;
  }
  return points;
}

bool prefer_on_tie(const GridPoint& a, const GridPoint& b) {
  if (a.h != b.h) return a.h < b.h;
  if (a.g != b.g) return a.g < b.g;
  if (a.eta != b.eta) return a.eta > b.eta;
  return a.kappa > b.kappa;
}

namespace {

DataMatrix take_rows(const DataMatrix& data, const std::vector<Index>& rows) {
  DataMatrix out{MatrixXd(static_cast<Index>(rows.size()), data.cols()), data.col_names};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Index>(i)) = data.values.row(rows[i]);
  }
  return out;
}

AnyModel fit_point(Method method, const DataMatrix& x, const DataMatrix& y, const GridPoint& pt,
                   Scaling scaling) {
  switch (method) {
    case Method::pls1:
    case Method::pls2:
      return fit_pls(x, y, pt.h, scaling);
    case Method::xypls:
      return fit_twoblock(x, y, {pt.g, pt.h, 0.0, 0.0}, scaling);
    case Method::sparse_twoblock:
      return fit_twoblock(x, y, {pt.g, pt.h, pt.kappa, pt.eta}, scaling);
  }
  throw Error(ErrorCode::invalid_argument, "unsupported method");
}

std::optional<std::string> infeasibility(Method method, const GridPoint& pt, Index train_rows,
                                         Index p, Index q) {
  const int h_max = component_bound(train_rows, p);
  if (pt.h > h_max) {
    return "h=" + std::to_string(pt.h) + " exceeds min(p, n_train-1)=" + std::to_string(h_max);
  }
  if (method == Method::xypls || method == Method::sparse_twoblock) {
    const int g_max = component_bound(train_rows, q);
    if (pt.g > g_max) {
      return "g=" + std::to_string(pt.g) + " exceeds min(q, n_train-1)=" + std::to_string(g_max);
    }
  }
  return std::nullopt;
}

struct FoldScore {
  std::vector<double> mse;    // raw, per response
  std::vector<double> score;  // raw or standardized, per response
  std::string error;
};

// Sample variance per column; floors at a tiny positive value so that a
// constant training response does not divide by zero.
VectorXd column_variance(const MatrixXd& m) {
  const VectorXd means = m.colwise().mean();
  VectorXd var(m.cols());
  for (Index c = 0; c < m.cols(); ++c) {
    const double ss = (m.col(c).array() - means(c)).square().sum();
    var(c) = std::max(ss / static_cast<double>(std::max<Index>(m.rows() - 1, 1)), 1e-300);
  }
  return var;
}

double aggregate_training_score(const AnyModel& model, const DataMatrix& x, const DataMatrix& y,
                                CvScore score) {
  const MatrixXd resid = predict(model, x).values - y.values;
  const VectorXd var = column_variance(y.values);
  double total = 0.0;
  for (Index k = 0; k < y.cols(); ++k) {
    double mse = resid.col(k).squaredNorm() / static_cast<double>(y.rows());
    if (score == CvScore::standardized_mean_mse) mse /= var(k);
    total += mse;
  }
  return total / static_cast<double>(y.cols());
}

}  // namespace

CvOutcome grid_search(const DataMatrix& x, const DataMatrix& y, Method method,
                      const CvConfig& config) {
  if (method == Method::pls1) {
    throw Error(ErrorCode::invalid_argument, "use grid_search_pls1 for per-response PLS1");
  }
  x.validate("X");
  y.validate("Y");
  if (x.rows() != y.rows()) throw Error(ErrorCode::dimension_mismatch, "X and Y row counts differ");
  const Index n = x.rows();
  config.validate(n);

  CvReport report;
  report.fold_assignment = make_folds(n, config.folds, config.seed, config.shuffle);
  report.response_names = y.col_names;
  const auto points = enumerate_grid(method, config);

  std::vector<std::vector<Index>> train_rows(static_cast<std::size_t>(config.folds));
  std::vector<std::vector<Index>> test_rows(static_cast<std::size_t>(config.folds));
  for (Index r = 0; r < n; ++r) {
    const auto f = static_cast<std::size_t>(report.fold_assignment[static_cast<std::size_t>(r)]);
    test_rows[f].push_back(r);
    for (std::size_t other = 0; other < train_rows.size(); ++other) {
      if (other != f) train_rows[other].push_back(r);
    }
  }
  Index smallest_train = n;
  for (const auto& rows : train_rows) smallest_train = std::min<Index>(smallest_train, static_cast<Index>(rows.size()));

  report.per_point.resize(points.size());
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < points.size(); ++i) {
    report.per_point[i].point = points[i];
    if (auto why = infeasibility(method, points[i], smallest_train, x.cols(), y.cols())) {
      report.per_point[i].feasible = false;
      report.per_point[i].reason = *why;
    } else {
      feasible.push_back(i);
    }
  }

  const auto folds = static_cast<std::size_t>(config.folds);
  const auto q = static_cast<std::size_t>(y.cols());
  std::vector<FoldScore> results(feasible.size() * folds);
  const auto tasks = static_cast<std::int64_t>(results.size());
  // Each task owns one slot of `results`; merging below walks slots in grid
  // order, so the report does not depend on scheduling.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t task = 0; task < tasks; ++task) {
    const auto slot = static_cast<std::size_t>(task);
    const GridPoint& pt = points[feasible[slot / folds]];
    const std::size_t f = slot % folds;
    FoldScore& out = results[slot];
    try {
      const DataMatrix x_train = take_rows(x, train_rows[f]);
      const DataMatrix y_train = take_rows(y, train_rows[f]);
      const DataMatrix x_test = take_rows(x, test_rows[f]);
      const DataMatrix y_test = take_rows(y, test_rows[f]);
      const AnyModel model = fit_point(method, x_train, y_train, pt, config.scaling);
      const MatrixXd resid = predict(model, x_test).values - y_test.values;
      const VectorXd var = column_variance(y_train.values);
      out.mse.resize(q);
      out.score.resize(q);
      for (std::size_t k = 0; k < q; ++k) {
        const auto kk = static_cast<Index>(k);
        out.mse[k] = resid.col(kk).squaredNorm() / static_cast<double>(resid.rows());
        out.score[k] = config.score == CvScore::standardized_mean_mse ? out.mse[k] / var(kk) : out.mse[k];
      }
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  }

  std::optional<std::size_t> best;
  for (std::size_t fi = 0; fi < feasible.size(); ++fi) {
    CvPointResult& res = report.per_point[feasible[fi]];
    res.per_response_mse.assign(q, 0.0);
    double score = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      const FoldScore& fs = results[fi * folds + f];
      if (!fs.error.empty()) {
        res.feasible = false;
        res.reason = "fold " + std::to_string(f + 1) + ": " + fs.error;
        break;
      }
      for (std::size_t k = 0; k < q; ++k) {
        res.per_response_mse[k] += fs.mse[k] / static_cast<double>(folds);
        score += fs.score[k];
      }
    }
    if (!res.feasible) {
      res.per_response_mse.clear();
      continue;
    }
    res.score = score / static_cast<double>(folds * q);
    if (!std::isfinite(res.score)) {
      res.feasible = false;
      res.reason = "non-finite score";
      continue;
    }
    if (!best) {
      best = feasible[fi];
    } else {
      const CvPointResult& cur = report.per_point[*best];
      if (res.score < cur.score || (res.score == cur.score && prefer_on_tie(res.point, cur.point))) {
        best = feasible[fi];
      }
    }
  }
  if (!best) {
    std::string why = points.empty() ? "empty grid" : report.per_point.front().reason;
    throw Error(ErrorCode::all_points_infeasible, "no grid point could be evaluated (first reason: " + why + ")");
  }
  report.best = report.per_point[*best].point;
  report.best_score = report.per_point[*best].score;

  CvOutcome outcome{std::move(report), fit_point(method, x, y, points[*best], config.scaling), 0.0};
  outcome.training_score = aggregate_training_score(outcome.model, x, y, config.score);
  return outcome;
}

Pls1CvOutcome grid_search_pls1(const DataMatrix& x, const DataMatrix& y, const CvConfig& config) {
  y.validate("Y");
  Pls1CvOutcome out;
  for (Index k = 0; k < y.cols(); ++k) {
    CvOutcome one = grid_search(x, response_column(y, k), Method::pls2, config);
    out.model.models.push_back(std::get<PlsModel>(std::move(one.model)));
    out.per_response.push_back(std::move(one.report));
  }
  return out;
}

std::string cv_report_csv(const CvReport& report, std::string_view label, bool with_header) {
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  const std::string target(label);
  std::string out;
  if (with_header) out += "target,point,g,h,eta,kappa,status,response,value,reason\n";
  for (std::size_t i = 0; i < report.per_point.size(); ++i) {
    const auto& r = report.per_point[i];
    const std::string prefix = target + "," + std::to_string(i + 1) + "," + std::to_string(r.point.g) +
                               "," + std::to_string(r.point.h) + "," + format_double(r.point.eta) +
                               "," + format_double(r.point.kappa) + ",";
    if (!r.feasible) {
      out += prefix + "infeasible,,," + clean(r.reason) + "\n";
      continue;
    }
    for (std::size_t k = 0; k < r.per_response_mse.size(); ++k) {
      out += prefix + "ok," + clean(report.response_names.at(k)) + "," +
             format_double(r.per_response_mse[k]) + ",\n";
    }
    out += prefix + "ok,score," + format_double(r.score) + ",\n";
  }
  for (std::size_t i = 0; i < report.per_point.size(); ++i) {
    const auto& r = report.per_point[i];
    if (r.feasible && r.point == report.best) {
      out += target + "," + std::to_string(i + 1) + "," + std::to_string(r.point.g) + "," +
             std::to_string(r.point.h) + "," + format_double(r.point.eta) + "," +
             format_double(r.point.kappa) + ",best,score," + format_double(report.best_score) + ",\n";
      break;
    }
  }
  return out;
}

}  // namespace stpls
