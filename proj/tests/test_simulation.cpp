#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "stpls/simulation.hpp"
#include "test_util.hpp"

using namespace stpls;
using Eigen::Index;
using Eigen::MatrixXd;
using testutil::code_of;

namespace {

SimScenario small_scenario(std::uint64_t seed) {
  SimScenario s;
  s.n = 60;
  s.p1 = 12;
  s.p2 = 18;
  s.q1 = 3;
  s.q2 = 2;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("generate_dataset structure") {
  const auto s = small_scenario(5);
  const auto d = generate_dataset(s);
  CHECK(d.x.rows() == 60);
  CHECK(d.x.cols() == 30);
  CHECK(d.y.cols() == 5);
  CHECK(d.x.col_names.front() == "x1");
  CHECK(d.y.col_names.back() == "y5");
  const auto& t = d.truth;
  CHECK(t.loadings.bottomRows(18).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.coefficients.bottomRows(18).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.coefficients.rightCols(2).cwiseAbs().maxCoeff() == 0.0);
  const MatrixXd block = t.coefficients.topLeftCorner(12, 3);
  CHECK(block.minCoeff() >= 0.02);
  CHECK(block.maxCoeff() < 0.07);
  CHECK(t.loadings.topRows(12).minCoeff() >= -5.0);
  CHECK(t.loadings.topRows(12).maxCoeff() < 5.0);
  CHECK(std::count(t.informative_x.begin(), t.informative_x.end(), true) == 12);
  CHECK(std::count(t.informative_y.begin(), t.informative_y.end(), true) == 3);
}

TEST_CASE("generate_dataset noise matches the model") {
  auto s = small_scenario(6);
  s.n = 4000;
  s.noise_sd = 0.3;
  const auto d = generate_dataset(s);
  const MatrixXd g = d.x.values - d.truth.scores * d.truth.loadings.transpose();
  const MatrixXd h = d.y.values - d.x.values * d.truth.coefficients;
  const double g_sd = std::sqrt(g.squaredNorm() / static_cast<double>(g.size()));
  const double h_sd = std::sqrt(h.squaredNorm() / static_cast<double>(h.size()));
  // 120000 and 20000 draws: a 3% band is many standard errors wide.
  CHECK(std::abs(g_sd - 0.3) < 0.3 * 0.03);
  CHECK(std::abs(h_sd - 0.3) < 0.3 * 0.03);
  const MatrixXd tt = d.truth.scores.transpose() * d.truth.scores / static_cast<double>(s.n);
  CHECK((tt - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("generate_dataset is deterministic per seed") {
  const auto a = generate_dataset(small_scenario(7));
  const auto b = generate_dataset(small_scenario(7));
  const auto c = generate_dataset(small_scenario(8));
  CHECK(oracle::bitwise_equal(a.x.values, b.x.values));
  CHECK(oracle::bitwise_equal(a.y.values, b.y.values));
  CHECK_FALSE(oracle::bitwise_equal(a.x.values, c.x.values));
}

TEST_CASE("SimScenario validation") {
  auto s = small_scenario(1);
  s.noise_sd = 0.0;
  CHECK(code_of([&] { generate_dataset(s); }) == ErrorCode::invalid_argument);
  s = small_scenario(1);
  s.p1 = 0;
  CHECK(code_of([&] { generate_dataset(s); }) == ErrorCode::invalid_argument);
  s = small_scenario(1);
  s.coef_range = {0.5, 0.1};
  CHECK(code_of([&] { generate_dataset(s); }) == ErrorCode::invalid_argument);
  s = small_scenario(1);
  s.p2 = -1;
  CHECK(code_of([&] { generate_dataset(s); }) == ErrorCode::invalid_argument);
}

TEST_CASE("compute_metrics hand examples") {
  SimTruth t;
  t.coefficients = MatrixXd::Zero(4, 2);
  t.coefficients(0, 0) = 1.0;
  t.coefficients(1, 0) = 2.0;
  t.informative_x = {true, true, false, false};
  t.informative_y = {true, false};
  MatrixXd b = t.coefficients;
  b(0, 0) = 1.5;
  b(2, 1) = 9.0;  // outside the informative-response columns: ignored by MSEB
  const auto r = compute_metrics(b, {true, false, true, true}, {true, true}, t);
  CHECK(r.mseb == doctest::Approx(0.25 / 4.0));
  CHECK(r.fpx == 100.0);
  CHECK(r.fnx == 50.0);
  CHECK(r.fpy == 100.0);
  CHECK(r.fny == 0.0);
  const auto exact = compute_metrics(t.coefficients, t.informative_x, t.informative_y, t);
  CHECK(exact.mseb == 0.0);
  CHECK(exact.fpx == 0.0);
  CHECK(exact.fnx == 0.0);
  CHECK(code_of([&] { compute_metrics(MatrixXd::Zero(3, 2), {true}, {true}, t); }) ==
        ErrorCode::dimension_mismatch);
}

TEST_CASE("compute_metrics from fitted models") {
  const auto d = generate_dataset(small_scenario(9));
  const auto pls = fit_pls(d.x, d.y, 3, Scaling::autoscale);
  const auto rp = compute_metrics(pls, d.truth);
  // Dense PLS selects every predictor and response.
  CHECK(rp.fpx == 100.0);
  CHECK(rp.fnx == 0.0);
  CHECK(rp.fpy == 100.0);
  const auto tb = fit_twoblock(d.x, d.y, {1, 3, 0.5, 0.5}, Scaling::autoscale);
  const auto rt = compute_metrics(tb, d.truth);
  const auto manual = compute_metrics(tb.coefficients_original_scale(), nonzero_rows(tb.W), nonzero_rows(tb.V), d.truth);
  CHECK(rt.mseb == manual.mseb);
  CHECK(rt.fpx == manual.fpx);
  CHECK(rt.fny == manual.fny);
}

TEST_CASE("derive_seed") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(derive_seed(2024, a, b));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("run_batch") {
  std::vector<SimScenario> scenarios{small_scenario(0), small_scenario(0)};
  scenarios[1].p1 = 15;
  const std::vector<EstimatorSpec> est{{"sparse", Method::sparse_twoblock, {1, 2, 0.5, 0.5}, Scaling::autoscale},
                                       {"pls2", Method::pls2, {1, 2, 0.0, 0.0}, Scaling::autoscale}};
  const auto res = run_batch(scenarios, est, 6, 11);
  REQUIRE(res.size() == 4);
  CHECK(res[0].estimator == "sparse");
  CHECK(res[1].estimator == "pls2");
  CHECK(res[2].scenario_index == 1);
  for (const auto& r : res) {
    CHECK(r.runs == 6);
    CHECK(r.failures == 0);
  }

  SUBCASE("means and standard errors over the documented per-run seeds") {
    std::vector<double> fnx;
    for (int run = 0; run < 6; ++run) {
      auto s = scenarios[1];
      s.seed = derive_seed(11, 1, static_cast<std::uint64_t>(run));
      const auto d = generate_dataset(s);
      fnx.push_back(compute_metrics(fit_twoblock(d.x, d.y, {1, 2, 0.5, 0.5}, Scaling::autoscale), d.truth).fnx);
    }
    double mean = 0.0;
    for (double v : fnx) mean += v / 6.0;
    double ss = 0.0;
    for (double v : fnx) ss += (v - mean) * (v - mean);
    CHECK(res[2].fnx.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(res[2].fnx.se == doctest::Approx(std::sqrt(ss / 5.0 / 6.0)).epsilon(1e-12));
  }
  SUBCASE("reproducible output") {
    CHECK(batch_metrics_csv(res) == batch_metrics_csv(run_batch(scenarios, est, 6, 11)));
    const auto plot = plot_data_csv(res, "mseb");
    CHECK(plot.substr(0, plot.find('\n')) == "scenario,p1,estimator,mean,se");
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 5);
    CHECK(code_of([&] { plot_data_csv(res, "auc"); }) == ErrorCode::invalid_argument);
  }
  SUBCASE("errors") {
    CHECK(code_of([&] { run_batch(scenarios, est, 0, 1); }) == ErrorCode::invalid_argument);
    CHECK(code_of([&] { run_batch(scenarios, {}, 1, 1); }) == ErrorCode::invalid_argument);
  }
}

TEST_CASE("run_batch records fit failures per run") {
  auto s = small_scenario(0);
  s.n = 5;
  const std::vector<EstimatorSpec> est{{"too-many", Method::sparse_twoblock, {1, 8, 0.0, 0.0}, Scaling::autoscale}};
  const auto res = run_batch({s}, est, 3, 1);
  REQUIRE(res.size() == 1);
  CHECK(res[0].runs == 0);
  CHECK(res[0].failures == 3);
  CHECK(res[0].first_error.find("ComponentCountTooLarge") == 0);
}
