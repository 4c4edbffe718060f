#include <doctest.h>

#include "oracles.hpp"
#include "stpls/pls.hpp"
#include "test_util.hpp"

using namespace stpls;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using testutil::code_of;
using testutil::named;

namespace {

// PLS1 coefficients as the least-squares solution restricted to the Krylov
// space span{s, Ss, ..., S^{h-1}s} with S = XᵀX and s = Xᵀy.
MatrixXd krylov_pls1(const MatrixXd& x_raw, const MatrixXd& y_raw, int h) {
  const MatrixXd x = oracle::center(x_raw), y = oracle::center(y_raw);
  const MatrixXd s = oracle::matmul(oracle::transpose(x), x);
  MatrixXd k(x.cols(), h);
  VectorXd v = oracle::col(oracle::matmul(oracle::transpose(x), y), 0);
  for (int j = 0; j < h; ++j) {
    k.col(j) = v / oracle::norm(v);
    v = oracle::col(oracle::matmul(s, k.col(j)), 0);
  }
  const MatrixXd kt = oracle::transpose(k);
  return oracle::matmul(k, oracle::solve(oracle::matmul(oracle::matmul(kt, s), k),
                                         oracle::matmul(kt, oracle::matmul(oracle::transpose(x), y))));
}

// PLS2 coefficients from eigenvector weights with X-only deflation.
MatrixXd eigen_pls2(const MatrixXd& x_raw, const MatrixXd& y_raw, int h) {
  const MatrixXd x = oracle::center(x_raw), y = oracle::center(y_raw);
  MatrixXd w, p, t;
  oracle::detail::reduce(x, y, h, w, p, t);
  MatrixXd c(y.cols(), h);
  for (int a = 0; a < h; ++a)
    c.col(a) = oracle::col(oracle::matmul(oracle::transpose(y), t.col(a)), 0) / oracle::dot(t.col(a), t.col(a));
  return oracle::matmul(oracle::matmul(w, oracle::solve(oracle::matmul(oracle::transpose(p), w),
                                                        MatrixXd::Identity(h, h))),
                        oracle::transpose(c));
}

double relative_diff(const MatrixXd& a, const MatrixXd& b) {
  return oracle::max_abs_diff(a, b) / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("PLS1 matches the Krylov least-squares characterisation") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    CAPTURE(trial);
    const Index n = 15 + trial, p = 4 + trial % 6;
    const MatrixXd x = oracle::gaussian(n, p, rng);
    const MatrixXd y = x * oracle::gaussian(p, 1, rng) + oracle::gaussian(n, 1, rng);
    const int h = 1 + trial % 3;
    const auto m = fit_pls(named(x, "x"), named(y, "y"), h);
    CHECK(m.n_components() == h);
    CHECK(relative_diff(m.coefficients, krylov_pls1(x, y, h)) < 1e-8);
  }
}

TEST_CASE("PLS2 matches the eigenvector reference") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 15; ++trial) {
    CAPTURE(trial);
    const Index n = 20 + trial, p = 5 + trial % 5, q = 2 + trial % 3;
    const MatrixXd x = oracle::gaussian(n, p, rng);
    const MatrixXd y = x.leftCols(3) * oracle::gaussian(3, q, rng) + 0.5 * oracle::gaussian(n, q, rng);
    const int h = 1 + trial % 4;
    const auto m = fit_pls(named(x, "x"), named(y, "y"), h);
    CHECK(relative_diff(m.coefficients, eigen_pls2(x, y, h)) < 1e-7);
  }
}

TEST_CASE("PLS with full rank equals ordinary least squares") {
  std::mt19937_64 rng(33);
  const MatrixXd x = oracle::gaussian(30, 5, rng), y = oracle::gaussian(30, 2, rng);
  const auto m = fit_pls(named(x, "x"), named(y, "y"), 5);
  const MatrixXd xc = oracle::center(x), yc = oracle::center(y);
  const MatrixXd ols = oracle::solve(oracle::matmul(oracle::transpose(xc), xc), oracle::matmul(oracle::transpose(xc), yc));
  CHECK(relative_diff(m.coefficients, ols) < 1e-8);
}

TEST_CASE("PLS scores are orthogonal and weights unit length") {
  std::mt19937_64 rng(34);
  const MatrixXd x = oracle::gaussian(40, 12, rng), y = x.leftCols(4) * oracle::gaussian(4, 3, rng);
  const auto m = fit_pls(named(x, "x"), named(y, "y"), 4, Scaling::autoscale);
  CHECK(oracle::max_relative_cross(m.scores) < 1e-10);
  for (Index a = 0; a < m.weights.cols(); ++a) CHECK(std::abs(m.weights.col(a).norm() - 1.0) < 1e-12);
}

TEST_CASE("predict_pls") {
  std::mt19937_64 rng(35);
  const MatrixXd x = oracle::gaussian(25, 6, rng), y = x * oracle::gaussian(6, 2, rng) + oracle::gaussian(25, 2, rng);
  for (Scaling s : {Scaling::center, Scaling::autoscale}) {
    const auto m = fit_pls(named(x, "x"), named(y, "y"), 3, s);
    const auto p = predict_pls(m, named(x, "x"));
    const MatrixXd manual =
        ((x.rowwise() - m.x_center.means.transpose()) * m.coefficients_original_scale()).rowwise() +
        m.y_center.means.transpose();
    CHECK(oracle::max_abs_diff(p.values, manual) < 1e-10);
    CHECK(p.col_names == std::vector<std::string>{"y1", "y2"});
    const DataMatrix one{x.topRows(1), m.x_names};
    CHECK(predict_pls(m, one).rows() == 1);
  }
}

TEST_CASE("PLS1 set fits each response independently") {
  std::mt19937_64 rng(36);
  const MatrixXd x = oracle::gaussian(20, 5, rng), y = x * oracle::gaussian(5, 3, rng) + oracle::gaussian(20, 3, rng);
  const std::vector<int> h{1, 3, 2};
  const auto set = fit_pls1_set(named(x, "x"), named(y, "y"), h);
  REQUIRE(set.models.size() == 3);
  const auto pred = predict_pls1_set(set, named(x, "x"));
  for (Index k = 0; k < 3; ++k) {
    const auto single = fit_pls(named(x, "x"), response_column(named(y, "y"), k), h[static_cast<std::size_t>(k)]);
    CHECK(oracle::bitwise_equal(set.models[static_cast<std::size_t>(k)].coefficients, single.coefficients));
    CHECK(oracle::bitwise_equal(pred.values.col(k), predict_pls(single, named(x, "x")).values));
  }
  CHECK(pred.col_names == std::vector<std::string>{"y1", "y2", "y3"});
  CHECK(code_of([&] { fit_pls1_set(named(x, "x"), named(y, "y"), {1, 2}); }) == ErrorCode::dimension_mismatch);
  CHECK(code_of([&] { predict_pls1_set(Pls1Set{}, named(x, "x")); }) == ErrorCode::invalid_argument);
}

TEST_CASE("PLS truncates on an exhausted response") {
  std::mt19937_64 rng(37);
  const VectorXd t = oracle::center(oracle::gaussian(12, 1, rng)).col(0);
  const MatrixXd x = t * oracle::gaussian(1, 4, rng) + 0.01 * oracle::gaussian(12, 4, rng);
  const MatrixXd y_const = MatrixXd::Constant(12, 1, 3.0);
  const auto m = fit_pls(named(x, "x"), named(y_const, "y"), 2);
  CHECK(m.truncated());
  CHECK(m.n_components() == 0);
  CHECK(m.coefficients.cwiseAbs().maxCoeff() == 0.0);
  CHECK(predict_pls(m, named(x, "x")).values.cwiseAbs().minCoeff() == 3.0);
}

TEST_CASE("PLS errors") {
  std::mt19937_64 rng(38);
  const MatrixXd x = oracle::gaussian(6, 3, rng), y = oracle::gaussian(6, 2, rng);
  CHECK(code_of([&] { fit_pls(named(x, "x"), named(y, "y"), 0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { fit_pls(named(x, "x"), named(y, "y"), 4); }) == ErrorCode::component_count_too_large);
  CHECK(code_of([&] { fit_pls(named(x, "x"), named(y.topRows(4), "y"), 1); }) == ErrorCode::dimension_mismatch);
  MatrixXd bad = x;
  bad(2, 1) = std::nan("");
  CHECK(code_of([&] { fit_pls(named(bad, "x"), named(y, "y"), 1); }) == ErrorCode::non_finite_input);
  const auto m = fit_pls(named(x, "x"), named(y, "y"), 1);
  CHECK(code_of([&] { predict_pls(m, named(x.leftCols(2), "x")); }) == ErrorCode::column_mismatch);
}

TEST_CASE("PLS is bitwise deterministic") {
  std::mt19937_64 rng(39);
  const MatrixXd x = oracle::gaussian(50, 40, rng), y = x.leftCols(3) * oracle::gaussian(3, 4, rng);
  const auto a = fit_pls(named(x, "x"), named(y, "y"), 3, Scaling::autoscale);
  const auto b = fit_pls(named(x, "x"), named(y, "y"), 3, Scaling::autoscale);
  CHECK(oracle::bitwise_equal(a.coefficients, b.coefficients));
  CHECK(oracle::bitwise_equal(a.scores, b.scores));
}
