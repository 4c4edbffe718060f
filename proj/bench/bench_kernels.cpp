#include <benchmark/benchmark.h>

#include "stpls/kernels.hpp"
#include "stpls/simulation.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd random_block(Eigen::Index rows, Eigen::Index cols) {
  std::srand(7);
  return MatrixXd::Random(rows, cols);
}

template <MatrixXd (*Fn)(const stpls::kernels::ConstMatrixRef&, const stpls::kernels::ConstMatrixRef&)>
void BM_crossprod(benchmark::State& state) {
  const MatrixXd a = random_block(state.range(0), state.range(1));
  const MatrixXd b = random_block(state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
}
BENCHMARK(BM_crossprod<stpls::kernels::serial::crossprod>)->Args({100, 300})->Args({500, 2000});
BENCHMARK(BM_crossprod<stpls::kernels::parallel::crossprod>)->Args({100, 300})->Args({500, 2000});

template <void (*Fn)(MatrixXd&, const stpls::kernels::ConstVectorRef&,
                     const stpls::kernels::ConstVectorRef&)>
void BM_downdate(benchmark::State& state) {
  MatrixXd block = random_block(state.range(0), state.range(1));
  const VectorXd t = VectorXd::Constant(state.range(0), 1e-9);
  const VectorXd p = VectorXd::Constant(state.range(1), 1e-9);
  for (auto _ : state) {
    Fn(block, t, p);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_downdate<stpls::kernels::serial::rank_one_downdate>)->Args({100, 300})->Args({500, 2000});
BENCHMARK(BM_downdate<stpls::kernels::parallel::rank_one_downdate>)->Args({100, 300})->Args({500, 2000});

void BM_fit_twoblock(benchmark::State& state) {
  stpls::SimScenario s;
  s.p1 = state.range(0);
  s.seed = 11;
  const auto data = stpls::generate_dataset(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stpls::fit_twoblock(data.x, data.y, {1, 3, 0.5, 0.5}, stpls::Scaling::autoscale));
  }
}
BENCHMARK(BM_fit_twoblock)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
