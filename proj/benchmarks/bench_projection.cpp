#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <random>
#include <vector>

#include "ampo/omega_potential.hpp"
#include "ampo/projection.hpp"

namespace {

std::vector<Eigen::VectorXd> score_pool(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<Eigen::VectorXd> pool;
  for (int i = 0; i < 16; ++i) {
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v[k] = normal(rng);
    pool.push_back(std::move(v));
  }
  return pool;
}

void BM_ProjectSoftmax(benchmark::State& state) {
  const auto pool = score_pool(static_cast<int>(state.range(0)), 1);
  const ampo::OmegaPotential pot = ampo::OmegaPotential::negative_entropy();
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(ampo::project(pool[i++ % pool.size()], pot, 1e-8));
  state.SetComplexityN(state.range(0));
}

void BM_ProjectEuclidean(benchmark::State& state) {
  const auto pool = score_pool(static_cast<int>(state.range(0)), 2);
  const ampo::OmegaPotential pot = ampo::OmegaPotential::squared_l2();
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(ampo::project(pool[i++ % pool.size()], pot, 1e-8));
  state.SetComplexityN(state.range(0));
}

void BM_ProjectBisectionHyperbolic(benchmark::State& state) {
  const auto pool = score_pool(static_cast<int>(state.range(0)), 3);
  const ampo::OmegaPotential pot = ampo::OmegaPotential::hyperbolic(1.0);
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(ampo::project_bisection(pool[i++ % pool.size()], pot, 1e-8));
  state.SetComplexityN(state.range(0));
}

void BM_ProjectBisectionEntropy(benchmark::State& state) {
  const auto pool = score_pool(static_cast<int>(state.range(0)), 4);
  const ampo::OmegaPotential pot = ampo::OmegaPotential::negative_entropy();
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(ampo::project_bisection(pool[i++ % pool.size()], pot, 1e-8));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_ProjectSoftmax)->RangeMultiplier(4)->Range(8, 4096)->Complexity();
BENCHMARK(BM_ProjectEuclidean)->RangeMultiplier(4)->Range(8, 4096)->Complexity();
BENCHMARK(BM_ProjectBisectionHyperbolic)->RangeMultiplier(4)->Range(8, 4096)->Complexity();
BENCHMARK(BM_ProjectBisectionEntropy)->RangeMultiplier(4)->Range(8, 4096)->Complexity();
