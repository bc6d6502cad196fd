#include <benchmark/benchmark.h>

#include <random>

#include "ampo/engine.hpp"
#include "ampo/function_approx.hpp"
#include "ampo/mdp.hpp"

namespace {

void BM_ExactEvaluate(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  const ampo::TabularMdp mdp = ampo::random_mdp(S, 4, 0.95, 7);
  const ampo::PolicyTable pi = ampo::uniform_policy(mdp);
  for (auto _ : state) benchmark::DoNotOptimize(ampo::exact_evaluate(mdp, pi));
  state.SetComplexityN(S);
}

void BM_VisitationDistribution(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  const ampo::TabularMdp mdp = ampo::random_mdp(S, 4, 0.95, 8);
  const ampo::PolicyTable pi = ampo::uniform_policy(mdp);
  for (auto _ : state) benchmark::DoNotOptimize(ampo::visitation_distribution(mdp, pi));
  state.SetComplexityN(S);
}

void BM_MirrorDescentIteration(benchmark::State& state) {
  const ampo::TabularMdp mdp = ampo::random_mdp(static_cast<int>(state.range(0)), 4, 0.95, 9);
  ampo::AmpoConfig cfg;
  cfg.iterations = 1;
  for (auto _ : state) benchmark::DoNotOptimize(ampo::run_ampo(cfg, mdp));
}

void BM_NetForward(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ampo::ShallowReluNet net = ampo::make_shallow_relu(m, 8, 1.0, 11);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(8);
  for (int k = 0; k < 8; ++k) x[k] = normal(rng);
  x /= x.norm();
  for (auto _ : state) benchmark::DoNotOptimize(ampo::net_value(net, x));
}

}  // namespace

BENCHMARK(BM_ExactEvaluate)->RangeMultiplier(2)->Range(8, 128)->Complexity();
BENCHMARK(BM_VisitationDistribution)->RangeMultiplier(2)->Range(8, 128)->Complexity();
BENCHMARK(BM_MirrorDescentIteration)->Arg(8)->Arg(32);
BENCHMARK(BM_NetForward)->RangeMultiplier(4)->Range(32, 512);

BENCHMARK_MAIN();
