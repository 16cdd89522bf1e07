#include <benchmark/benchmark.h>

#include <random>

#include "ipiano/problems/compression.hpp"
#include "ipiano/problems/mrf.hpp"
#include "ipiano/problems/toy.hpp"
#include "ipiano/prox.hpp"
#include "ipiano/solver.hpp"
#include "ipiano/sparse.hpp"

namespace {

ipiano::Vector random_vector(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ipiano::Vector v(n);
  for (double& e : v) e = dist(rng);
  return v;
}

void BM_ProxL1(benchmark::State& state) {
  const ipiano::Vector y = random_vector(static_cast<std::size_t>(state.range(0)), -5, 5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ipiano::prox_l1(y, 0.7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxL1)->Arg(1 << 12)->Arg(1 << 16);

void BM_MrfGradient(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const ipiano::Image clean = ipiano::synthetic_image({side, side});
  const ipiano::Image noisy = ipiano::add_noise(clean, ipiano::GaussianNoise{25.0}, 1);
  const ipiano::MRFModel model = ipiano::make_dct_mrf_model(noisy, ipiano::MrfData::kL2, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(ipiano::mrf_f_grad(noisy.pixels, model));
}
BENCHMARK(BM_MrfGradient)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SparseSolve(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const ipiano::SparseMatrix lap = ipiano::assemble_laplacian(side, side);
  const ipiano::Vector c = random_vector(side * side, 0.05, 1.0, 2);
  const ipiano::SparseMatrix a = ipiano::assemble_system(c, lap);
  const ipiano::Vector b = random_vector(side * side, -1, 1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ipiano::solve(a, b));
}
BENCHMARK(BM_SparseSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_CompressionGradient(benchmark::State& state) {
  const ipiano::Image img = ipiano::synthetic_image({32, 32});
  const ipiano::CompressionModel model = ipiano::make_compression_model(img, 1500.0);
  const ipiano::Vector c = random_vector(img.pixels.size(), 0.1, 1.0, 4);
  for (auto _ : state) benchmark::DoNotOptimize(ipiano::compression_f_grad(c, model));
}
BENCHMARK(BM_CompressionGradient)->Unit(benchmark::kMicrosecond);

void BM_ToyStep(benchmark::State& state) {
  const ipiano::ToyProblem prob;
  const ipiano::Objective obj = ipiano::toy_objective(prob);
  ipiano::SolverState s = ipiano::initial_state(obj, ipiano::Vector{-2.0, 3.0});
  const ipiano::ConstantRule rule{0.75, prob.lipschitz()};
  for (auto _ : state) {
    s = ipiano::backtrack_step(obj, s, rule, prob.lipschitz()).next;
  }
}
BENCHMARK(BM_ToyStep);

void BM_LazyStepMrf(benchmark::State& state) {
  const ipiano::Image clean = ipiano::synthetic_image({64, 64});
  const ipiano::Image noisy = ipiano::add_noise(clean, ipiano::GaussianNoise{25.0}, 1);
  const ipiano::MRFModel model = ipiano::make_dct_mrf_model(noisy, ipiano::MrfData::kL2, 0.05);
  const ipiano::Objective obj = ipiano::mrf_objective(model);
  const ipiano::LazyBacktrackingRule rule{0.8};
  ipiano::SolverState s = ipiano::initial_state(obj, noisy.pixels);
  double lipschitz = 1.0;
  for (auto _ : state) {
    ipiano::BacktrackResult r = ipiano::backtrack_step(obj, s, rule, lipschitz);
    lipschitz = r.next_lipschitz_guess;
    s = std::move(r.next);
  }
}
BENCHMARK(BM_LazyStepMrf)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
