// Serial reference against the OpenMP sampler on the same pools.
#include <benchmark/benchmark.h>

#include "lexfun/exfun.hpp"
#include "lexfun/g_functions.hpp"
#include "lexfun/measures.hpp"

using namespace lexfun;

namespace {

LevyTriplet2D brownian_pair() { return LevyTriplet2D(1.0, 1.0, {2.0, 0.0, 0.0}, LevyMeasure2D()); }

LevyTriplet2D jump_pair() {
  return LevyTriplet2D(1.0, 1.0, {},
                       LevyMeasure2D(ProductIndependent{measures::exponential_jumps(1.0, 2.0),
                                                        measures::exponential_jumps(2.0, 1.0)}));
}

template <Execution E>
void exponential_brownian(benchmark::State& state) {
  HorizonPolicy pol;
  pol.max_step = 0.005;
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_exponential_functional(brownian_pair(), n, pol, 1, E));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Execution E>
void exponential_jumps(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_exponential_functional(jump_pair(), n, {}, 1, E));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Execution E>
void g_stable_indicator(benchmark::State& state) {
  const LevyMeasure1D m = measures::stable_tail(0.5);
  const LevyTriplet1D xi(m.integrate([](double x) { return x; }, Region::abs_at_most(1.0)), 0.0, m);
  HorizonPolicy pol;
  pol.epsilon = 1e-4;
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_g_functional(xi, gfun::indicator(0.0, 1.0), YProcessSpec::identity(), n, pol, 1, E));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Execution E>
void g_brownian_gaussian(benchmark::State& state) {
  const LevyTriplet1D xi(2.0, 1.0, LevyMeasure1D());
  HorizonPolicy pol;
  pol.max_step = 0.005;
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_g_functional(xi, gfun::gaussian(0.5), YProcessSpec::identity(), n, pol, 1, E));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(exponential_brownian<Execution::Serial>)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(exponential_brownian<Execution::Parallel>)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(exponential_jumps<Execution::Serial>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(exponential_jumps<Execution::Parallel>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(g_stable_indicator<Execution::Serial>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(g_stable_indicator<Execution::Parallel>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(g_brownian_gaussian<Execution::Serial>)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(g_brownian_gaussian<Execution::Parallel>)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
