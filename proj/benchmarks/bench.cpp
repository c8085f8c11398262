#include <benchmark/benchmark.h>

#include <cmath>

#include "tailnorm/numerics.hpp"

using namespace tailnorm;

static void BM_integrate_exponential(benchmark::State& state) {
    for (auto _ : state) {
        auto r = integrate_halfline([](double x) { return std::exp(-x); });
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_integrate_exponential);

static void BM_log_integrate_peaked(benchmark::State& state) {
    const double p = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto r = log_integrate_halfline(
            [=](double x) { return x > 0 ? (p - 1.0) * std::log(x) - x : -inf; }, {}, p);
        benchmark::DoNotOptimize(r.log_value);
    }
}
BENCHMARK(BM_log_integrate_peaked)->Arg(10)->Arg(100)->Arg(1000);

static void BM_maximize_concave(benchmark::State& state) {
    for (auto _ : state) {
        auto r = maximize_concave(
            [](double l) { return l * 2.0 - std::log(3.0 / (3.0 - l)); }, 0.0, 3.0 - 1e-12);
        benchmark::DoNotOptimize(r.arg);
    }
}
BENCHMARK(BM_maximize_concave);

BENCHMARK_MAIN();
