#include <benchmark/benchmark.h>

#include <cmath>

#include "torusflow/dynamics.hpp"

using namespace torusflow;

static void BM_RecurrenceScan(benchmark::State& state) {
    auto torus = CountableTorus::from_list({1.0, 1.0, 1.0});
    auto spec = FrequencySpec::list({Frequency::exact(1, 1),
                                     Frequency::real(std::sqrt(2.0), "sqrt2"),
                                     Frequency::real(std::sqrt(3.0), "sqrt3")});
    auto s = CountableState::make(torus, spec);
    double horizon = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(recurrence_search(s, 0.05 * std::sqrt(3.0), 10.0, horizon));
    }
}
BENCHMARK(BM_RecurrenceScan)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_WeylDiscrepancy(benchmark::State& state) {
    auto samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(weyl_discrepancy({1.0, std::sqrt(2.0)}, samples, 16));
    }
}
BENCHMARK(BM_WeylDiscrepancy)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_SigmaScanUniform(benchmark::State& state) {
    Measure uni(DensityMeasure::uniform(0.0, 1.0, 1.0));
    int depth = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sigma_condition_scan(uni, depth, 0.5, 1e3, 1e4, 512));
    }
}
BENCHMARK(BM_SigmaScanUniform)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_IntegerRelationSearch(benchmark::State& state) {
    std::vector<Frequency> fs{Frequency::real(std::log(2.0)), Frequency::real(std::log(3.0)),
                              Frequency::real(std::log(5.0)),  Frequency::real(std::log(30.0))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(rational_relation_report(fs, 1'000'000));
    }
}
BENCHMARK(BM_IntegerRelationSearch)->Unit(benchmark::kMillisecond);
