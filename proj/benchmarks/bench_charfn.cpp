#include <benchmark/benchmark.h>

#include <cmath>

#include "torusflow/charfn.hpp"
#include "torusflow/measure.hpp"

using namespace torusflow;

static void BM_BernoulliProduct(benchmark::State& state) {
    double t = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bernoulli_product(1.0 / 3.0, t, 1e-10));
    }
}
BENCHMARK(BM_BernoulliProduct)->Arg(10)->Arg(1000)->Arg(100000);

static void BM_CharfnUniformClosedForm(benchmark::State& state) {
    Measure uni(DensityMeasure::uniform(0.0, 1.0, 1.0));
    double t = 0.0;
    for (auto _ : state) {
        t += 0.37;
        benchmark::DoNotOptimize(charfn(uni, t, Convention::Angular));
    }
}
BENCHMARK(BM_CharfnUniformClosedForm);

static void BM_CharfnPiecewiseLinear(benchmark::State& state) {
    // tabulated restriction of the Cantor-type convolution: the hot path of
    // the sigma scan
    Measure tab = restrict(Measure(BernoulliMeasure{1.0 / 3.0}),
                           BorelSet::interval(-0.25, 0.0));
    double t = 100.0;
    for (auto _ : state) {
        t += 1.7;
        benchmark::DoNotOptimize(charfn(tab, t, Convention::Angular));
    }
}
BENCHMARK(BM_CharfnPiecewiseLinear);

static void BM_CharfnWeightedQuadrature(benchmark::State& state) {
    Measure weighted = amplitude_weight(Measure(DensityMeasure::uniform(0.0, 1.0, 1.0)),
                                        AmplitudeProfile::identity());
    double t = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(charfn(weighted, t, Convention::Angular));
    }
}
BENCHMARK(BM_CharfnWeightedQuadrature)->Arg(10)->Arg(1000);

static void BM_BernoulliCellMasses(benchmark::State& state) {
    auto cells = static_cast<std::size_t>(state.range(0));
    std::vector<double> bounds(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        bounds[i] = -0.5 + static_cast<double>(i) / static_cast<double>(cells);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(bernoulli_cdf(1.0 / 3.0, bounds));
    }
}
BENCHMARK(BM_BernoulliCellMasses)->Arg(64)->Arg(1024);
