#include <benchmark/benchmark.h>

#include "crowdboost/combiners.hpp"
#include "crowdboost/evaluation.hpp"

namespace {

using namespace crowdboost;

// Roughly the size of one leave-one-out fold on the GJP untrained pool.
ForecastTable fold_sized_table()
{
    SyntheticSpec spec;
    spec.forecasters = 338;
    spec.questions = 87;
    spec.coverage = 0.15;
    spec.seed = 11;
    return generate_synthetic(spec);
}

void BM_RealBoostTrain(benchmark::State& state)
{
    const ForecastTable table = fold_sized_table();
    const auto rounds = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto model = realboost_train(table, rounds);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_RealBoostTrain)->Arg(70)->Unit(benchmark::kMillisecond);

void BM_AdaBoostTrain(benchmark::State& state)
{
    const ForecastTable table = fold_sized_table();
    const auto rounds = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto model = adaboost_train(table, rounds, 3);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_AdaBoostTrain)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_LooBagging(benchmark::State& state)
{
    SyntheticSpec spec;
    spec.forecasters = 338;
    spec.questions = 88;
    spec.coverage = 0.15;
    const ForecastTable table = generate_synthetic(spec);
    for (auto _ : state) {
        auto report = loo_evaluate(table, Method::Bagging, 1, 0, 1);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_LooBagging)->Unit(benchmark::kMillisecond);

}  // namespace
