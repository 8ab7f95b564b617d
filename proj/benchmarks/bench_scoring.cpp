#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "crowdboost/links_losses.hpp"
#include "crowdboost/scoring.hpp"

namespace {

using namespace crowdboost;

void BM_Decompose(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> forecasts(n);
    std::vector<Outcome> outcomes(n);
    for (std::size_t i = 0; i < n; ++i) {
        forecasts[i] = u(rng);
        outcomes[i] = u(rng) < forecasts[i] ? Outcome::Positive : Outcome::Negative;
    }
    const ScoringRule rule = scoring_rule_for(make_link(LinkName::Exponential));
    for (auto _ : state) {
        auto report = decompose(forecasts, outcomes, rule, 10);
        benchmark::DoNotOptimize(report);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Decompose)->Arg(1000)->Arg(100000);

}  // namespace
