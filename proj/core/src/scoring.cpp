#include "crowdboost/scoring.hpp"

#include <algorithm>
#include <stdexcept>

namespace crowdboost {

namespace {

void check_inputs(std::span<const double> forecasts, std::span<const Outcome> outcomes)
{
    if (forecasts.empty())
        throw std::invalid_argument("no forecasts to score");
    if (forecasts.size() != outcomes.size())
        throw std::invalid_argument("forecast and outcome counts differ");
    for (double f : forecasts)
        Probability{f};
}

}  // namespace

double empirical_score(std::span<const double> forecasts, std::span<const Outcome> outcomes,
                       const ScoringRule& rule)
{
    check_inputs(forecasts, outcomes);
    double sum = 0.0;
    for (std::size_t i = 0; i < forecasts.size(); ++i)
        sum += rule.score(sign(outcomes[i]), rule.clamp_forecast(forecasts[i]));
    return sum / static_cast<double>(forecasts.size());
}

ScoreReport decompose(std::span<const double> forecasts, std::span<const Outcome> outcomes,
                      const ScoringRule& rule, std::size_t bins)
{
    check_inputs(forecasts, outcomes);
    if (bins < 1)
        throw std::invalid_argument("bin count must be at least 1");

    std::vector<std::size_t> count(bins, 0);
    std::vector<std::size_t> positives(bins, 0);
    std::vector<double> forecast_sum(bins, 0.0);
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const double f = forecasts[i];
        const auto b = std::min(static_cast<std::size_t>(f * static_cast<double>(bins)), bins - 1);
        ++count[b];
        if (outcomes[i] == Outcome::Positive) ++positives[b];
        forecast_sum[b] += rule.clamp_forecast(f);
    }

    ScoreReport report;
    report.bins = bins;
    report.per_bin.reserve(bins);
    const double n = static_cast<double>(forecasts.size());
    for (std::size_t b = 0; b < bins; ++b) {
        BinSummary summary;
        summary.center = (static_cast<double>(b) + 0.5) / static_cast<double>(bins);
        summary.count = count[b];
        if (count[b] > 0) {
            const double nb = static_cast<double>(count[b]);
            summary.frequency = static_cast<double>(positives[b]) / nb;
            summary.mean_forecast = forecast_sum[b] / nb;

            const double weight = nb / n;
            const double binned_score = rule.expected(summary.frequency, summary.mean_forecast);
            const double j = rule.J(summary.frequency);
            report.total += weight * binned_score;
            report.calibration += weight * (binned_score - j);
            report.refinement += weight * j;
        }
        report.per_bin.push_back(summary);
    }
    return report;
}

}  // namespace crowdboost
