#include "crowdboost/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace crowdboost {

BaselineResult individual_baseline(const ForecastTable& table)
{
    if (table.num_forecasters() == 0 || table.num_questions() == 0)
        throw std::invalid_argument("baseline needs a non-empty table");

    BaselineResult result;
    result.errors.resize(table.num_forecasters(), 0);
    for (std::size_t f = 0; f < table.num_forecasters(); ++f) {
        for (std::size_t q = 0; q < table.num_questions(); ++q) {
            const auto cell = table.at(f, q);
            if (!cell || classify(2.0 * cell->value() - 1.0) != table.outcome(q))
                ++result.errors[f];
        }
    }
    result.best = *std::min_element(result.errors.begin(), result.errors.end());
    result.mean = static_cast<double>(std::accumulate(result.errors.begin(), result.errors.end(),
                                                      std::size_t{0})) /
                  static_cast<double>(result.errors.size());
    return result;
}

EnsembleModel train_fold(const ForecastTable& table, std::size_t question, Method method,
                         std::size_t iterations, std::uint64_t seed)
{
    if (method == Method::Bagging)
        return bag(table);
    return train(method, table.without_question(question), iterations, fold_seed(seed, question));
}

EvalReport loo_evaluate(const ForecastTable& table, Method method, std::size_t iterations,
                        std::uint64_t seed, unsigned threads)
{
    const std::size_t q_count = table.num_questions();
    if (table.num_forecasters() == 0 || q_count == 0)
        throw std::invalid_argument("leave-one-out needs a non-empty table");
    if (method != Method::Bagging && q_count < 2)
        throw std::invalid_argument("boosting needs at least 2 questions for leave-one-out");

    std::vector<QuestionResult> results(q_count);
    std::vector<std::size_t> unique(q_count, 0);

    auto run_fold = [&](std::size_t q) {
        const EnsembleModel model = train_fold(table, q, method, iterations, seed);
        const auto column = table.column(q);
        const EnsemblePrediction pred = ensemble_predict(model, column);
        results[q] = {table.question_ids()[q], classify(pred.margin.value()), table.outcome(q),
                      pred.probability.value()};
        unique[q] = model.unique_forecasters();
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, q_count));
    if (threads <= 1) {
        for (std::size_t q = 0; q < q_count; ++q) run_fold(q);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> workers;
            for (unsigned t = 0; t < threads; ++t) {
                workers.emplace_back([&] {
                    for (std::size_t q = next++; q < q_count; q = next++) {
                        try {
                            run_fold(q);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                        }
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    EvalReport report;
    report.method = method;
    report.iterations = method == Method::Bagging ? 0 : iterations;
    report.seed = seed;
    report.questions = q_count;
    report.forecasters = table.num_forecasters();
    for (const auto& r : results)
        if (r.predicted != r.truth) ++report.prediction_errors;
    report.avg_unique_forecasters =
        static_cast<double>(std::accumulate(unique.begin(), unique.end(), std::size_t{0})) /
        static_cast<double>(q_count);
    const BaselineResult baseline = individual_baseline(table);
    report.best_individual_errors = baseline.best;
    report.mean_individual_errors = baseline.mean;
    report.per_question = std::move(results);
    return report;
}

std::string_view to_string(SyntheticMode mode) noexcept
{
    return mode == SyntheticMode::Type1 ? "type1" : "type2";
}

SyntheticMode parse_synthetic_mode(std::string_view text)
{
    if (text == "type1") return SyntheticMode::Type1;
    if (text == "type2") return SyntheticMode::Type2;
    throw std::invalid_argument("unknown synthetic mode: " + std::string(text));
}

void SyntheticSpec::validate() const
{
    if (forecasters < 1) throw std::invalid_argument("synthetic spec needs at least 1 forecaster");
    if (questions < 1) throw std::invalid_argument("synthetic spec needs at least 1 question");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw std::invalid_argument("synthetic noise must be finite and >= 0");
    if (!(coverage > 0.0 && coverage <= 1.0))
        throw std::invalid_argument("synthetic coverage must lie in (0, 1]");
}

namespace {

constexpr double kSignalScale = 1.5;
constexpr std::size_t kHistoryLength = 8;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::string padded_id(char prefix, std::size_t index, std::size_t count)
{
    const std::size_t width = std::to_string(count == 0 ? 0 : count - 1).size();
    std::string digits = std::to_string(index);
    return prefix + std::string(width - digits.size(), '0') + digits;
}

// P(y = +1 | obs) when obs = s + sigma * e, s ~ N(0, kSignalScale^2) and
// y = +1 iff s + z > 0 with z ~ N(0, 1).
double posterior(double observation, double sigma)
{
    if (sigma == 0.0) return normal_cdf(observation);
    const double prior_precision = 1.0 / (kSignalScale * kSignalScale);
    const double obs_precision = 1.0 / (sigma * sigma);
    const double precision = prior_precision + obs_precision;
    const double mean = observation * obs_precision / precision;
    return normal_cdf(mean / std::sqrt(1.0 + 1.0 / precision));
}

}  // namespace

SyntheticData generate_synthetic_with_truth(const SyntheticSpec& spec)
{
    spec.validate();
    const std::size_t n = spec.forecasters;
    const std::size_t q = spec.questions;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    std::vector<double> signal(q);
    std::vector<double> latent(q);
    std::vector<Outcome> outcomes(q);
    for (std::size_t j = 0; j < q; ++j) {
        signal[j] = kSignalScale * gauss(rng);
        latent[j] = normal_cdf(signal[j]);
        outcomes[j] = signal[j] + gauss(rng) > 0.0 ? Outcome::Positive : Outcome::Negative;
    }

    std::vector<double> probabilities(n * q);
    if (spec.mode == SyntheticMode::Type2) {
        for (std::size_t f = 0; f < n; ++f) {
            const double sigma = spec.noise * (0.5 + uniform(rng));
            for (std::size_t j = 0; j < q; ++j) {
                const double obs = signal[j] + sigma * gauss(rng);
                probabilities[f * q + j] = posterior(obs, sigma);
            }
        }
    } else {
        std::vector<double> history(q * kHistoryLength);
        for (std::size_t j = 0; j < q; ++j)
            for (std::size_t h = 0; h < kHistoryLength; ++h)
                history[j * kHistoryLength + h] = gauss(rng);
        std::vector<std::size_t> slots(kHistoryLength);
        for (std::size_t f = 0; f < n; ++f) {
            const std::size_t k = 1 + static_cast<std::size_t>(rng() % kHistoryLength);
            std::iota(slots.begin(), slots.end(), std::size_t{0});
            std::shuffle(slots.begin(), slots.end(), rng);
            const double sigma = spec.noise / std::sqrt(static_cast<double>(k));
            for (std::size_t j = 0; j < q; ++j) {
                double sum = 0.0;
                for (std::size_t s = 0; s < k; ++s) sum += history[j * kHistoryLength + slots[s]];
                const double obs = signal[j] + spec.noise * (sum / static_cast<double>(k));
                probabilities[f * q + j] = posterior(obs, sigma);
            }
        }
    }

    const auto answered = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(spec.coverage * static_cast<double>(q))));
    std::vector<std::optional<Probability>> cells(n * q);
    std::vector<std::size_t> order(q);
    for (std::size_t f = 0; f < n; ++f) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t a = 0; a < answered; ++a) {
            const std::size_t j = order[a];
            cells[f * q + j] = Probability(probabilities[f * q + j]);
        }
    }

    std::vector<std::string> qids(q);
    std::vector<std::string> fids(n);
    for (std::size_t j = 0; j < q; ++j) qids[j] = padded_id('q', j, q);
    for (std::size_t f = 0; f < n; ++f) fids[f] = padded_id('f', f, n);

    return {ForecastTable(std::move(qids), std::move(fids), std::move(cells), std::move(outcomes)),
            std::move(latent)};
}

ForecastTable generate_synthetic(const SyntheticSpec& spec)
{
    return generate_synthetic_with_truth(spec).table;
}

}  // namespace crowdboost
