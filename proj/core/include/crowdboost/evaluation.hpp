#pragma once

// Experimental protocol: individual-forecaster baselines, leave-one-out
// evaluation of a combiner, and a seeded generator of synthetic forecaster
// populations.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crowdboost/combiners.hpp"
#include "crowdboost/domain.hpp"

namespace crowdboost {

struct BaselineResult {
    /// Per forecaster: wrong-side forecasts plus absent forecasts.
    std::vector<std::size_t> errors;
    std::size_t best = 0;
    double mean = 0.0;
};

/// Counts an error when the forecast is on the wrong side of 0.5 (0.5 itself
/// predicts -1) or when the forecaster gave no forecast.
BaselineResult individual_baseline(const ForecastTable& table);

struct QuestionResult {
    std::string question_id;
    Outcome predicted = Outcome::Negative;
    Outcome truth = Outcome::Negative;
    double probability = 0.5;

    friend bool operator==(const QuestionResult&, const QuestionResult&) = default;
};

struct EvalReport {
    Method method = Method::Bagging;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::size_t questions = 0;
    std::size_t forecasters = 0;
    std::size_t prediction_errors = 0;
    double avg_unique_forecasters = 0.0;
    std::size_t best_individual_errors = 0;
    double mean_individual_errors = 0.0;
    std::vector<QuestionResult> per_question;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Seed used for the fold that holds out `question`.
constexpr std::uint64_t fold_seed(std::uint64_t seed, std::size_t question) noexcept
{
    return seed ^ static_cast<std::uint64_t>(question);
}

/// Trains the fold model for one held-out question on the remaining ones.
EnsembleModel train_fold(const ForecastTable& table, std::size_t question, Method method,
                         std::size_t iterations, std::uint64_t seed);

/// Leave-one-out: for each question, train on the others and predict it.
///
/// Folds run on up to `threads` workers (0 = hardware concurrency); the report
/// is identical for any thread count.
EvalReport loo_evaluate(const ForecastTable& table, Method method, std::size_t iterations,
                        std::uint64_t seed, unsigned threads = 0);

enum class SyntheticMode { Type1, Type2 };

std::string_view to_string(SyntheticMode mode) noexcept;
SyntheticMode parse_synthetic_mode(std::string_view text);

/// Synthetic forecaster population.
///
/// Each question has a latent signal s ~ N(0, 1.5^2) and resolves +1 with
/// probability Phi(s). A forecaster sees s through a Gaussian channel and
/// reports its exact posterior P(y = +1 | observation), so every forecaster is
/// calibrated.
///
/// Type2: forecaster j observes s + noise * u_j * e, with its own scale
/// u_j ~ U[0.5, 1.5] and independent e ~ N(0, 1).
/// Type1: each question has a shared history of 8 readings s + noise * e; every
/// forecaster averages its own fixed subsample (size 1..8, without
/// replacement) of that history.
struct SyntheticSpec {
    std::size_t forecasters = 50;
    std::size_t questions = 200;
    SyntheticMode mode = SyntheticMode::Type2;
    double noise = 1.0;
    double coverage = 0.8;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on out-of-range parameters.
    void validate() const;
};

struct SyntheticData {
    ForecastTable table;
    /// Phi(s) per question, the probability its outcome was drawn from.
    std::vector<double> latent_probability;
};

SyntheticData generate_synthetic_with_truth(const SyntheticSpec& spec);
ForecastTable generate_synthetic(const SyntheticSpec& spec);

}  // namespace crowdboost
