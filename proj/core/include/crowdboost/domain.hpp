#pragma once

// Core value types: probabilities, outcomes, predictions and the forecast table
// (forecasters x questions) that every combiner trains on.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdboost {

/// Raised when input data violates a table or file invariant.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Probability that the event y = +1 occurs. Always in [0, 1].
class Probability {
public:
    explicit Probability(double value);

    double value() const noexcept { return value_; }

    friend bool operator==(Probability, Probability) = default;

private:
    double value_;
};

enum class Outcome : int { Negative = -1, Positive = 1 };

constexpr int sign(Outcome y) noexcept { return static_cast<int>(y); }

/// Accepts exactly +1 or -1.
Outcome outcome_from_int(int label);

/// Margin-scale point forecast. Finite by construction.
class Prediction {
public:
    explicit Prediction(double value);

    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Dense N x Q probability matrix, row-major by forecaster.
class ProbabilityMatrix {
public:
    ProbabilityMatrix() = default;
    ProbabilityMatrix(std::size_t forecasters, std::size_t questions, std::vector<double> values);

    std::size_t forecasters() const noexcept { return forecasters_; }
    std::size_t questions() const noexcept { return questions_; }

    double at(std::size_t forecaster, std::size_t question) const
    {
        return values_[forecaster * questions_ + question];
    }
    std::span<const double> row(std::size_t forecaster) const
    {
        return {values_.data() + forecaster * questions_, questions_};
    }
    const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const ProbabilityMatrix&, const ProbabilityMatrix&) = default;

private:
    std::size_t forecasters_ = 0;
    std::size_t questions_ = 0;
    std::vector<double> values_;
};

/// Forecasts of N forecasters on Q resolved questions, with a missingness mask.
///
/// Immutable once built. Forecasts are stored row-major by forecaster, so
/// `forecasts[f * Q + q]` is forecaster f's probability for question q, or
/// nullopt when the forecaster gave none.
class ForecastTable {
public:
    ForecastTable(std::vector<std::string> question_ids,
                  std::vector<std::string> forecaster_ids,
                  std::vector<std::optional<Probability>> forecasts,
                  std::vector<Outcome> outcomes);

    std::size_t num_forecasters() const noexcept { return forecaster_ids_.size(); }
    std::size_t num_questions() const noexcept { return question_ids_.size(); }

    const std::vector<std::string>& question_ids() const noexcept { return question_ids_; }
    const std::vector<std::string>& forecaster_ids() const noexcept { return forecaster_ids_; }
    const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }

    std::optional<Probability> at(std::size_t forecaster, std::size_t question) const
    {
        return forecasts_[forecaster * num_questions() + question];
    }
    Outcome outcome(std::size_t question) const { return outcomes_[question]; }

    /// Forecasts of every forecaster on one question (length N).
    std::vector<std::optional<Probability>> column(std::size_t question) const;

    /// Copy restricted to the given questions, in the given order.
    ForecastTable select_questions(std::span<const std::size_t> questions) const;

    /// Copy with one question removed.
    ForecastTable without_question(std::size_t question) const;

    /// Copy with one question's outcome flipped. Used for leakage checks.
    ForecastTable with_outcome(std::size_t question, Outcome outcome) const;

    friend bool operator==(const ForecastTable&, const ForecastTable&) = default;

private:
    std::vector<std::string> question_ids_;
    std::vector<std::string> forecaster_ids_;
    std::vector<std::optional<Probability>> forecasts_;
    std::vector<Outcome> outcomes_;
};

enum class ImputationMode { Half, Random, Error };

struct ImputationPolicy {
    ImputationMode mode = ImputationMode::Half;
    std::uint64_t seed = 0;
};

/// Fills absent cells: 0.5 for Half, a seeded uniform draw for Random.
/// Random draws are taken in row-major cell order from a mt19937_64 seeded
/// with `policy.seed`. Error mode is rejected with std::invalid_argument.
ProbabilityMatrix impute(const ForecastTable& table, const ImputationPolicy& policy);

/// Uniform draw in [0, 1) from 53 random bits; identical on every platform.
double unit_uniform(std::uint64_t bits) noexcept;

/// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace crowdboost
