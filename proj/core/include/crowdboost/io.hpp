#pragma once

// File formats.
//
// Forecast CSV: header `question_id,forecaster_id,probability`; an empty
// probability means the forecaster gave no forecast.
// Outcome CSV: header `question_id,outcome`; outcome is `+1` or `-1`.
// Models and reports are line-oriented `key value` text documented in
// docs/file_formats.md. Reals are written with 17 significant digits so that
// reading a file back reproduces every double exactly.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "crowdboost/combiners.hpp"
#include "crowdboost/domain.hpp"
#include "crowdboost/evaluation.hpp"
#include "crowdboost/scoring.hpp"

namespace crowdboost {

/// Forecasters ordered by first appearance, questions by outcome-file order.
/// Errors carry the offending line number or question id.
ForecastTable parse_table(std::istream& forecasts, std::istream& outcomes);
ForecastTable load_table(const std::filesystem::path& forecasts_path,
                         const std::filesystem::path& outcomes_path);

/// Reads a forecast CSV alone, for applying a model to unresolved questions.
/// Returns forecasters in first-appearance order and questions in
/// first-appearance order; outcomes are left empty.
struct ForecastSheet {
    std::vector<std::string> question_ids;
    std::vector<std::string> forecaster_ids;
    std::vector<std::optional<Probability>> forecasts;  // N x Q, forecaster-major

    std::optional<Probability> at(std::size_t forecaster, std::size_t question) const
    {
        return forecasts[forecaster * question_ids.size() + question];
    }
};
ForecastSheet parse_forecasts(std::istream& forecasts);

/// Writes every cell, absent ones with an empty probability.
void write_table(const ForecastTable& table, std::ostream& forecasts, std::ostream& outcomes);

std::string format_real(double value);

void write_model(const EnsembleModel& model, std::ostream& out);
EnsembleModel read_model(std::istream& in);

void write_eval_report(const EvalReport& report, std::ostream& out);
EvalReport read_eval_report(std::istream& in);

/// Table-1 style summary row(s) for standard output.
void print_eval_summary(const EvalReport& report, std::ostream& out);

struct PredictedQuestion {
    std::string question_id;
    double margin = 0.0;
    double probability = 0.5;
    Outcome predicted = Outcome::Negative;
    std::optional<Outcome> truth;

    friend bool operator==(const PredictedQuestion&, const PredictedQuestion&) = default;
};

struct PredictionReport {
    Method method = Method::Bagging;
    std::vector<PredictedQuestion> questions;
    std::optional<std::size_t> prediction_errors;
    std::optional<ScoreReport> score;
};

void write_prediction_report(const PredictionReport& report, std::ostream& out);

void print_score_report(const std::string& label, const ScoreReport& report, std::ostream& out);

}  // namespace crowdboost
