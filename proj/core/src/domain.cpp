#include "crowdboost/domain.hpp"

#include <cmath>
#include <random>
#include <string>
#include <unordered_set>

namespace crowdboost {

Probability::Probability(double value) : value_(value)
{
    if (!(value >= 0.0 && value <= 1.0))
        throw std::invalid_argument("probability outside [0,1]: " + std::to_string(value));
}

Outcome outcome_from_int(int label)
{
    if (label == 1) return Outcome::Positive;
    if (label == -1) return Outcome::Negative;
    throw std::invalid_argument("outcome must be +1 or -1, got " + std::to_string(label));
}

Prediction::Prediction(double value) : value_(value)
{
    if (!std::isfinite(value))
        throw std::invalid_argument("prediction must be finite");
}

ProbabilityMatrix::ProbabilityMatrix(std::size_t forecasters, std::size_t questions,
                                     std::vector<double> values)
    : forecasters_(forecasters), questions_(questions), values_(std::move(values))
{
    if (values_.size() != forecasters_ * questions_)
        throw std::invalid_argument("matrix size does not match dimensions");
}

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what)
{
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second)
            throw DataError(std::string("duplicate ") + what + " id: " + id);
    }
}

}  // namespace

ForecastTable::ForecastTable(std::vector<std::string> question_ids,
                             std::vector<std::string> forecaster_ids,
                             std::vector<std::optional<Probability>> forecasts,
                             std::vector<Outcome> outcomes)
    : question_ids_(std::move(question_ids)),
      forecaster_ids_(std::move(forecaster_ids)),
      forecasts_(std::move(forecasts)),
      outcomes_(std::move(outcomes))
{
    require_unique(question_ids_, "question");
    require_unique(forecaster_ids_, "forecaster");
    if (forecasts_.size() != forecaster_ids_.size() * question_ids_.size())
        throw DataError("forecast matrix size does not match N x Q");
    if (outcomes_.size() != question_ids_.size())
        throw DataError("outcome count does not match question count");
}

std::vector<std::optional<Probability>> ForecastTable::column(std::size_t question) const
{
    std::vector<std::optional<Probability>> out;
    out.reserve(num_forecasters());
    for (std::size_t f = 0; f < num_forecasters(); ++f)
        out.push_back(at(f, question));
    return out;
}

ForecastTable ForecastTable::select_questions(std::span<const std::size_t> questions) const
{
    std::vector<std::string> qids;
    std::vector<Outcome> outs;
    qids.reserve(questions.size());
    outs.reserve(questions.size());
    for (auto q : questions) {
        if (q >= num_questions())
            throw std::out_of_range("question index out of range");
        qids.push_back(question_ids_[q]);
        outs.push_back(outcomes_[q]);
    }
    std::vector<std::optional<Probability>> cells;
    cells.reserve(num_forecasters() * questions.size());
    for (std::size_t f = 0; f < num_forecasters(); ++f)
        for (auto q : questions)
            cells.push_back(at(f, q));
    return ForecastTable(std::move(qids), forecaster_ids_, std::move(cells), std::move(outs));
}

ForecastTable ForecastTable::without_question(std::size_t question) const
{
    if (question >= num_questions())
        throw std::out_of_range("question index out of range");
    std::vector<std::size_t> keep;
    keep.reserve(num_questions() - 1);
    for (std::size_t q = 0; q < num_questions(); ++q)
        if (q != question) keep.push_back(q);
    return select_questions(keep);
}

ForecastTable ForecastTable::with_outcome(std::size_t question, Outcome outcome) const
{
    ForecastTable copy = *this;
    copy.outcomes_.at(question) = outcome;
    return copy;
}

double unit_uniform(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

ProbabilityMatrix impute(const ForecastTable& table, const ImputationPolicy& policy)
{
    if (policy.mode == ImputationMode::Error)
        throw std::invalid_argument("error-mode imputation is an evaluation rule, not a fill policy");

    const auto n = table.num_forecasters();
    const auto q = table.num_questions();
    std::vector<double> values(n * q);
    std::mt19937_64 rng(policy.seed);
    for (std::size_t f = 0; f < n; ++f) {
        for (std::size_t j = 0; j < q; ++j) {
            auto cell = table.at(f, j);
            if (cell) {
                values[f * q + j] = cell->value();
            } else if (policy.mode == ImputationMode::Half) {
                values[f * q + j] = 0.5;
            } else {
                values[f * q + j] = unit_uniform(rng());
            }
        }
    }
    return ProbabilityMatrix(n, q, std::move(values));
}

}  // namespace crowdboost
