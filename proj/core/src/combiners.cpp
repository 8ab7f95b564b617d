#include "crowdboost/combiners.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <stdexcept>

namespace crowdboost {

std::string_view to_string(Method method) noexcept
{
    switch (method) {
    case Method::Bagging: return "bagging";
    case Method::AdaBoost: return "adaboost";
    case Method::RealBoost: return "realboost";
    }
    return "unknown";
}

Method parse_method(std::string_view text)
{
    if (text == "bagging") return Method::Bagging;
    if (text == "adaboost") return Method::AdaBoost;
    if (text == "realboost") return Method::RealBoost;
    throw std::invalid_argument("unknown method: " + std::string(text));
}

std::size_t default_iterations(Method method) noexcept
{
    switch (method) {
    case Method::AdaBoost: return 800;
    case Method::RealBoost: return 70;
    case Method::Bagging: return 1;
    }
    return 1;
}

std::size_t EnsembleModel::unique_forecasters() const
{
    std::set<std::size_t> seen;
    for (const auto& r : rounds) seen.insert(r.forecaster);
    return seen.size();
}

void EnsembleModel::validate() const
{
    if (rounds.empty())
        throw DataError("model has no rounds");
    for (const auto& r : rounds) {
        if (r.forecaster >= forecaster_ids.size())
            throw DataError("model round references forecaster " + std::to_string(r.forecaster) +
                            " but only " + std::to_string(forecaster_ids.size()) + " exist");
        if (!std::isfinite(r.alpha))
            throw DataError("model alpha is not finite");
    }
    for (const auto& imp : imputations) {
        if (imp.forecaster >= forecaster_ids.size() || !(imp.value >= 0.0 && imp.value <= 1.0))
            throw DataError("model imputation is invalid");
    }
}

Outcome classify(double margin) noexcept
{
    return margin > 0.0 ? Outcome::Positive : Outcome::Negative;
}

double threshold_prediction(double eta) noexcept
{
    return static_cast<double>(sign(classify(2.0 * eta - 1.0)));
}

double log_odds_prediction(double eta, double clip)
{
    const double p = std::clamp(eta, clip, 1.0 - clip);
    return 0.5 * std::log(p / (1.0 - p));
}

double prediction_time_fill(std::uint64_t seed, std::size_t forecaster) noexcept
{
    return unit_uniform(mix64(seed ^ mix64(static_cast<std::uint64_t>(forecaster))));
}

namespace {

void require_trainable(const ForecastTable& table, std::size_t iterations)
{
    if (iterations < 1)
        throw std::invalid_argument("iterations must be at least 1");
    if (table.num_forecasters() == 0 || table.num_questions() == 0)
        throw std::invalid_argument("cannot train on an empty table");
}

// Lowest index whose value is within tolerance of the minimum.
std::size_t argmin_lowest(std::span<const double> values, double scale)
{
    const double best = *std::min_element(values.begin(), values.end());
    const double cutoff = best + kTieTolerance * scale;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (values[j] <= cutoff) return j;
    return 0;
}

void normalize(std::vector<double>& w)
{
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
}

double exponential_risk(std::span<const double> margins, std::span<const Outcome> outcomes)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i)
        sum += std::exp(-sign(outcomes[i]) * margins[i]);
    return sum / static_cast<double>(margins.size());
}

}  // namespace

AdaBoostStep adaboost_step(std::span<const double> mistakes, std::span<const double> weights)
{
    const std::size_t n = weights.size();
    if (n == 0 || mistakes.empty() || mistakes.size() % n != 0)
        throw std::invalid_argument("mistake matrix does not match weight count");
    const std::size_t forecasters = mistakes.size() / n;

    double total = 0.0;
    for (double x : weights) total += x;
    std::vector<double> errors(forecasters);
    for (std::size_t f = 0; f < forecasters; ++f) {
        double err = 0.0;
        const double* row = &mistakes[f * n];
        for (std::size_t i = 0; i < n; ++i) err += weights[i] * row[i];
        errors[f] = err;
    }

    AdaBoostStep step;
    step.forecaster = argmin_lowest(errors, total);
    step.epsilon = errors[step.forecaster] / total;
    if (step.epsilon < 0.5) {
        const double eps = std::clamp(step.epsilon, kEpsilonClamp, 1.0 - kEpsilonClamp);
        step.alpha = 0.5 * std::log((1.0 - eps) / eps);
    }
    return step;
}

EnsembleModel bag(const ForecastTable& table)
{
    if (table.num_forecasters() == 0)
        throw std::invalid_argument("cannot bag an empty table");
    EnsembleModel model;
    model.method = Method::Bagging;
    model.link = LinkName::Linear;
    model.forecaster_ids = table.forecaster_ids();
    const double alpha = 1.0 / static_cast<double>(table.num_forecasters());
    for (std::size_t f = 0; f < table.num_forecasters(); ++f)
        model.rounds.push_back({f, alpha});
    return model;
}

EnsembleModel adaboost_train(const ForecastTable& table, std::size_t iterations,
                             std::uint64_t seed, TrainingTrace* trace)
{
    require_trainable(table, iterations);
    const std::size_t n = table.num_questions();
    const std::size_t forecasters = table.num_forecasters();

    EnsembleModel model;
    model.method = Method::AdaBoost;
    model.link = LinkName::Exponential;
    model.seed = seed;
    model.forecaster_ids = table.forecaster_ids();

    const ProbabilityMatrix filled = impute(table, {ImputationMode::Random, seed});
    for (std::size_t f = 0; f < forecasters; ++f)
        for (std::size_t i = 0; i < n; ++i)
            if (!table.at(f, i))
                model.imputations.push_back({f, table.question_ids()[i], filled.at(f, i)});

    // predictions[f][i] in {-1, +1}; mistakes[f][i] = 1 where it disagrees with y_i.
    std::vector<double> predictions(forecasters * n);
    std::vector<double> mistakes(forecasters * n);
    for (std::size_t f = 0; f < forecasters; ++f) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = threshold_prediction(filled.at(f, i));
            predictions[f * n + i] = p;
            mistakes[f * n + i] = (p != sign(table.outcome(i))) ? 1.0 : 0.0;
        }
    }

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> margins(n, 0.0);
    TrainingTrace local;

    for (std::size_t m = 0; m < iterations; ++m) {
        const AdaBoostStep step = adaboost_step(mistakes, w);
        const std::size_t best = step.forecaster;
        const double epsilon = step.epsilon;
        const double alpha = step.alpha;

        if (epsilon >= 0.5) {
            local.constant_beaten_every_round = false;
            local.stopped_early = true;
            if (!model.rounds.empty()) break;
        }
        model.rounds.push_back({best, alpha});

        const double* row = &mistakes[best * n];
        for (std::size_t i = 0; i < n; ++i) {
            w[i] *= std::exp(alpha * row[i]);
            margins[i] += alpha * predictions[best * n + i];
        }
        normalize(w);
        local.rounds.push_back({best, epsilon, exponential_risk(margins, table.outcomes())});
        if (local.stopped_early) break;
    }

    if (trace) *trace = std::move(local);
    return model;
}

EnsembleModel realboost_train(const ForecastTable& table, std::size_t iterations,
                              TrainingTrace* trace)
{
    require_trainable(table, iterations);
    const std::size_t n = table.num_questions();
    const std::size_t forecasters = table.num_forecasters();

    EnsembleModel model;
    model.method = Method::RealBoost;
    model.link = LinkName::Exponential;
    model.forecaster_ids = table.forecaster_ids();

    const ProbabilityMatrix filled = impute(table, {ImputationMode::Half, 0});
    std::vector<double> predictions(forecasters * n);
    std::vector<double> losses(forecasters * n);
    for (std::size_t f = 0; f < forecasters; ++f) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = log_odds_prediction(filled.at(f, i), model.clip);
            predictions[f * n + i] = p;
            losses[f * n + i] = std::exp(-sign(table.outcome(i)) * p);
        }
    }

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> margins(n, 0.0);
    std::vector<double> objectives(forecasters);
    TrainingTrace local;

    for (std::size_t m = 0; m < iterations; ++m) {
        for (std::size_t f = 0; f < forecasters; ++f) {
            double obj = 0.0;
            const double* row = &losses[f * n];
            for (std::size_t i = 0; i < n; ++i) obj += w[i] * row[i];
            objectives[f] = obj;
        }
        const std::size_t best = argmin_lowest(objectives, 1.0);
        if (objectives[best] > 1.0) local.constant_beaten_every_round = false;
        model.rounds.push_back({best, 1.0});

        const double* row = &losses[best * n];
        for (std::size_t i = 0; i < n; ++i) {
            w[i] *= row[i];
            margins[i] += predictions[best * n + i];
        }
        normalize(w);
        local.rounds.push_back({best, objectives[best], exponential_risk(margins, table.outcomes())});
    }

    if (trace) *trace = std::move(local);
    return model;
}

EnsembleModel train(Method method, const ForecastTable& table, std::size_t iterations,
                    std::uint64_t seed, TrainingTrace* trace)
{
    switch (method) {
    case Method::Bagging: return bag(table);
    case Method::AdaBoost: return adaboost_train(table, iterations, seed, trace);
    case Method::RealBoost: return realboost_train(table, iterations, trace);
    }
    throw std::invalid_argument("unknown method");
}

namespace {

template <typename Fill>
double boosted_margin(const EnsembleModel& model,
                      std::span<const std::optional<Probability>> forecasts, Fill&& adaboost_fill)
{
    double margin = 0.0;
    for (const auto& r : model.rounds) {
        const auto& cell = forecasts[r.forecaster];
        if (model.method == Method::AdaBoost) {
            const double eta = cell ? cell->value() : adaboost_fill(r.forecaster);
            margin += r.alpha * threshold_prediction(eta);
        } else {
            const double eta = cell ? cell->value() : 0.5;
            margin += r.alpha * log_odds_prediction(eta, model.clip);
        }
    }
    return margin;
}

double bagged_probability(const EnsembleModel& model,
                          std::span<const std::optional<Probability>> forecasts)
{
    double sum = 0.0;
    for (const auto& r : model.rounds)
        sum += forecasts[r.forecaster] ? forecasts[r.forecaster]->value() : 0.5;
    return std::clamp(sum / static_cast<double>(model.rounds.size()), 0.0, 1.0);
}

void check_applicable(const EnsembleModel& model, std::size_t forecasters)
{
    if (forecasters != model.num_forecasters())
        throw std::invalid_argument("expected " + std::to_string(model.num_forecasters()) +
                                    " forecasts, got " + std::to_string(forecasters));
    if (model.rounds.empty())
        throw std::invalid_argument("model has no rounds");
}

}  // namespace

EnsemblePrediction ensemble_predict(const EnsembleModel& model,
                                    std::span<const std::optional<Probability>> forecasts)
{
    check_applicable(model, forecasts.size());
    if (model.method == Method::Bagging) {
        const double p = bagged_probability(model, forecasts);
        const LinkSpec linear(LinkName::Linear, model.clip);
        return {Prediction(linear.link(p)), Probability(p)};
    }
    const double margin = boosted_margin(model, forecasts, [&](std::size_t f) {
        return prediction_time_fill(model.seed, f);
    });
    const LinkSpec exponential(LinkName::Exponential, model.clip);
    return {Prediction(margin), Probability(exponential.inverse_link(margin))};
}

std::vector<double> ensemble_margins(const EnsembleModel& model, const ForecastTable& table)
{
    check_applicable(model, table.num_forecasters());
    std::map<std::pair<std::size_t, std::string_view>, double> frozen;
    for (const auto& imp : model.imputations)
        frozen.emplace(std::pair{imp.forecaster, std::string_view(imp.question_id)}, imp.value);

    std::vector<double> margins;
    margins.reserve(table.num_questions());
    for (std::size_t q = 0; q < table.num_questions(); ++q) {
        const auto column = table.column(q);
        if (model.method == Method::Bagging) {
            margins.push_back(2.0 * bagged_probability(model, column) - 1.0);
            continue;
        }
        const std::string_view qid = table.question_ids()[q];
        margins.push_back(boosted_margin(model, column, [&](std::size_t f) {
            auto it = frozen.find({f, qid});
            return it != frozen.end() ? it->second : prediction_time_fill(model.seed, f);
        }));
    }
    return margins;
}

}  // namespace crowdboost
