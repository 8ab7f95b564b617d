#pragma once

// Ensemble constructions over a fixed pool of forecasters: Bagging (plain
// forecast averaging), AdaBoost over thresholded forecasts and RealBoost over
// log-odds forecasts. Boosted margins are mapped back to a probability with
// the exponential loss's inverse link.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crowdboost/domain.hpp"
#include "crowdboost/links_losses.hpp"

namespace crowdboost {

enum class Method { Bagging, AdaBoost, RealBoost };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);

/// Documented default round counts for each boosting method.
std::size_t default_iterations(Method method) noexcept;

inline constexpr double kEpsilonClamp = 1e-8;

/// Relative tolerance under which two per-round objectives count as tied.
/// Ties go to the lowest forecaster index.
inline constexpr double kTieTolerance = 1e-12;

struct Round {
    std::size_t forecaster = 0;
    double alpha = 0.0;

    friend bool operator==(const Round&, const Round&) = default;
};

/// A random fill drawn for an absent training cell (AdaBoost only).
struct FrozenImputation {
    std::size_t forecaster = 0;
    std::string question_id;
    double value = 0.0;

    friend bool operator==(const FrozenImputation&, const FrozenImputation&) = default;
};

struct EnsembleModel {
    Method method = Method::Bagging;
    std::vector<Round> rounds;
    LinkName link = LinkName::Linear;
    double clip = kDefaultClip;
    std::uint64_t seed = 0;
    std::vector<std::string> forecaster_ids;
    std::vector<FrozenImputation> imputations;

    std::size_t num_forecasters() const noexcept { return forecaster_ids.size(); }
    std::size_t unique_forecasters() const;

    /// Throws DataError when a round index or alpha is invalid.
    void validate() const;

    friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

struct RoundStats {
    std::size_t forecaster = 0;
    /// AdaBoost: weighted error before clamping. RealBoost: weighted
    /// exponential objective of the selected forecaster.
    double objective = 0.0;
    /// (1/n) sum_i exp(-y_i v_i) of the ensemble after this round.
    double risk = 0.0;
};

struct TrainingTrace {
    std::vector<RoundStats> rounds;
    bool stopped_early = false;
    /// False when some round had no forecaster better than the constant
    /// predictor (RealBoost objective > 1, AdaBoost error >= 0.5).
    bool constant_beaten_every_round = true;
};

struct AdaBoostStep {
    std::size_t forecaster = 0;
    /// Weighted error over total weight, before clamping.
    double epsilon = 0.0;
    /// 0.5 log((1 - eps) / eps) with eps clamped; 0 when eps >= 0.5.
    double alpha = 0.0;
};

/// One AdaBoost selection. `mistakes` is forecaster-major (N x n) with 1 where
/// the forecaster's sign disagrees with the outcome. Invariant under positive
/// rescaling of `weights`.
AdaBoostStep adaboost_step(std::span<const double> mistakes, std::span<const double> weights);

/// +1 iff margin > 0.
Outcome classify(double margin) noexcept;

/// AdaBoost base predictor: +1 if eta > 0.5, else -1.
double threshold_prediction(double eta) noexcept;

/// RealBoost base predictor: 0.5 log(eta / (1 - eta)), eta clipped.
double log_odds_prediction(double eta, double clip = kDefaultClip);

EnsembleModel bag(const ForecastTable& table);

EnsembleModel adaboost_train(const ForecastTable& table, std::size_t iterations,
                             std::uint64_t seed, TrainingTrace* trace = nullptr);

EnsembleModel realboost_train(const ForecastTable& table, std::size_t iterations,
                              TrainingTrace* trace = nullptr);

/// Dispatches to bag / adaboost_train / realboost_train.
EnsembleModel train(Method method, const ForecastTable& table, std::size_t iterations,
                    std::uint64_t seed, TrainingTrace* trace = nullptr);

struct EnsemblePrediction {
    Prediction margin;
    Probability probability;
};

/// Applies a model to one question's forecasts (length N, model order).
///
/// Absent forecasts become 0.5 for Bagging and RealBoost. AdaBoost draws a
/// fixed uniform fill per forecaster from the model seed.
EnsemblePrediction ensemble_predict(const EnsembleModel& model,
                                    std::span<const std::optional<Probability>> forecasts);

/// Margins of the model on every question of `table`, whose forecasters must
/// match the model's. Absent AdaBoost cells use the frozen training fill for
/// that (forecaster, question id) when one exists.
std::vector<double> ensemble_margins(const EnsembleModel& model, const ForecastTable& table);

/// Fill used by an AdaBoost model for an absent forecast at prediction time.
double prediction_time_fill(std::uint64_t seed, std::size_t forecaster) noexcept;

}  // namespace crowdboost
