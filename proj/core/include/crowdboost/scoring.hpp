#pragma once

// Empirical forecaster evaluation: mean score and its calibration/refinement
// decomposition over equal-width forecast bins.

#include <cstddef>
#include <span>
#include <vector>

#include "crowdboost/domain.hpp"
#include "crowdboost/links_losses.hpp"

namespace crowdboost {

inline constexpr std::size_t kDefaultBins = 10;

struct BinSummary {
    double center = 0.0;
    std::size_t count = 0;
    double frequency = 0.0;      // share of outcomes equal to +1
    double mean_forecast = 0.0;  // mean of clipped member forecasts
};

struct ScoreReport {
    double total = 0.0;
    double calibration = 0.0;
    double refinement = 0.0;
    std::size_t bins = 0;
    std::vector<BinSummary> per_bin;
};

/// (1/n) sum_i I_{y_i}(eta_hat_i), with forecasts clipped to the rule's bounds.
double empirical_score(std::span<const double> forecasts, std::span<const Outcome> outcomes,
                       const ScoringRule& rule);

/// Splits the binned mean score into calibration (<= 0) and refinement.
///
/// Forecasts fall into `bins` equal-width bins on [0, 1] (1.0 goes to the top
/// bin). Each bin b contributes, with weight n_b / n,
///   calibration: eta_b I_1(m_b) + (1 - eta_b) I_-1(m_b) - J(eta_b)
///   refinement:  J(eta_b)
/// where eta_b is the bin's empirical frequency and m_b its mean forecast.
/// Empty bins contribute nothing.
ScoreReport decompose(std::span<const double> forecasts, std::span<const Outcome> outcomes,
                      const ScoringRule& rule, std::size_t bins = kDefaultBins);

}  // namespace crowdboost
