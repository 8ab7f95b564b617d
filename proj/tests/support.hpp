#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crowdboost/domain.hpp"

namespace testing_support {

using Cell = std::optional<double>;

/// rows[f][q] is forecaster f's probability for question q.
inline crowdboost::ForecastTable make_table(const std::vector<std::vector<Cell>>& rows,
                                            const std::vector<int>& outcomes)
{
    using namespace crowdboost;
    std::vector<std::string> qids;
    std::vector<std::string> fids;
    for (std::size_t q = 0; q < outcomes.size(); ++q) qids.push_back("q" + std::to_string(q));
    for (std::size_t f = 0; f < rows.size(); ++f) fids.push_back("f" + std::to_string(f));
    std::vector<std::optional<Probability>> cells;
    for (const auto& row : rows)
        for (const auto& c : row)
            cells.push_back(c ? std::optional<Probability>(Probability(*c)) : std::nullopt);
    std::vector<Outcome> ys;
    for (int y : outcomes) ys.push_back(outcome_from_int(y));
    return ForecastTable(std::move(qids), std::move(fids), std::move(cells), std::move(ys));
}

/// Random small table with missing cells and a few repeated values so that
/// per-round ties actually occur.
inline crowdboost::ForecastTable random_table(std::mt19937_64& rng, std::size_t forecasters,
                                              std::size_t questions)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double palette[] = {0.1, 0.3, 0.5, 0.7, 0.9, 0.0, 1.0};
    std::vector<std::vector<Cell>> rows(forecasters);
    for (auto& row : rows) {
        for (std::size_t q = 0; q < questions; ++q) {
            const double kind = u(rng);
            if (kind < 0.2) row.push_back(std::nullopt);
            else if (kind < 0.45) row.push_back(palette[rng() % 7]);
            else row.push_back(u(rng));
        }
    }
    std::vector<int> ys;
    for (std::size_t q = 0; q < questions; ++q) ys.push_back(u(rng) < 0.5 ? 1 : -1);
    return make_table(rows, ys);
}

}  // namespace testing_support
