#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "crowdboost/combiners.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace crowdboost;
using testing_support::Cell;
using testing_support::make_table;

namespace {

std::vector<std::optional<Probability>> column(std::initializer_list<Cell> cells)
{
    std::vector<std::optional<Probability>> out;
    for (const auto& c : cells)
        out.push_back(c ? std::optional<Probability>(Probability(*c)) : std::nullopt);
    return out;
}

std::vector<std::vector<double>> dense(const ProbabilityMatrix& m)
{
    std::vector<std::vector<double>> rows(m.forecasters());
    for (std::size_t f = 0; f < m.forecasters(); ++f)
        rows[f].assign(m.row(f).begin(), m.row(f).end());
    return rows;
}

std::vector<int> labels(const ForecastTable& t)
{
    std::vector<int> y;
    for (auto o : t.outcomes()) y.push_back(sign(o));
    return y;
}

void check_against_oracle(const EnsembleModel& model, const oracle::BoostRun& expected,
                          const ForecastTable& table)
{
    REQUIRE(model.rounds.size() == expected.selected.size());
    for (std::size_t m = 0; m < model.rounds.size(); ++m) {
        CHECK(model.rounds[m].forecaster == expected.selected[m]);
        CHECK(std::abs(model.rounds[m].alpha - expected.alphas[m]) <= 1e-12);
    }
    const auto margins = ensemble_margins(model, table);
    for (std::size_t i = 0; i < margins.size(); ++i)
        CHECK(std::abs(margins[i] - expected.margins[i]) <= 1e-12);
}

}  // namespace

TEST_SUITE("combiners") {

TEST_CASE("classify ties go negative")
{
    CHECK(classify(0.3) == Outcome::Positive);
    CHECK(classify(-0.3) == Outcome::Negative);
    CHECK(classify(0.0) == Outcome::Negative);
}

TEST_CASE("bagging averages forecasts")
{
    const auto table = make_table({{0.4}, {0.6}}, {1});
    const auto model = bag(table);
    CHECK(model.rounds.size() == 2);
    CHECK(model.rounds[0].alpha == 0.5);
    CHECK(ensemble_predict(model, column({0.4, 0.6})).probability.value() == 0.5);
    CHECK(ensemble_predict(model, column({0.9, std::nullopt})).probability.value() ==
          doctest::Approx(0.7).epsilon(1e-15));

    const auto three = bag(make_table({{0.1}, {0.1}, {0.1}}, {1}));
    CHECK(ensemble_predict(three, column({0.2, 0.6, 0.7})).probability.value() ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(three.unique_forecasters() == 3);
}

TEST_CASE("bagging with one forecaster is that forecaster")
{
    const auto model = bag(make_table({{0.3}}, {1}));
    for (double p : {0.0, 0.17, 0.5, 0.83, 1.0})
        CHECK(ensemble_predict(model, column({p})).probability.value() == p);
}

TEST_CASE("bagged squared error never exceeds the mean individual squared error")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 20;
        std::vector<std::optional<Probability>> cells;
        double mean_sq = 0.0;
        const double y = u(rng) < 0.5 ? 1.0 : -1.0;
        const double target = y > 0 ? 1.0 : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = u(rng);
            cells.emplace_back(Probability(p));
            mean_sq += (target - p) * (target - p);
        }
        mean_sq /= static_cast<double>(n);
        std::vector<std::optional<Probability>> ids(n, Probability(0.5));
        std::vector<std::string> fids;
        for (std::size_t i = 0; i < n; ++i) fids.push_back("f" + std::to_string(i));
        ForecastTable t({"q"}, fids, ids, {outcome_from_int(static_cast<int>(y))});
        const double p = ensemble_predict(bag(t), cells).probability.value();
        CHECK((target - p) * (target - p) <= mean_sq + 1e-15);
    }
}

TEST_CASE("adaboost alpha from weighted error")
{
    // One forecaster wrong on 2 of 4 equally weighted questions: eps = 0.5.
    const std::vector<double> w(4, 0.25);
    auto half = adaboost_step(std::vector<double>{1, 1, 0, 0}, w);
    CHECK(half.epsilon == 0.5);
    CHECK(half.alpha == 0.0);

    auto quarter = adaboost_step(std::vector<double>{1, 0, 0, 0}, w);
    CHECK(quarter.epsilon == 0.25);
    // 0.5 ln 3, evaluated to 40 digits offline.
    CHECK(quarter.alpha == doctest::Approx(0.5493061443340548457).epsilon(1e-15));

    auto perfect = adaboost_step(std::vector<double>{0, 0, 0, 0}, w);
    CHECK(perfect.epsilon == 0.0);
    CHECK(perfect.alpha == doctest::Approx(0.5 * std::log((1 - 1e-8) / 1e-8)));
}

TEST_CASE("adaboost selection is invariant to weight scale")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 10, forecasters = 1 + rng() % 6;
        std::vector<double> mistakes(n * forecasters), w(n);
        for (auto& m : mistakes) m = u(rng) < 0.4 ? 1.0 : 0.0;
        for (auto& x : w) x = u(rng) + 0.01;
        const double scale = std::exp(20.0 * (u(rng) - 0.5));
        std::vector<double> scaled(w);
        for (auto& x : scaled) x *= scale;
        const auto a = adaboost_step(mistakes, w);
        const auto b = adaboost_step(mistakes, scaled);
        CHECK(a.forecaster == b.forecaster);
        CHECK(std::abs(a.alpha - b.alpha) < 1e-12);
    }
}

TEST_CASE("adaboost toy table matches the brute-force oracle")
{
    const auto table = make_table({{0.8, 0.3, 0.6, 0.2},
                                   {0.7, 0.6, 0.4, 0.1},
                                   {0.4, std::nullopt, 0.9, 0.3}},
                                  {1, -1, 1, -1});
    const auto model = adaboost_train(table, 2, 5);
    const auto expected =
        oracle::adaboost(dense(impute(table, {ImputationMode::Random, 5})), labels(table), 2);
    check_against_oracle(model, expected, table);
    for (const auto& r : model.rounds) CHECK(r.alpha >= 0.0);
}

TEST_CASE("adaboost freezes one random fill per absent training cell")
{
    const auto table = make_table({{0.8, std::nullopt}, {std::nullopt, std::nullopt}}, {1, -1});
    const auto model = adaboost_train(table, 3, 42);
    REQUIRE(model.imputations.size() == 3);
    const auto filled = impute(table, {ImputationMode::Random, 42});
    CHECK(model.imputations[0].forecaster == 0);
    CHECK(model.imputations[0].question_id == "q1");
    CHECK(model.imputations[0].value == filled.at(0, 1));
    CHECK(adaboost_train(table, 3, 42) == model);
}

TEST_CASE("adaboost stops when no forecaster beats chance")
{
    // Both forecasters are wrong on every question.
    const auto table = make_table({{0.1, 0.9}, {0.2, 0.8}}, {1, -1});
    TrainingTrace trace;
    const auto model = adaboost_train(table, 10, 0, &trace);
    CHECK(trace.stopped_early);
    CHECK_FALSE(trace.constant_beaten_every_round);
    REQUIRE(model.rounds.size() == 1);
    CHECK(model.rounds[0].alpha == 0.0);
    CHECK(ensemble_predict(model, column({0.9, 0.9})).probability.value() == 0.5);
}

TEST_CASE("realboost toy table matches the brute-force oracle")
{
    const auto table = make_table({{0.9, 0.2, 0.7, 0.4, 0.6},
                                   {0.6, 0.4, std::nullopt, 0.3, 0.8},
                                   {0.5, 0.5, 0.5, 0.5, 0.5},
                                   {0.2, 0.9, 0.3, 0.6, 0.4}},
                                  {1, -1, 1, -1, 1});
    const auto model = realboost_train(table, 3);
    const auto expected =
        oracle::realboost(dense(impute(table, {ImputationMode::Half, 0})), labels(table), 3);
    check_against_oracle(model, expected, table);
}

TEST_CASE("oracle agreement on random small tables")
{
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 100; ++trial) {
        const auto table = testing_support::random_table(rng, 1 + rng() % 5, 1 + rng() % 8);
        const std::size_t rounds = 1 + rng() % 5;
        const std::uint64_t seed = rng();
        check_against_oracle(adaboost_train(table, rounds, seed),
                             oracle::adaboost(dense(impute(table, {ImputationMode::Random, seed})),
                                              labels(table), rounds),
                             table);
        check_against_oracle(realboost_train(table, rounds),
                             oracle::realboost(dense(impute(table, {ImputationMode::Half, 0})),
                                               labels(table), rounds),
                             table);
    }
}

TEST_CASE("realboost uninformative forecaster has objective exactly 1")
{
    const auto table = make_table({{0.5, std::nullopt, 0.5}}, {1, -1, 1});
    TrainingTrace trace;
    const auto model = realboost_train(table, 5, &trace);
    for (const auto& r : trace.rounds) {
        CHECK(r.objective == 1.0);
        CHECK(r.risk == 1.0);
    }
    CHECK(ensemble_predict(model, column({0.5})).probability.value() == 0.5);
}

TEST_CASE("realboost picks a perfect forecaster first")
{
    const double d = 1e-6;
    const auto table = make_table({{0.6, 0.5, 0.3, 0.7},
                                   {1 - d, d, d, 1 - d},
                                   {0.8, 0.2, 0.4, 0.6}},
                                  {1, -1, -1, 1});
    const auto model = realboost_train(table, 1);
    CHECK(model.rounds[0].forecaster == 1);
}

TEST_CASE("realboost risk follows the per-round objective")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto table = testing_support::random_table(rng, 1 + rng() % 6, 2 + rng() % 10);
        TrainingTrace trace;
        const auto model = realboost_train(table, 8, &trace);

        // Best single-forecaster risk is the first round's objective.
        const auto filled = impute(table, {ImputationMode::Half, 0});
        double best_single = INFINITY;
        for (std::size_t f = 0; f < table.num_forecasters(); ++f) {
            double r = 0.0;
            for (std::size_t i = 0; i < table.num_questions(); ++i)
                r += std::exp(-sign(table.outcome(i)) * log_odds_prediction(filled.at(f, i)));
            best_single = std::min(best_single, r / static_cast<double>(table.num_questions()));
        }
        CHECK(trace.rounds[0].risk == doctest::Approx(best_single).epsilon(1e-12));

        double previous = 1.0;
        bool all_below_one = true;
        for (const auto& r : trace.rounds) {
            CHECK(r.risk == doctest::Approx(previous * r.objective).epsilon(1e-9));
            if (r.objective <= 1.0) CHECK(r.risk <= previous * (1 + 1e-12));
            else all_below_one = false;
            previous = r.risk;
        }
        CHECK(trace.constant_beaten_every_round == all_below_one);
        if (all_below_one) CHECK(trace.rounds.back().risk <= best_single * (1 + 1e-12));
        CHECK(model.rounds.size() == 8);
    }
}

TEST_CASE("boosted prediction maps margins through the inverse link")
{
    const auto table = make_table({{0.5, 0.5}, {0.7, 0.3}}, {1, -1});
    const auto model = realboost_train(table, 3);
    REQUIRE(model.rounds[0].forecaster == 1);
    CHECK(ensemble_predict(model, column({0.9, 0.5})).probability.value() == 0.5);
    CHECK(ensemble_predict(model, column({0.9, std::nullopt})).margin.value() == 0.0);

    const auto link = make_link(LinkName::Exponential);
    for (int k = -60; k <= 60; ++k) {
        const double v = k / 10.0;
        CHECK(std::abs(link.link(link.inverse_link(v)) - v) < 1e-10);
    }
    const auto p = ensemble_predict(model, column({0.1, 0.8}));
    CHECK(p.probability.value() == doctest::Approx(link.inverse_link(p.margin.value())));
    CHECK(p.margin.value() == doctest::Approx(3 * log_odds_prediction(0.8)));
}

TEST_CASE("ensemble_predict checks the forecast count")
{
    const auto model = bag(make_table({{0.4}, {0.6}}, {1}));
    CHECK_THROWS_AS(ensemble_predict(model, column({0.4})), std::invalid_argument);
}

TEST_CASE("training preconditions")
{
    const auto table = make_table({{0.4}}, {1});
    CHECK_THROWS_AS(adaboost_train(table, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(realboost_train(table, 0), std::invalid_argument);
    const ForecastTable empty({}, {}, {}, {});
    CHECK_THROWS_AS(realboost_train(empty, 3), std::invalid_argument);
    CHECK_THROWS_AS(adaboost_train(empty, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(bag(empty), std::invalid_argument);
}

TEST_CASE("model invariants on random tables")
{
    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 50; ++trial) {
        const auto table = testing_support::random_table(rng, 1 + rng() % 6, 1 + rng() % 10);
        const std::uint64_t seed = rng();
        for (auto method : {Method::Bagging, Method::AdaBoost, Method::RealBoost}) {
            const auto model = train(method, table, 12, seed);
            CHECK_NOTHROW(model.validate());
            std::set<std::size_t> ids;
            for (const auto& r : model.rounds) {
                ids.insert(r.forecaster);
                if (method == Method::AdaBoost) CHECK(r.alpha >= 0.0);
            }
            CHECK(model.unique_forecasters() == ids.size());
            CHECK(train(method, table, 12, seed) == model);
        }
    }
}

}
