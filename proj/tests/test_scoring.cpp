#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "crowdboost/scoring.hpp"

using namespace crowdboost;

namespace {

const ScoringRule& exp_rule()
{
    static const ScoringRule rule = scoring_rule_for(make_link(LinkName::Exponential));
    return rule;
}

struct Sample {
    std::vector<double> forecasts;
    std::vector<Outcome> outcomes;
};

// Forecasts uniform on [0,1]; outcomes drawn from the forecast itself.
Sample calibrated_sample(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Sample s;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = u(rng);
        s.forecasts.push_back(f);
        s.outcomes.push_back(u(rng) < f ? Outcome::Positive : Outcome::Negative);
    }
    return s;
}

}  // namespace

TEST_SUITE("scoring") {

TEST_CASE("empirical_score examples")
{
    const std::vector<Outcome> pos{Outcome::Positive};
    // I_1(1 - 1e-6) = -sqrt(1e-6 / (1 - 1e-6)), evaluated to 40 digits offline.
    CHECK(empirical_score(std::vector<double>{1.0}, pos, exp_rule()) ==
          doctest::Approx(-0.0010000005000003750003).epsilon(1e-12));

    CHECK(empirical_score(std::vector<double>{0.5, 0.5},
                          std::vector<Outcome>{Outcome::Positive, Outcome::Negative}, exp_rule()) ==
          -1.0);

    CHECK(empirical_score(std::vector<double>{0.3}, pos, exp_rule()) ==
          exp_rule().score_positive(0.3));
}

TEST_CASE("empirical_score and decompose reject bad input")
{
    const std::vector<double> none;
    const std::vector<Outcome> no_outcomes;
    CHECK_THROWS_AS(empirical_score(none, no_outcomes, exp_rule()), std::invalid_argument);
    CHECK_THROWS_AS(decompose(none, no_outcomes, exp_rule(), 10), std::invalid_argument);
    CHECK_THROWS_AS(decompose(std::vector<double>{0.2}, std::vector<Outcome>{Outcome::Positive},
                              exp_rule(), 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(empirical_score(std::vector<double>{0.2, 0.3},
                                    std::vector<Outcome>{Outcome::Positive}, exp_rule()),
                    std::invalid_argument);
}

TEST_CASE("decompose: constant 0.5 forecasts with balanced outcomes")
{
    const std::vector<double> f(10, 0.5);
    std::vector<Outcome> y;
    for (int i = 0; i < 10; ++i) y.push_back(i % 2 ? Outcome::Positive : Outcome::Negative);
    const auto r = decompose(f, y, exp_rule(), 10);
    CHECK(r.refinement == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(r.calibration) < 1e-15);
    CHECK(r.per_bin[5].count == 10);
    CHECK(r.per_bin[5].frequency == 0.5);
}

TEST_CASE("decompose: honest definite forecaster is ideal")
{
    const std::vector<double> f(20, 1.0 - 1e-6);
    const std::vector<Outcome> y(20, Outcome::Positive);
    const auto r = decompose(f, y, exp_rule(), 10);
    CHECK(std::abs(r.refinement) < 1e-15);
    CHECK(std::abs(r.total) < 2e-3);
    CHECK(r.per_bin[9].count == 20);
}

TEST_CASE("decompose: forecast 1.0 lands in the top bin")
{
    const auto r = decompose(std::vector<double>{1.0, 0.0}, std::vector<Outcome>{Outcome::Positive,
                                                                                Outcome::Negative},
                             exp_rule(), 4);
    CHECK(r.per_bin[3].count == 1);
    CHECK(r.per_bin[0].count == 1);
    CHECK(r.per_bin[1].count == 0);
}

TEST_CASE("decompose: additivity and non-positive calibration on arbitrary inputs")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const std::size_t bins = 1 + rng() % 25;
        std::vector<double> f;
        std::vector<Outcome> y;
        for (std::size_t i = 0; i < n; ++i) {
            const double kind = u(rng);
            f.push_back(kind < 0.1 ? 0.0 : kind < 0.2 ? 1.0 : u(rng));
            y.push_back(u(rng) < 0.5 ? Outcome::Positive : Outcome::Negative);
        }
        for (const auto* rule : {&exp_rule()}) {
            const auto r = decompose(f, y, *rule, bins);
            CHECK(std::abs(r.total - (r.calibration + r.refinement)) < 1e-10);
            CHECK(r.calibration <= 1e-12);

            // total equals the plain score after replacing each forecast by its bin mean.
            std::vector<double> binned;
            for (double x : f) {
                const auto b = std::min(static_cast<std::size_t>(x * bins), bins - 1);
                binned.push_back(r.per_bin[b].mean_forecast);
            }
            CHECK(r.total == doctest::Approx(empirical_score(binned, y, *rule)).epsilon(1e-10));
        }
        const auto lin = decompose(f, y, scoring_rule_for(make_link(LinkName::Linear)), bins);
        CHECK(std::abs(lin.total - (lin.calibration + lin.refinement)) < 1e-10);
        CHECK(lin.calibration <= 1e-12);
    }
}

TEST_CASE("decompose: calibrated forecaster has near-zero calibration term")
{
    const auto s = calibrated_sample(100000, 2024);
    const auto r = decompose(s.forecasts, s.outcomes, exp_rule(), 10);
    CHECK(std::abs(r.calibration) < 0.02);
    CHECK(std::abs(r.total - (r.calibration + r.refinement)) < 1e-10);
}

TEST_CASE("refinement grows when calibrated mass is sharpened")
{
    // Calibrated: 100 forecasts of 0.5 with balanced outcomes, 100 definite ones.
    std::vector<double> f;
    std::vector<Outcome> y;
    for (int i = 0; i < 100; ++i) {
        f.push_back(0.5);
        y.push_back(i % 2 ? Outcome::Positive : Outcome::Negative);
    }
    for (int i = 0; i < 100; ++i) {
        f.push_back(i % 2 ? 1.0 : 0.0);
        y.push_back(i % 2 ? Outcome::Positive : Outcome::Negative);
    }
    const double before = decompose(f, y, exp_rule(), 10).refinement;
    for (int i = 0; i < 100; ++i) f[i] = (y[i] == Outcome::Positive) ? 1.0 : 0.0;
    const double after = decompose(f, y, exp_rule(), 10).refinement;
    CHECK(after >= before);
    CHECK(after == doctest::Approx(0.0));
}

TEST_CASE("minimum exponential risk of a calibrated forecaster equals minus its refinement")
{
    const auto s = calibrated_sample(100000, 77);
    const auto link = make_link(LinkName::Exponential);
    double risk = 0.0;
    for (std::size_t i = 0; i < s.forecasts.size(); ++i)
        risk += link.loss(sign(s.outcomes[i]) * link.link(s.forecasts[i]));
    risk /= static_cast<double>(s.forecasts.size());
    const auto r = decompose(s.forecasts, s.outcomes, exp_rule(), 10);
    CHECK(std::abs(risk + r.refinement) < 0.02);
}

}
