#include "crowdboost/links_losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace crowdboost {

std::string_view to_string(LinkName name) noexcept
{
    switch (name) {
    case LinkName::Exponential: return "exponential";
    case LinkName::Linear: return "linear";
    }
    return "unknown";
}

LinkName parse_link_name(std::string_view text)
{
    if (text == "exponential") return LinkName::Exponential;
    if (text == "linear") return LinkName::Linear;
    throw std::invalid_argument("unknown link: " + std::string(text));
}

LinkSpec::LinkSpec(LinkName name, double clip) : name_(name), clip_(clip)
{
    if (!(clip > 0.0 && clip < 0.5))
        throw std::invalid_argument("link clip must lie in (0, 0.5)");
}

double LinkSpec::loss(double v) const
{
    if (name_ == LinkName::Exponential)
        return std::exp(-v);
    return (1.0 - v) * (1.0 - v);
}

double LinkSpec::link(double eta) const
{
    if (name_ == LinkName::Exponential) {
        // At the clip bounds use the exact complement so 1 - p does not cancel.
        if (eta <= clip_) return -0.5 * std::log((1.0 - clip_) / clip_);
        if (eta >= 1.0 - clip_) return 0.5 * std::log((1.0 - clip_) / clip_);
        return 0.5 * std::log(eta / (1.0 - eta));
    }
    return 2.0 * eta - 1.0;
}

double LinkSpec::inverse_link(double v) const
{
    if (name_ == LinkName::Exponential) {
        // Evaluate on the side where the exponential cannot overflow.
        if (v >= 0.0)
            return 1.0 / (1.0 + std::exp(-2.0 * v));
        const double e = std::exp(2.0 * v);
        return e / (1.0 + e);
    }
    return std::clamp((v + 1.0) / 2.0, 0.0, 1.0);
}

double LinkSpec::min_cond_risk(double eta) const
{
    if (name_ == LinkName::Exponential)
        return 2.0 * std::sqrt(eta * (1.0 - eta));
    return 4.0 * eta * (1.0 - eta);
}

double LinkSpec::min_cond_risk_derivative(double eta) const
{
    if (name_ == LinkName::Exponential)
        return (1.0 - 2.0 * eta) / std::sqrt(eta * (1.0 - eta));
    return 4.0 - 8.0 * eta;
}

LinkSpec make_link(LinkName name) { return LinkSpec(name); }

LinkSpec make_link(std::string_view name) { return LinkSpec(parse_link_name(name)); }

double reconstruct_loss(const LinkSpec& link, double v)
{
    const double eta = link.inverse_link(v);
    return link.min_cond_risk(eta) + (1.0 - eta) * link.min_cond_risk_derivative(eta);
}

double conditional_risk(const LinkSpec& link, double eta, double v)
{
    return eta * link.loss(v) + (1.0 - eta) * link.loss(-v);
}

ScoringRule::ScoringRule(Fn j, Fn j_prime, double clip)
    : j_(std::move(j)), j_prime_(std::move(j_prime)), clip_(clip)
{
    if (!j_ || !j_prime_)
        throw std::invalid_argument("scoring rule needs J and J'");
}

double ScoringRule::score_positive(double eta) const
{
    return j_(eta) + (1.0 - eta) * j_prime_(eta);
}

double ScoringRule::score_negative(double eta) const
{
    return j_(eta) - eta * j_prime_(eta);
}

double ScoringRule::expected(double eta, double eta_hat) const
{
    return eta * score_positive(eta_hat) + (1.0 - eta) * score_negative(eta_hat);
}

double ScoringRule::clamp_forecast(double eta) const
{
    return std::clamp(eta, clip_, 1.0 - clip_);
}

ScoringRule savage_scores(ScoringRule::Fn j, ScoringRule::Fn j_prime)
{
    return ScoringRule(std::move(j), std::move(j_prime));
}

ScoringRule scoring_rule_for(const LinkSpec& link)
{
    return ScoringRule([link](double eta) { return -link.min_cond_risk(eta); },
                       [link](double eta) { return -link.min_cond_risk_derivative(eta); },
                       link.clip());
}

}  // namespace crowdboost
