#pragma once

// Proper-loss toolkit: matched (loss, optimal link, inverse link, minimum
// conditional risk) families and Savage scoring rules generated from a
// convex J.

#include <functional>
#include <string>
#include <string_view>

namespace crowdboost {

enum class LinkName { Exponential, Linear };

std::string_view to_string(LinkName name) noexcept;

/// Parses "exponential" or "linear"; throws std::invalid_argument otherwise.
LinkName parse_link_name(std::string_view text);

inline constexpr double kDefaultClip = 1e-6;

/// A proper margin loss together with its optimal link.
///
/// Exponential: phi(v) = exp(-v), f*(eta) = 0.5 log(eta / (1 - eta)) with eta
/// clipped to [clip, 1 - clip], inverse e^{2v} / (1 + e^{2v}),
/// C*(eta) = 2 sqrt(eta (1 - eta)).
///
/// Linear: phi(v) = (1 - v)^2, f*(eta) = 2 eta - 1, inverse (v + 1) / 2 clamped
/// to [0, 1], C*(eta) = 4 eta (1 - eta).
class LinkSpec {
public:
    explicit LinkSpec(LinkName name, double clip = kDefaultClip);

    LinkName name() const noexcept { return name_; }
    double clip() const noexcept { return clip_; }

    double loss(double v) const;
    double link(double eta) const;
    double inverse_link(double v) const;
    double min_cond_risk(double eta) const;
    double min_cond_risk_derivative(double eta) const;

    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;

private:
    LinkName name_;
    double clip_;
};

LinkSpec make_link(LinkName name);
LinkSpec make_link(std::string_view name);

/// phi(v) rebuilt from the minimum conditional risk and the inverse link:
/// C*(eta) + (1 - eta) C*'(eta) with eta = (f*)^{-1}(v).
double reconstruct_loss(const LinkSpec& link, double v);

/// eta phi(v) + (1 - eta) phi(-v).
double conditional_risk(const LinkSpec& link, double eta, double v);

/// Savage pair (I_1, I_-1) generated by a convex J.
class ScoringRule {
public:
    using Fn = std::function<double(double)>;

    ScoringRule(Fn j, Fn j_prime, double clip = kDefaultClip);

    double J(double eta) const { return j_(eta); }
    double J_prime(double eta) const { return j_prime_(eta); }

    /// I_1(eta) = J(eta) + (1 - eta) J'(eta)
    double score_positive(double eta) const;
    /// I_-1(eta) = J(eta) - eta J'(eta)
    double score_negative(double eta) const;

    double score(int label, double eta) const
    {
        return label > 0 ? score_positive(eta) : score_negative(eta);
    }

    /// Expected score eta I_1(eta_hat) + (1 - eta) I_-1(eta_hat).
    double expected(double eta, double eta_hat) const;

    /// Forecasts are clipped to [clip, 1 - clip] before scoring so that
    /// scores of definite forecasts stay finite.
    double clip() const noexcept { return clip_; }
    double clamp_forecast(double eta) const;

private:
    Fn j_;
    Fn j_prime_;
    double clip_;
};

ScoringRule savage_scores(ScoringRule::Fn j, ScoringRule::Fn j_prime);

/// J = -C* for the given loss family, so that I_1(eta) = -phi(f*(eta)).
ScoringRule scoring_rule_for(const LinkSpec& link);

}  // namespace crowdboost
