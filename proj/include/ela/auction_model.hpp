#pragma once

// Valuation theory for an ahead-of-time second-price auction on arbitrage rights.
//
// Profit from winning a round:     Pi = alpha + beta * IV * sqrt(P)
// Mean-variance certainty equiv.:  CE(X) = E[X] - rho/2 * Var(X)
// Valuation:                       v = alpha + beta * m * sqrt(P) - gamma * s * P,  gamma = rho * beta^2 / 2
// where (m, s) is the bidder's forecast mean and variance of IV.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ela/error.hpp"

namespace ela {

struct BidderParams {
    double alpha = 0.0;
    double beta = 0.0;
    double rho = 1.0;

    BidderParams() = default;
    BidderParams(double a, double b, double r) : alpha(a), beta(b), rho(r) {
        if (!(r > 0.0)) throw DomainError("risk aversion rho must be positive");
    }
    double gamma() const { return rho * beta * beta / 2.0; }
};

struct BidderBelief {
    double m_iv = 0.0;  // forecast mean of IV
    double v_iv = 0.0;  // forecast variance of IV
};

namespace detail {

inline void require_price(double p) {
    if (!(p > 0.0)) throw DomainError("price must be positive");
}

}  // namespace detail

/// Instantaneous loss-versus-rebalancing rate of a constant-product pool: L sqrt(P) / 4 * sigma^2.
inline double lvr_rate(double liquidity, double price, double sigma2) {
    detail::require_price(price);
    if (liquidity < 0.0) throw DomainError("liquidity must be non-negative");
    if (sigma2 < 0.0) throw DomainError("variance must be non-negative");
    return liquidity * std::sqrt(price) / 4.0 * sigma2;
}

/// Arbitrage reward over a round with the price frozen at its start: L sqrt(P0) / 4 * IV.
inline double round_reward(double liquidity, double p_start, double iv) {
    detail::require_price(p_start);
    if (liquidity < 0.0) throw DomainError("liquidity must be non-negative");
    if (iv < 0.0) throw DomainError("integrated variance must be non-negative");
    return liquidity * std::sqrt(p_start) / 4.0 * iv;
}

inline double profit(const BidderParams& b, double iv, double p_start) {
    detail::require_price(p_start);
    return b.alpha + b.beta * iv * std::sqrt(p_start);
}

inline double profit_mean(const BidderParams& b, const BidderBelief& belief, double p_start) {
    detail::require_price(p_start);
    return b.alpha + b.beta * belief.m_iv * std::sqrt(p_start);
}

inline double profit_variance(const BidderParams& b, const BidderBelief& belief, double p_start) {
    detail::require_price(p_start);
    return b.beta * b.beta * belief.v_iv * p_start;
}

inline double certainty_equivalent(double mean, double variance, double rho) {
    if (!(rho > 0.0)) throw DomainError("risk aversion rho must be positive");
    if (variance < 0.0) throw DomainError("variance must be non-negative");
    return mean - rho / 2.0 * variance;
}

inline double valuation(const BidderParams& b, const BidderBelief& belief, double p_start) {
    detail::require_price(p_start);
    return b.alpha + b.beta * belief.m_iv * std::sqrt(p_start) - b.gamma() * belief.v_iv * p_start;
}

struct Bid {
    double amount = 0.0;  // ETH
    bool censored = false;
};

/// Truthful bid in ETH: the USD valuation divided by the ETH price, submitted at the reserve
/// when it falls at or below it.
inline Bid truthful_bid(double valuation_usd, double p_start, double reserve) {
    detail::require_price(p_start);
    const double eth = valuation_usd / p_start;
    if (eth <= reserve) return {reserve, true};
    return {eth, false};
}

struct AuctionOutcome {
    long long round_id = 0;
    std::optional<std::size_t> winner;
    double payment = 0.0;
    std::vector<double> all_bids;
};

/// Second-price clearing with a reserve. The highest bid wins if it exceeds the reserve (ties go to
/// the lowest index) and pays max(second-highest bid, reserve).
inline AuctionOutcome clear_auction(std::span<const double> bids, double reserve, long long round_id = 0) {
    if (bids.empty()) throw ArgumentError("clear_auction: no bids");
    AuctionOutcome out;
    out.round_id = round_id;
    out.all_bids.assign(bids.begin(), bids.end());

    std::size_t top = 0;
    for (std::size_t i = 1; i < bids.size(); ++i)
        if (bids[i] > bids[top]) top = i;
    if (!(bids[top] > reserve)) return out;

    double second = reserve;
    for (std::size_t i = 0; i < bids.size(); ++i)
        if (i != top && bids[i] > second) second = bids[i];
    out.winner = top;
    out.payment = second;
    return out;
}

/// Realized second-price payoff of bidder `i` holding valuation `value`.
inline double auction_payoff(const AuctionOutcome& o, std::size_t i, double value) {
    return (o.winner && *o.winner == i) ? value - o.payment : 0.0;
}

}  // namespace ela
