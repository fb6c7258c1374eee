#pragma once

// Synthetic auction rounds with known ground truth.
//
// Volatility: h_r, the log per-second variance during round r, follows a stationary AR(1)
//     h_r = mu + phi (h_{r-1} - mu) + s_r eta_r,   s_r = s exp(d zeta_r)
// with s_r known before the round (d = 0 gives a constant innovation sd). IV_r = T exp(h_r), so
// conditional on information at the deadline IV_r is lognormal with closed-form mean and variance;
// those moments become the regressors x1 = E[IV]/sqrt(P) * 1e9 and x2 = Var(IV) * 1e12.
//
// Reduced mode draws latent valuations from the censored-regression model directly.
// Structural mode builds valuations from (alpha, beta, rho) and forecasts, bids truthfully, and
// clears each round as a second-price auction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ela/auction_model.hpp"
#include "ela/config.hpp"
#include "ela/csv.hpp"
#include "ela/error.hpp"
#include "ela/types.hpp"

namespace ela {

struct VolProcess {
    double mean = -18.3;         // log per-second variance; exp(-18.3) ~ 60% annualized
    double persistence = 0.95;
    double innovation_sd = 0.3;
    double vov_dispersion = 0.5;  // sd of log innovation-sd multiplier
};

enum class SimMode { reduced, structural };

struct SimConfig {
    std::size_t n_rounds = 50'000;
    std::size_t n_bidders = 2;
    std::vector<std::string> bidders;  // defaults to bidder0, bidder1, ...
    double reserve = 1.0;              // bid units (1e15 wei)
    std::vector<double> theta_true{1.0, 0.35, -2.1};
    std::vector<double> scale_true{-2.3, 1.1, -0.3};
    double nu_true = 1.3;
    VolProcess vol;
    std::size_t T = 60;
    double price0 = 3000.0;
    std::uint64_t seed = 42;
    std::int64_t start_ms = 1'746'057'600'000;  // 2025-05-01T00:00:00Z
    SimMode mode = SimMode::reduced;
    // structural mode, one entry per bidder (a single entry is broadcast)
    std::vector<double> alpha{2.0};
    std::vector<double> beta{2.0e5};
    std::vector<double> rho{0.05};
    double forecast_noise = 0.0;  // relative sd of private forecast errors

    void validate() const {
        if (n_rounds == 0) throw ConfigError("n_rounds must be positive");
        if (n_bidders == 0) throw ConfigError("n_bidders must be positive");
        if (mode == SimMode::structural && n_bidders < 2) throw ConfigError("structural mode needs at least 2 bidders");
        if (!bidders.empty() && bidders.size() != n_bidders) throw ConfigError("bidders list must have n_bidders names");
        if (!(vol.persistence > -1.0 && vol.persistence < 1.0)) throw ConfigError("persistence must lie in (-1, 1)");
        if (!(vol.innovation_sd >= 0.0) || !(vol.vov_dispersion >= 0.0))
            throw ConfigError("volatility dispersion parameters must be non-negative");
        if (!std::isfinite(vol.mean)) throw ConfigError("vol mean must be finite");
        if (T == 0) throw ConfigError("T must be positive");
        if (!(price0 > 0.0)) throw ConfigError("price0 must be positive");
        if (!(reserve > 0.0)) throw ConfigError("reserve must be positive");
        if (theta_true.size() != 3 || scale_true.size() != 3) throw ConfigError("theta and gamma need 3 values each");
        if (!(nu_true > 0.0)) throw ConfigError("nu must be positive");
        if (mode == SimMode::structural) {
            for (const auto* v : {&alpha, &beta, &rho})
                if (v->size() != 1 && v->size() != n_bidders) throw ConfigError("structural parameters need 1 or n_bidders values");
            for (double r : rho)
                if (!(r > 0.0)) throw ConfigError("rho must be positive");
        }
        if (forecast_noise < 0.0) throw ConfigError("forecast_noise must be non-negative");
    }

    std::string bidder_name(std::size_t i) const { return bidders.empty() ? "bidder" + std::to_string(i) : bidders[i]; }
};

inline SimConfig sim_config_from(const KeyValueConfig& kv, SimConfig c = {}) {
    c.n_rounds = kv.get_int<std::size_t>("n_rounds", c.n_rounds);
    c.n_bidders = kv.get_int<std::size_t>("n_bidders", c.n_bidders);
    c.bidders = kv.get_strings("bidders", c.bidders);
    if (kv.has("bidders") && !kv.has("n_bidders")) c.n_bidders = c.bidders.size();
    c.reserve = kv.get_double("reserve", c.reserve);
    c.theta_true = kv.get_doubles("theta", c.theta_true);
    c.scale_true = kv.get_doubles("gamma", c.scale_true);
    c.nu_true = kv.get_double("nu", c.nu_true);
    c.vol.mean = kv.get_double("vol_mean", c.vol.mean);
    c.vol.persistence = kv.get_double("vol_persistence", c.vol.persistence);
    c.vol.innovation_sd = kv.get_double("vol_sd", c.vol.innovation_sd);
    c.vol.vov_dispersion = kv.get_double("vov_dispersion", c.vol.vov_dispersion);
    c.T = kv.get_int<std::size_t>("T", c.T);
    c.price0 = kv.get_double("price0", c.price0);
    c.seed = kv.get_int<std::uint64_t>("seed", c.seed);
    c.start_ms = kv.get_int<std::int64_t>("start_ms", c.start_ms);
    const auto mode = kv.get_string("mode", c.mode == SimMode::reduced ? "reduced" : "structural");
    if (mode == "reduced")
        c.mode = SimMode::reduced;
    else if (mode == "structural")
        c.mode = SimMode::structural;
    else
        throw ConfigError("mode must be reduced or structural");
    c.alpha = kv.get_doubles("alpha", c.alpha);
    c.beta = kv.get_doubles("beta", c.beta);
    c.rho = kv.get_doubles("rho", c.rho);
    c.forecast_noise = kv.get_double("forecast_noise", c.forecast_noise);
    c.validate();
    return c;
}

/// Conditional mean and variance of IV = T exp(h), h ~ N(m, s^2).
struct IvForecast {
    double mean = 0.0;
    double variance = 0.0;
};

inline IvForecast lognormal_iv_moments(double m, double s, std::size_t T) {
    const double t = static_cast<double>(T);
    const double s2 = s * s;
    IvForecast f;
    f.mean = t * std::exp(m + 0.5 * s2);
    f.variance = t * t * std::exp(2.0 * m + s2) * std::expm1(s2);
    return f;
}

/// Stationary mean and variance of IV when the innovation sd is constant.
inline IvForecast stationary_iv_moments(const VolProcess& v, std::size_t T) {
    const double var_h = v.innovation_sd * v.innovation_sd / (1.0 - v.persistence * v.persistence);
    return lognormal_iv_moments(v.mean, std::sqrt(var_h), T);
}

struct SimRound {
    std::int64_t round_id = 0;
    std::int64_t round_start = 0;
    double h = 0.0;           // log per-second variance
    double e_iv = 0.0;        // conditional mean at the deadline
    double var_iv = 0.0;      // conditional variance at the deadline
    double iv = 0.0;          // realized integrated variance
    double p_start = 0.0;
};

struct SimTruth {
    std::vector<double> theta;
    std::vector<double> gamma;
    double nu = 0.0;
    std::vector<SimRound> rounds;
    std::vector<AuctionOutcome> outcomes;  // structural mode only
};

struct SimResult {
    RoundDataset data;
    SimTruth truth;
    std::optional<CandleSeries> candles;  // per-second bars when requested
    std::vector<BidRecord> bids;          // wei-denominated bids when candles are requested
};

inline SimResult simulate_rounds(const SimConfig& cfg, bool emit_market = false) {
    cfg.validate();
    const auto& v = cfg.vol;
    // independent streams so optional outputs never perturb the dataset
    std::mt19937_64 rng_vol(cfg.seed), rng_price(cfg.seed ^ 0x9E3779B97F4A7C15ULL), rng_bid(cfg.seed ^ 0xD1B54A32D192ED03ULL);
    // one distribution object per engine: normal_distribution caches its second draw
    std::normal_distribution<double> nd_vol(0.0, 1.0), nd_price(0.0, 1.0), nd_bid(0.0, 1.0);
    std::student_t_distribution<double> t_draw(cfg.nu_true);

    SimResult out;
    out.truth.theta = cfg.theta_true;
    out.truth.gamma = cfg.scale_true;
    out.truth.nu = cfg.nu_true;
    out.truth.rounds.reserve(cfg.n_rounds);
    out.data.rows.reserve(cfg.n_rounds * cfg.n_bidders);
    if (emit_market) {
        out.candles.emplace();
        out.candles->bar_ms = 1000;
        out.candles->bars.reserve(cfg.n_rounds * cfg.T + 1);
    }

    const double sd_h = v.innovation_sd / std::sqrt(1.0 - v.persistence * v.persistence);
    double h_prev = v.mean + sd_h * nd_vol(rng_vol);
    double price = cfg.price0;
    const double reserve_eth = cfg.reserve * 1e-3;
    auto pick = [](const std::vector<double>& xs, std::size_t i) { return xs.size() == 1 ? xs[0] : xs[i]; };

    std::vector<double> bids(cfg.n_bidders);
    for (std::size_t r = 0; r < cfg.n_rounds; ++r) {
        SimRound sr;
        sr.round_id = static_cast<std::int64_t>(r);
        sr.round_start = cfg.start_ms + static_cast<std::int64_t>(r) * kRoundMs;
        sr.p_start = price;

        const double s_r = v.innovation_sd * std::exp(v.vov_dispersion * nd_vol(rng_vol));
        const double m = v.mean + v.persistence * (h_prev - v.mean);
        const auto fc = lognormal_iv_moments(m, s_r, cfg.T);
        sr.e_iv = fc.mean;
        sr.var_iv = fc.variance;
        sr.h = m + s_r * nd_vol(rng_vol);
        sr.iv = static_cast<double>(cfg.T) * std::exp(sr.h);
        h_prev = sr.h;

        // per-second price path with variance exp(h) per bar
        const double sig = std::exp(0.5 * sr.h);
        for (std::size_t t = 0; t < cfg.T; ++t) {
            const double open = price;
            price *= std::exp(-0.5 * sig * sig + sig * nd_price(rng_price));
            if (emit_market) {
                Candle c;
                c.open_time = sr.round_start + static_cast<std::int64_t>(t) * 1000;
                c.open = open;
                c.close = price;
                c.high = std::max(open, price);
                c.low = std::min(open, price);
                c.volume = 1.0;
                out.candles->bars.push_back(c);
            }
        }

        const double x1 = sr.e_iv / std::sqrt(sr.p_start) * kX1Scale;
        const double x2 = sr.var_iv * kX2Scale;
        if (cfg.mode == SimMode::reduced) {
            const auto& th = cfg.theta_true;
            const auto& ga = cfg.scale_true;
            const double mu = th[0] + th[1] * x1 + th[2] * x2;
            const double sigma = std::exp(ga[0] + ga[1] * std::log(x1) + ga[2] * std::log(x2));
            for (std::size_t i = 0; i < cfg.n_bidders; ++i) bids[i] = mu + sigma * t_draw(rng_bid);
        } else {
            for (std::size_t i = 0; i < cfg.n_bidders; ++i) {
                BidderParams bp(pick(cfg.alpha, i), pick(cfg.beta, i), pick(cfg.rho, i));
                BidderBelief belief{sr.e_iv, sr.var_iv};
                if (cfg.forecast_noise > 0.0) {
                    belief.m_iv = std::max(0.0, belief.m_iv * (1.0 + cfg.forecast_noise * nd_bid(rng_bid)));
                    belief.v_iv = std::max(0.0, belief.v_iv * (1.0 + cfg.forecast_noise * nd_bid(rng_bid)));
                }
                const auto b = truthful_bid(valuation(bp, belief, sr.p_start), sr.p_start, reserve_eth);
                bids[i] = b.amount * 1e3;
            }
            std::vector<double> submitted(bids);
            for (auto& b : submitted) b = std::max(b, cfg.reserve);
            out.truth.outcomes.push_back(clear_auction(submitted, cfg.reserve, sr.round_id));
        }

        for (std::size_t i = 0; i < cfg.n_bidders; ++i) {
            DatasetRow row;
            row.round_id = sr.round_id;
            row.bidder = cfg.bidder_name(i);
            row.censored = bids[i] <= cfg.reserve;
            row.bid_scaled = row.censored ? cfg.reserve : bids[i];
            row.x1 = x1;
            row.x2 = x2;
            row.p_start = sr.p_start;
            row.round_start = sr.round_start;
            out.data.rows.push_back(row);
            if (emit_market) {
                BidRecord b;
                b.round_id = row.round_id;
                b.bidder = row.bidder;
                b.bid_wei = static_cast<std::uint64_t>(std::llround(row.bid_scaled * 1e15));
                b.round_start = row.round_start;
                b.deadline = b.round_start - kDeadlineOffsetMs;
                b.censored = row.censored;
                out.bids.push_back(std::move(b));
            }
        }
        out.truth.rounds.push_back(sr);
    }
    if (emit_market) {
        Candle c;
        c.open_time = cfg.start_ms + static_cast<std::int64_t>(cfg.n_rounds) * kRoundMs;
        c.open = c.close = c.high = c.low = price;
        c.volume = 1.0;
        out.candles->bars.push_back(c);
    }
    return out;
}

inline void write_truth(std::ostream& out, const SimTruth& t) {
    out << "parameter,value\n";
    for (std::size_t j = 0; j < t.theta.size(); ++j) out << "theta" << j << ',' << csv::format_double(t.theta[j]) << '\n';
    for (std::size_t j = 0; j < t.gamma.size(); ++j) out << "gamma" << j << ',' << csv::format_double(t.gamma[j]) << '\n';
    out << "nu," << csv::format_double(t.nu) << '\n';
}

inline void write_sim_rounds(std::ostream& out, const SimTruth& t) {
    out << "round_id,round_start_ms,log_var,e_iv,var_iv,iv,p_start\n";
    for (const auto& r : t.rounds) {
        out << r.round_id << ',' << r.round_start << ',' << csv::format_double(r.h) << ',' << csv::format_double(r.e_iv)
            << ',' << csv::format_double(r.var_iv) << ',' << csv::format_double(r.iv) << ','
            << csv::format_double(r.p_start) << '\n';
    }
}

/// Per-round clearing results with cumulative revenue, for plotting.
inline void write_outcomes(std::ostream& out, const std::vector<AuctionOutcome>& outcomes) {
    out << "round_id,winner,payment,cumulative_revenue\n";
    double cum = 0.0;
    for (const auto& o : outcomes) {
        if (o.winner) cum += o.payment;
        out << o.round_id << ',' << (o.winner ? std::to_string(*o.winner) : std::string("")) << ','
            << csv::format_double(o.winner ? o.payment : 0.0) << ',' << csv::format_double(cum) << '\n';
    }
}

}  // namespace ela
