#pragma once

// Per-round integrated-variance moment proxies.
//
//   E[IV]   ~ realized variance        sum_t r_t^2
//   Var(IV) ~ Newey-West long-run var  T * (g_0 + 2 sum_{k=1..L} w_k g_k),  w_k = 1 - k/(L+1)
//
// where g_k is the divisor-T autocovariance of the squared returns.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ela/error.hpp"
#include "ela/types.hpp"

namespace ela {

inline constexpr std::size_t kDefaultWindow = 60;
inline constexpr std::size_t kDefaultLag = 5;

struct IvMoments {
    long long round_id = 0;
    double e_iv = 0.0;
    double var_iv = 0.0;
    std::size_t T = 0;
    std::size_t L = 0;
    bool floored = false;  // raw Newey-West value was negative and clamped to 0
};

namespace detail {

inline void require_finite(std::span<const double> returns) {
    if (returns.empty()) throw ValidationError("empty return vector");
    for (std::size_t i = 0; i < returns.size(); ++i) {
        if (!std::isfinite(returns[i]))
            throw ValidationError("non-finite return at index " + std::to_string(i));
    }
}

}  // namespace detail

inline double realized_variance(std::span<const double> returns) {
    detail::require_finite(returns);
    double s = 0.0;
    for (double r : returns) s += r * r;
    return s;
}

/// Autocovariance of squared returns at lag k, divisor T (not T - k).
inline double sq_return_autocov(std::span<const double> returns, std::size_t k) {
    detail::require_finite(returns);
    const std::size_t T = returns.size();
    if (T < 2 || k > T - 2)
        throw ArgumentError("lag " + std::to_string(k) + " out of range for T = " + std::to_string(T));

    double mean_sq = 0.0;
    for (double r : returns) mean_sq += r * r;
    mean_sq /= static_cast<double>(T);

    double acc = 0.0;
    for (std::size_t t = 0; t + k < T; ++t) {
        const double a = returns[t + k] * returns[t + k] - mean_sq;
        const double b = returns[t] * returns[t] - mean_sq;
        acc += a * b;
    }
    return acc / static_cast<double>(T);
}

/// Bartlett weight 1 - k/(L+1).
inline double bartlett_weight(std::size_t k, std::size_t L) {
    return 1.0 - static_cast<double>(k) / static_cast<double>(L + 1);
}

struct NeweyWestResult {
    double value = 0.0;  // floored at 0
    double raw = 0.0;
    bool floored = false;
};

inline NeweyWestResult newey_west_detail(std::span<const double> returns, std::size_t T, std::size_t L) {
    if (returns.size() != T)
        throw ArgumentError("return vector has length " + std::to_string(returns.size()) + ", expected T = " +
                            std::to_string(T));
    if (T < 2 || L >= T - 1)
        throw ArgumentError("lag truncation L = " + std::to_string(L) + " requires L < T - 1 (T = " +
                            std::to_string(T) + ")");
    detail::require_finite(returns);

    const double n = static_cast<double>(T);
    std::vector<double> dev(T);
    double mean_sq = 0.0;
    for (double r : returns) mean_sq += r * r;
    mean_sq /= n;
    for (std::size_t t = 0; t < T; ++t) dev[t] = returns[t] * returns[t] - mean_sq;

    auto gamma = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + k < T; ++t) acc += dev[t + k] * dev[t];
        return acc / n;
    };

    double s = gamma(0);
    for (std::size_t k = 1; k <= L; ++k) s += 2.0 * bartlett_weight(k, L) * gamma(k);

    NeweyWestResult out;
    out.raw = n * s;
    out.floored = out.raw < 0.0;
    out.value = out.floored ? 0.0 : out.raw;
    return out;
}

inline double newey_west_var_iv(std::span<const double> returns, std::size_t T, std::size_t L) {
    return newey_west_detail(returns, T, L).value;
}

inline IvMoments moments_from_returns(long long round_id, std::span<const double> returns, std::size_t L) {
    const auto nw = newey_west_detail(returns, returns.size(), L);
    IvMoments m;
    m.round_id = round_id;
    m.e_iv = realized_variance(returns);
    m.var_iv = nw.value;
    m.T = returns.size();
    m.L = L;
    m.floored = nw.floored;
    return m;
}

/// Both moment proxies for one round's return window.
inline IvMoments round_moments(const ReturnWindow& window, std::size_t L = kDefaultLag) {
    return moments_from_returns(window.round_id, window.returns, L);
}

}  // namespace ela
