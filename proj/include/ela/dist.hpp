#pragma once

// Log densities and log CDFs for the standard Student-t and standard normal.
// Tails are handled in log space so censored likelihood terms stay finite far from the centre.

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ela/error.hpp"

namespace ela {

namespace detail {

inline void require_dof(double nu) {
    if (!(nu > 0.0)) throw DomainError("degrees of freedom must be positive");
}

}  // namespace detail

/// log Gamma((nu+1)/2) - log Gamma(nu/2) - log(nu*pi)/2, stable for very large nu.
inline double t_log_norm_const(double nu) {
    detail::require_dof(nu);
    const double log_ratio = -std::log(boost::math::tgamma_delta_ratio(nu / 2.0, 0.5));
    return log_ratio - 0.5 * std::log(nu * std::numbers::pi);
}

inline double t_log_density(double x, double nu) {
    if (!std::isfinite(x)) throw DomainError("t_log_density: non-finite argument");
    return t_log_norm_const(nu) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

/// P(T_nu <= -|x|), via the regularized incomplete beta on whichever side is better conditioned.
inline double t_lower_tail(double x, double nu) {
    detail::require_dof(nu);
    const double x2 = x * x;
    if (x2 < nu) return 0.5 * boost::math::ibetac(0.5, nu / 2.0, x2 / (nu + x2));
    return 0.5 * boost::math::ibeta(nu / 2.0, 0.5, nu / (nu + x2));
}

inline double t_log_cdf(double x, double nu) {
    detail::require_dof(nu);
    if (std::isnan(x)) throw DomainError("t_log_cdf: NaN argument");
    if (x == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    const double tail = t_lower_tail(x, nu);
    return x < 0.0 ? std::log(tail) : std::log1p(-tail);
}

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

inline double normal_log_density(double x) {
    if (!std::isfinite(x)) throw DomainError("normal_log_density: non-finite argument");
    return -0.5 * x * x - kHalfLog2Pi;
}

/// log Phi(x). Uses the Mills-ratio continued fraction below x = -20 where erfc underflows.
inline double normal_log_cdf(double x) {
    if (std::isnan(x)) throw DomainError("normal_log_cdf: NaN argument");
    if (x == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
    if (x > 0.0) return std::log1p(-0.5 * boost::math::erfc(x / std::numbers::sqrt2));
    if (x > -20.0) return std::log(0.5 * boost::math::erfc(-x / std::numbers::sqrt2));
    // R(u) = 1 / (u + 1/(u + 2/(u + 3/(u + ...)))), Phi(-u) = phi(u) R(u)
    const double u = -x;
    double frac = u;
    for (int k = 60; k >= 1; --k) frac = u + k / frac;
    return normal_log_density(u) - std::log(frac);
}

}  // namespace ela
