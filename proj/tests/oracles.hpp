#pragma once

// Independent reference computations used by the unit and acceptance tests. Nothing here calls into
// the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ela/types.hpp"

namespace oracle {

/// Bartlett-weighted long-run variance of squared returns, as a double sum over all index pairs.
inline double newey_west_double_loop(const std::vector<double>& r, std::size_t L) {
    const std::size_t T = r.size();
    double mean = 0.0;
    for (double x : r) mean += x * x;
    mean /= static_cast<double>(T);
    double v = 0.0;
    for (std::size_t s = 0; s < T; ++s) {
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t k = s > t ? s - t : t - s;
            if (k > L) continue;
            const double w = 1.0 - static_cast<double>(k) / static_cast<double>(L + 1);
            v += w * (r[s] * r[s] - mean) * (r[t] * r[t] - mean);
        }
    }
    return v;
}

struct Row {
    double y;
    double x1;
    double x2;
    bool censored;
};

/// Straight-line Tobit log-likelihood on raw rows via Boost distribution objects.
/// loglog: y and the censor point are natural logs of wei.
inline double tobit_loglik(const std::vector<Row>& rows, const std::vector<double>& theta,
                           const std::vector<double>& gamma, double nu, bool student, bool loglog, double censor) {
    double ll = 0.0;
    for (const auto& r : rows) {
        const double l1 = std::log(r.x1), l2 = std::log(r.x2);
        const double a1 = loglog ? l1 : r.x1, a2 = loglog ? l2 : r.x2;
        const double mu = theta[0] + theta[1] * a1 + theta[2] * a2;
        const double sig = std::exp(gamma[0] + gamma[1] * l1 + gamma[2] * l2);
        if (student) {
            boost::math::students_t_distribution<double> t(nu);
            ll += r.censored ? std::log(boost::math::cdf(t, (censor - mu) / sig))
                             : std::log(boost::math::pdf(t, (r.y - mu) / sig) / sig);
        } else {
            boost::math::normal_distribution<double> g;
            ll += r.censored ? std::log(boost::math::cdf(g, (censor - mu) / sig))
                             : std::log(boost::math::pdf(g, (r.y - mu) / sig) / sig);
        }
    }
    return ll;
}

/// Rows with well-conditioned regressors and a censored latent linear response.
inline ela::RoundDataset linear_rows(std::size_t n, std::uint64_t seed, const std::vector<double>& theta,
                                     double sigma, double nu) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> z;
    std::student_t_distribution<double> t(nu);
    ela::RoundDataset d;
    for (std::size_t i = 0; i < n; ++i) {
        ela::DatasetRow r;
        r.round_id = static_cast<std::int64_t>(i);
        r.bidder = "b";
        r.x1 = 20.0 * std::exp(0.25 * z(g));
        r.x2 = 30.0 * std::exp(0.25 * z(g));
        const double y = theta[0] + theta[1] * r.x1 + theta[2] * r.x2 + sigma * t(g);
        r.censored = y <= 1.0;
        r.bid_scaled = r.censored ? 1.0 : y;
        r.p_start = 3000.0;
        d.rows.push_back(r);
    }
    return d;
}

inline double sample_sd(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
