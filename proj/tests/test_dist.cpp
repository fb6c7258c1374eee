#include <cmath>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "catch_amalgamated.hpp"
#include "ela/dist.hpp"

using namespace ela;
using Catch::Approx;

namespace {

double kernel(double x, double nu) { return std::pow(1.0 + x * x / nu, -(nu + 1.0) / 2.0); }

double quad_norm(double nu) {
    boost::math::quadrature::sinh_sinh<double> q;
    return q.integrate([nu](double x) { return kernel(x, nu); });
}

double quad_cdf(double x, double nu) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate([nu](double t) { return kernel(t, nu); }, -std::numeric_limits<double>::infinity(), x) /
           quad_norm(nu);
}

}  // namespace

TEST_CASE("t density closed forms", "[dist]") {
    CHECK(t_log_density(0.0, 1.0) == Approx(-std::log(std::numbers::pi)).epsilon(1e-14));
    CHECK(t_log_density(0.0, 1e6) == Approx(-0.5 * std::log(2 * std::numbers::pi)).margin(1e-6));
    CHECK_THROWS_AS(t_log_density(0.0, 0.0), DomainError);
}

TEST_CASE("t density against quadrature normalization", "[dist]") {
    for (double nu : {0.5, 1.3, 3.0, 10.0, 60.0}) {
        const double log_norm = std::log(quad_norm(nu));
        for (double x : {-40.0, -3.0, -0.2, 0.0, 1.1, 8.0}) {
            INFO("nu=" << nu << " x=" << x);
            CHECK(t_log_density(x, nu) == Approx(std::log(kernel(x, nu)) - log_norm).margin(1e-10));
        }
    }
}

TEST_CASE("t cdf closed forms", "[dist]") {
    CHECK(t_log_cdf(0.0, 2.7) == Approx(std::log(0.5)).epsilon(1e-15));
    CHECK(t_log_cdf(1.0, 1.0) == Approx(std::log(0.75)).epsilon(1e-14));
    CHECK(t_log_cdf(-std::numeric_limits<double>::infinity(), 2.0) == -std::numeric_limits<double>::infinity());
    CHECK(t_log_cdf(std::numeric_limits<double>::infinity(), 2.0) == 0.0);
}

TEST_CASE("t cdf against quadrature", "[dist]") {
    for (double nu : {0.5, 1.3, 3.0, 10.0, 60.0}) {
        for (double x : {-30.0, -4.0, -1.0, 0.3, 2.0, 12.0}) {
            INFO("nu=" << nu << " x=" << x);
            CHECK(t_log_cdf(x, nu) == Approx(std::log(quad_cdf(x, nu))).margin(1e-9));
        }
    }
}

TEST_CASE("t cdf keeps precision deep in both tails", "[dist]") {
    // upper tail: log(1 - tiny) should not collapse to 0
    const double upper = t_log_cdf(1e4, 1.3);
    CHECK(upper < 0.0);
    const boost::math::students_t t(1.3);
    CHECK(upper == Approx(std::log1p(-boost::math::cdf(boost::math::complement(t, 1e4)))).epsilon(1e-12));
    CHECK(std::isfinite(t_log_cdf(-1e12, 0.8)));
}

TEST_CASE("normal helpers", "[dist]") {
    CHECK(normal_log_density(0.0) == Approx(-kHalfLog2Pi).epsilon(1e-15));
    CHECK(normal_log_cdf(0.0) == Approx(std::log(0.5)).epsilon(1e-15));
    CHECK(normal_log_cdf(1.5) == Approx(std::log(0.5 * std::erfc(-1.5 / std::numbers::sqrt2))).epsilon(1e-14));
    for (double x : {-40.0, -100.0}) {
        const double x2 = x * x;
        const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
        const double asym = -0.5 * x2 - std::log(-x) - kHalfLog2Pi + std::log(series);
        CHECK(normal_log_cdf(x) == Approx(asym).epsilon(1e-12));
    }
    // continuity across the switch to the continued fraction
    CHECK(normal_log_cdf(-20.0 + 1e-9) == Approx(normal_log_cdf(-20.0 - 1e-9)).epsilon(1e-9));
}
