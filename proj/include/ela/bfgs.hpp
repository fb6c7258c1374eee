#pragma once

// Dense BFGS minimizer with a strong-Wolfe line search. Intended for the small (<= 10 parameter)
// likelihood problems in this library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace ela {

/// Objective: returns f(x) and writes the gradient. Non-finite values are treated as +inf.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct BfgsOptions {
    int max_iter = 500;
    double grad_tol = 1e-6;  // max-norm
    double c1 = 1e-4;
    double c2 = 0.9;
    double max_step = 10.0;  // cap on the first trial step length (in parameter units)
};

struct BfgsResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

struct LinePoint {
    double a = 0.0;
    double f = 0.0;
    double d = 0.0;  // directional derivative
};

inline double safe_value(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

/// Minimizer of the cubic interpolating two points with derivatives, clamped into [lo, hi].
inline double cubic_min(const LinePoint& p, const LinePoint& q, double lo, double hi) {
    const double d1 = p.d + q.d - 3.0 * (p.f - q.f) / (p.a - q.a);
    const double disc = d1 * d1 - p.d * q.d;
    double a = 0.5 * (lo + hi);
    if (disc >= 0.0 && std::isfinite(d1)) {
        const double d2 = std::copysign(std::sqrt(disc), q.a - p.a);
        const double denom = q.d - p.d + 2.0 * d2;
        if (denom != 0.0) a = q.a - (q.a - p.a) * (q.d + d2 - d1) / denom;
    }
    const double span = hi - lo;
    if (!std::isfinite(a) || a < lo + 0.1 * span || a > hi - 0.1 * span) a = 0.5 * (lo + hi);
    return a;
}

}  // namespace detail

inline BfgsResult bfgs_minimize(const Objective& fn, Eigen::VectorXd x0, const BfgsOptions& opt = {}) {
    const auto n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    res.grad.resize(n);
    res.f = detail::safe_value(fn(res.x, res.grad));
    ++res.evaluations;
    if (!std::isfinite(res.f) || !res.grad.allFinite()) return res;

    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
    bool first = true;
    Eigen::VectorXd g_new(n), x_new(n);

    for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
        if (res.grad.lpNorm<Eigen::Infinity>() <= opt.grad_tol) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd dir = -Hinv * res.grad;
        double slope = dir.dot(res.grad);
        if (!(slope < 0.0)) {
            Hinv.setIdentity();
            dir = -res.grad;
            slope = dir.dot(res.grad);
        }
        double a_init = 1.0;
        if (first) a_init = std::min(1.0, 1.0 / std::max(1e-12, res.grad.lpNorm<Eigen::Infinity>()));
        const double dn = dir.lpNorm<Eigen::Infinity>();
        if (dn * a_init > opt.max_step) a_init = opt.max_step / dn;

        auto eval = [&](double a) {
            x_new = res.x + a * dir;
            detail::LinePoint p;
            p.a = a;
            p.f = detail::safe_value(fn(x_new, g_new));
            ++res.evaluations;
            p.d = std::isfinite(p.f) ? g_new.dot(dir) : std::numeric_limits<double>::quiet_NaN();
            return p;
        };

        // strong Wolfe: bracket then zoom
        const detail::LinePoint p0{0.0, res.f, slope};
        detail::LinePoint prev = p0, cur;
        double a = a_init;
        bool found = false;
        Eigen::VectorXd best_x, best_g;
        double best_f = res.f;
        auto accept = [&](const detail::LinePoint& p) {
            best_x = x_new;
            best_g = g_new;
            best_f = p.f;
            found = true;
        };
        auto zoom = [&](detail::LinePoint lo, detail::LinePoint hi) {
            for (int it = 0; it < 40; ++it) {
                const double left = std::min(lo.a, hi.a), right = std::max(lo.a, hi.a);
                double at = std::isfinite(hi.f) && std::isfinite(hi.d) ? detail::cubic_min(lo, hi, left, right)
                                                                       : 0.5 * (left + right);
                auto p = eval(at);
                if (!std::isfinite(p.f) || p.f > p0.f + opt.c1 * at * slope || p.f >= lo.f) {
                    hi = p;
                } else {
                    if (std::abs(p.d) <= -opt.c2 * slope) {
                        accept(p);
                        return;
                    }
                    if (p.d * (hi.a - lo.a) >= 0.0) hi = lo;
                    lo = p;
                }
                if (std::abs(hi.a - lo.a) < 1e-16 * std::max(1.0, lo.a)) break;
            }
            // settle for sufficient decrease at the best bracketing point
            if (lo.a > 0.0 && lo.f < p0.f) {
                eval(lo.a);
                accept(lo);
            }
        };
        for (int it = 0; it < 60 && !found; ++it) {
            cur = eval(a);
            if (!std::isfinite(cur.f) || cur.f > p0.f + opt.c1 * a * slope || (it > 0 && cur.f >= prev.f)) {
                zoom(prev, cur);
                break;
            }
            if (std::abs(cur.d) <= -opt.c2 * slope) {
                accept(cur);
                break;
            }
            if (cur.d >= 0.0) {
                zoom(cur, prev);
                break;
            }
            prev = cur;
            a *= 2.0;
        }
        if (!found) break;  // no progress possible along this direction

        const Eigen::VectorXd s = best_x - res.x;
        const Eigen::VectorXd y = best_g - res.grad;
        const double sy = s.dot(y);
        const double f_old = res.f;
        res.x = best_x;
        res.grad = best_g;
        res.f = best_f;
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (first) Hinv *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) + rho * s * s.transpose();
            first = false;
        }
        if (std::abs(f_old - res.f) <= 1e-15 * std::max(1.0, std::abs(res.f)) && s.lpNorm<Eigen::Infinity>() < 1e-14) {
            break;
        }
    }
    if (!res.converged) res.converged = res.grad.lpNorm<Eigen::Infinity>() <= opt.grad_tol;
    return res;
}

}  // namespace ela
