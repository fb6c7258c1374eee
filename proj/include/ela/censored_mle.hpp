#pragma once

// Heteroskedastic left-censored (Tobit) regression.
//
//   b_r        = max(C, v*_r)
//   v*_r       = theta . x_r + eps_r
//   log sigma_r = gamma . z_r
//   eps_r / sigma_r ~ t(nu)  or  N(0, 1)
//
// Location regressors x_r are (1, x1, x2) in the linear form and (1, log x1, log x2) in the log-log
// form; scale regressors z_r are (1, log x1, log x2) in both. The reduced model drops x2 from both
// equations. nu is optimized as nu = 0.1 + exp(eta).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ela/bfgs.hpp"
#include "ela/dist.hpp"
#include "ela/error.hpp"
#include "ela/types.hpp"

namespace ela {

enum class Form { linear, loglog };
enum class Family { student_t, gaussian };
enum class LogBidBase { wei, eth };

inline constexpr double kNuMin = 0.1;
inline constexpr double kLogFloor = 1e-30;  // applied to unscaled E[IV]/sqrt(P) and Var(IV) before logs

struct TobitSpec {
    Form form = Form::linear;
    Family family = Family::student_t;
    bool include_var_iv = true;   // full (true) vs reduced (false)
    bool intercept_only = false;  // location and scale reduced to intercepts (McFadden null)
    bool homoskedastic = false;   // scale equation reduced to its intercept
    bool lagged = false;          // label only; lagging happens at dataset build
    double censor_point = 1.0;    // bid units (1.0 == 0.001 ETH)
    LogBidBase log_bid_base = LogBidBase::wei;
    double log_floor = kLogFloor;

    std::size_t n_location() const { return intercept_only ? 1 : (include_var_iv ? 3 : 2); }
    std::size_t n_scale() const { return (intercept_only || homoskedastic) ? 1 : (include_var_iv ? 3 : 2); }

    /// Same model with only intercepts in both equations.
    TobitSpec null_model() const {
        TobitSpec s = *this;
        s.intercept_only = true;
        return s;
    }
    TobitSpec reduced() const {
        TobitSpec s = *this;
        s.include_var_iv = false;
        return s;
    }
    TobitSpec full() const {
        TobitSpec s = *this;
        s.include_var_iv = true;
        return s;
    }
};

inline std::string to_string(Form f) { return f == Form::linear ? "linear" : "loglog"; }
inline std::string to_string(Family f) { return f == Family::student_t ? "t" : "gauss"; }

struct TobitParams {
    std::vector<double> theta;
    std::vector<double> gamma;
    std::optional<double> nu;
};

// ---------------------------------------------------------------------------
// Design

/// Observation-level view consumed by the likelihood. Column-major regressor blocks.
struct TobitDesign {
    std::vector<double> y;
    std::vector<char> censored;
    std::vector<double> X;  // n * p
    std::vector<double> Z;  // n * q
    std::size_t p = 0;
    std::size_t q = 0;
    double censor = 1.0;

    std::size_t n() const { return y.size(); }
    double x(std::size_t i, std::size_t j) const { return X[j * n() + i]; }
    double z(std::size_t i, std::size_t j) const { return Z[j * n() + i]; }
};

struct LogLogRow {
    double y = 0.0;
    double log_x1 = 0.0;
    double log_x2 = 0.0;
    bool censored = false;
};

struct LogLogView {
    std::vector<LogLogRow> rows;
    double censor_point = 0.0;
};

/// Natural log of a scaled bid expressed in the chosen base unit.
inline double log_bid(double bid_scaled, LogBidBase base) {
    if (!(bid_scaled > 0.0)) throw DomainError("log-log view requires positive bids");
    return base == LogBidBase::wei ? std::log(bid_scaled) + 15.0 * std::numbers::ln10
                                   : std::log(bid_scaled) - 3.0 * std::numbers::ln10;
}

inline double floored_log(double x, double floor) { return std::log(std::max(x, floor)); }

/// Logged bids and regressors. Zero regressors are floored at `log_floor` in unscaled units.
inline LogLogView loglog_view(const RoundDataset& d, double censor_point = 1.0, LogBidBase base = LogBidBase::wei,
                              double log_floor = kLogFloor) {
    LogLogView v;
    v.censor_point = log_bid(censor_point, base);
    v.rows.reserve(d.size());
    for (const auto& r : d.rows) {
        LogLogRow o;
        o.y = r.censored ? v.censor_point : log_bid(r.bid_scaled, base);
        o.log_x1 = floored_log(r.x1, log_floor * kX1Scale);
        o.log_x2 = floored_log(r.x2, log_floor * kX2Scale);
        o.censored = r.censored;
        v.rows.push_back(o);
    }
    return v;
}

inline TobitDesign make_design(const RoundDataset& d, const TobitSpec& spec) {
    TobitDesign des;
    const std::size_t n = d.size();
    des.p = spec.n_location();
    des.q = spec.n_scale();
    des.y.resize(n);
    des.censored.resize(n);
    des.X.assign(n * des.p, 1.0);
    des.Z.assign(n * des.q, 1.0);

    std::vector<double> lx1(n), lx2(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx1[i] = floored_log(d.rows[i].x1, spec.log_floor * kX1Scale);
        lx2[i] = floored_log(d.rows[i].x2, spec.log_floor * kX2Scale);
    }
    if (spec.form == Form::linear) {
        des.censor = spec.censor_point;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = d.rows[i];
            des.y[i] = r.censored ? spec.censor_point : r.bid_scaled;
            des.censored[i] = r.censored;
            if (des.p > 1) des.X[n + i] = r.x1;
            if (des.p > 2) des.X[2 * n + i] = r.x2;
        }
    } else {
        const auto view = loglog_view(d, spec.censor_point, spec.log_bid_base, spec.log_floor);
        des.censor = view.censor_point;
        for (std::size_t i = 0; i < n; ++i) {
            des.y[i] = view.rows[i].y;
            des.censored[i] = view.rows[i].censored;
            if (des.p > 1) des.X[n + i] = lx1[i];
            if (des.p > 2) des.X[2 * n + i] = lx2[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (des.q > 1) des.Z[n + i] = lx1[i];
        if (des.q > 2) des.Z[2 * n + i] = lx2[i];
    }
    return des;
}

// ---------------------------------------------------------------------------
// Parameter layout

inline std::size_t n_free_params(const TobitSpec& spec, bool nu_fixed = false) {
    return spec.n_location() + spec.n_scale() + ((spec.family == Family::student_t && !nu_fixed) ? 1 : 0);
}

inline std::vector<std::string> param_names(const TobitSpec& spec) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < spec.n_location(); ++j) out.push_back("theta" + std::to_string(j));
    for (std::size_t j = 0; j < spec.n_scale(); ++j) out.push_back("gamma" + std::to_string(j));
    if (spec.family == Family::student_t) out.push_back("nu");
    return out;
}

inline double nu_from_eta(double eta) { return kNuMin + std::exp(eta); }
inline double eta_from_nu(double nu) {
    if (!(nu > kNuMin)) throw DomainError("nu must exceed " + std::to_string(kNuMin));
    return std::log(nu - kNuMin);
}

// ---------------------------------------------------------------------------
// Likelihood

namespace detail {

struct RowTerms {
    double ll = 0.0;
    double d_mu = 0.0;     // d ll / d mu
    double d_logsig = 0.0; // d ll / d log sigma
    double d_nu = 0.0;     // d ll / d nu
};

struct FamilyEval {
    Family family;
    double nu = 0.0;
    double log_c = 0.0;        // log normalizing constant
    double dlogc_dnu = 0.0;
    bool want_nu_grad = false;

    FamilyEval(Family f, double nu_, bool grad_nu) : family(f), nu(nu_), want_nu_grad(grad_nu) {
        if (family == Family::student_t) {
            log_c = t_log_norm_const(nu);
            dlogc_dnu = 0.5 * (boost::math::digamma(0.5 * (nu + 1.0)) - boost::math::digamma(0.5 * nu)) - 0.5 / nu;
        } else {
            log_c = -kHalfLog2Pi;
        }
    }

    double log_pdf(double z) const {
        return family == Family::student_t ? log_c - 0.5 * (nu + 1.0) * std::log1p(z * z / nu) : log_c - 0.5 * z * z;
    }
    double dlog_pdf_dz(double z) const {
        return family == Family::student_t ? -(nu + 1.0) * z / (nu + z * z) : -z;
    }
    double log_cdf(double z) const { return family == Family::student_t ? t_log_cdf(z, nu) : normal_log_cdf(z); }

    RowTerms uncensored(double y, double mu, double log_sig) const {
        const double sig = std::exp(log_sig);
        const double z = (y - mu) / sig;
        RowTerms t;
        t.ll = -log_sig + log_pdf(z);
        const double g = dlog_pdf_dz(z);
        t.d_mu = -g / sig;
        t.d_logsig = -1.0 - g * z;
        if (want_nu_grad) {
            t.d_nu = dlogc_dnu - 0.5 * std::log1p(z * z / nu) + 0.5 * (nu + 1.0) * z * z / (nu * (nu + z * z));
        }
        return t;
    }

    RowTerms censored(double c, double mu, double log_sig) const {
        const double sig = std::exp(log_sig);
        const double z = (c - mu) / sig;
        RowTerms t;
        t.ll = log_cdf(z);
        const double lambda = std::exp(log_pdf(z) - t.ll);  // f(z) / F(z)
        t.d_mu = -lambda / sig;
        t.d_logsig = -lambda * z;
        if (want_nu_grad) {
            const double h = 1e-5 * nu;
            t.d_nu = (t_log_cdf(z, nu + h) - t_log_cdf(z, nu - h)) / (2.0 * h);
        }
        return t;
    }
};

}  // namespace detail

/// Log-likelihood and (optionally) its gradient with respect to (theta, gamma, nu) in natural units.
/// Rows in [begin, end) only; sums over disjoint ranges add up to the full likelihood.
inline double tobit_loglik_range(const TobitDesign& d, const TobitParams& prm, Family family, std::size_t begin,
                                 std::size_t end, std::vector<double>* grad = nullptr,
                                 std::size_t* bad_row = nullptr) {
    if (prm.theta.size() != d.p || prm.gamma.size() != d.q)
        throw ArgumentError("parameter dimensions do not match the design");
    const bool is_t = family == Family::student_t;
    if (is_t && !prm.nu) throw ArgumentError("student-t likelihood requires nu");
    const double nu = is_t ? *prm.nu : 0.0;
    if (is_t && !(nu > 0.0)) throw DomainError("nu must be positive");
    const detail::FamilyEval fe(family, nu, grad != nullptr && is_t);

    const std::size_t n = d.n();
    if (grad) grad->assign(d.p + d.q + (is_t ? 1 : 0), 0.0);
    double ll = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        double mu = 0.0, ls = 0.0;
        for (std::size_t j = 0; j < d.p; ++j) mu += prm.theta[j] * d.X[j * n + i];
        for (std::size_t j = 0; j < d.q; ++j) ls += prm.gamma[j] * d.Z[j * n + i];
        const auto t = d.censored[i] ? fe.censored(d.censor, mu, ls) : fe.uncensored(d.y[i], mu, ls);
        if (!std::isfinite(t.ll)) {
            if (bad_row) *bad_row = i;
            return std::numeric_limits<double>::quiet_NaN();
        }
        ll += t.ll;
        if (grad) {
            auto& g = *grad;
            for (std::size_t j = 0; j < d.p; ++j) g[j] += t.d_mu * d.X[j * n + i];
            for (std::size_t j = 0; j < d.q; ++j) g[d.p + j] += t.d_logsig * d.Z[j * n + i];
            if (is_t) g[d.p + d.q] += t.d_nu;
        }
    }
    return ll;
}

/// Full-sample log-likelihood. Throws EstimationError naming the first row that is not finite.
inline double tobit_loglik(const TobitParams& prm, const TobitDesign& d, Family family) {
    std::size_t bad = 0;
    const double ll = tobit_loglik_range(d, prm, family, 0, d.n(), nullptr, &bad);
    if (!std::isfinite(ll)) throw EstimationError("non-finite likelihood contribution at row " + std::to_string(bad));
    return ll;
}

inline double tobit_loglik(const TobitParams& prm, const RoundDataset& data, const TobitSpec& spec) {
    if (data.empty()) throw ArgumentError("empty dataset");
    return tobit_loglik(prm, make_design(data, spec), spec.family);
}

inline std::vector<double> tobit_gradient(const TobitParams& prm, const TobitDesign& d, Family family) {
    std::vector<double> g;
    std::size_t bad = 0;
    const double ll = tobit_loglik_range(d, prm, family, 0, d.n(), &g, &bad);
    if (!std::isfinite(ll)) throw EstimationError("non-finite likelihood contribution at row " + std::to_string(bad));
    return g;
}

// ---------------------------------------------------------------------------
// Fit

struct FitOptions {
    int starts = 5;
    int max_iter = 500;
    double tol = 1e-6;  // max-norm of the per-observation gradient
    unsigned seed = 20250501;
    std::optional<double> fixed_nu;        // hold nu fixed (t family only)
    std::optional<TobitParams> init;       // replaces the moment-based start
};

struct TobitFit {
    TobitSpec spec;
    TobitParams params;
    TobitParams std_errors;  // NaN when the Hessian is not invertible
    Eigen::MatrixXd covariance;  // over free parameters (theta, gamma, nu)
    bool se_available = false;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    double mcfadden_r2 = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_obs = 0;
    std::size_t n_censored = 0;
    std::size_t n_params = 0;
    bool nu_fixed = false;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

inline double aic(double loglik, std::size_t k) { return -2.0 * loglik + 2.0 * static_cast<double>(k); }
inline double bic(double loglik, std::size_t k, std::size_t n) {
    return -2.0 * loglik + static_cast<double>(k) * std::log(static_cast<double>(n));
}

/// Two-sided normal p-value of estimate / se.
inline double wald_p_value(double estimate, double se) {
    if (!(se > 0.0) || !std::isfinite(se)) return std::numeric_limits<double>::quiet_NaN();
    return boost::math::erfc(std::abs(estimate / se) / std::numbers::sqrt2);
}

namespace detail {

struct Packing {
    std::size_t p = 0, q = 0;
    bool free_nu = false;
    std::optional<double> fixed_nu;
    Family family = Family::gaussian;

    std::size_t size() const { return p + q + (free_nu ? 1 : 0); }

    TobitParams unpack(const Eigen::VectorXd& v) const {
        TobitParams prm;
        prm.theta.assign(v.data(), v.data() + p);
        prm.gamma.assign(v.data() + p, v.data() + p + q);
        if (family == Family::student_t) prm.nu = free_nu ? nu_from_eta(v[p + q]) : *fixed_nu;
        return prm;
    }
    Eigen::VectorXd pack(const TobitParams& prm) const {
        Eigen::VectorXd v(size());
        for (std::size_t j = 0; j < p; ++j) v[j] = prm.theta[j];
        for (std::size_t j = 0; j < q; ++j) v[p + j] = prm.gamma[j];
        if (free_nu) v[p + q] = eta_from_nu(*prm.nu);
        return v;
    }
};

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
    return m;
}

/// theta by least squares on uncensored rows; gamma0 from the robust residual spread.
inline TobitParams moment_start(const TobitDesign& d, Family family) {
    const std::size_t n = d.n();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d.p, d.p);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d.p);
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d.censored[i]) continue;
        ++m;
        for (std::size_t j = 0; j < d.p; ++j) {
            b[j] += d.X[j * n + i] * d.y[i];
            for (std::size_t k = 0; k < d.p; ++k) A(j, k) += d.X[j * n + i] * d.X[k * n + i];
        }
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d.p);
    auto ldlt = A.ldlt();
    if (m > d.p && ldlt.info() == Eigen::Success) theta = ldlt.solve(b);
    if (!theta.allFinite()) theta.setZero();
    std::vector<double> absres;
    absres.reserve(m);
    for (std::size_t i = 0; i < n; ++i) {
        if (d.censored[i]) continue;
        double mu = 0.0;
        for (std::size_t j = 0; j < d.p; ++j) mu += theta[j] * d.X[j * n + i];
        absres.push_back(std::abs(d.y[i] - mu));
    }
    // MAD of a standard normal is 0.6745; of t(nu) near 1 it is close to 1
    const double mad = std::max(1e-8, median_of(absres));
    TobitParams prm;
    prm.theta.assign(theta.data(), theta.data() + d.p);
    prm.gamma.assign(d.q, 0.0);
    prm.gamma[0] = std::log(family == Family::gaussian ? mad / 0.6745 : mad);
    if (family == Family::student_t) prm.nu = 3.0;
    return prm;
}

}  // namespace detail

/// Numerical Hessian of the total negative log-likelihood by central differences of the gradient.
inline Eigen::MatrixXd tobit_hessian(const TobitDesign& d, Family family, const detail::Packing& pk,
                                     const Eigen::VectorXd& x) {
    const auto k = static_cast<Eigen::Index>(pk.size());
    Eigen::MatrixXd H(k, k);
    std::vector<double> gp, gm;
    auto grad_at = [&](const Eigen::VectorXd& v, std::vector<double>& g) {
        const auto prm = pk.unpack(v);
        std::vector<double> nat;
        tobit_loglik_range(d, prm, family, 0, d.n(), &nat);
        g.assign(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < pk.p + pk.q; ++j) g[j] = -nat[j];
        if (pk.free_nu) g[pk.p + pk.q] = -nat[pk.p + pk.q] * (*prm.nu - kNuMin);
    };
    for (Eigen::Index j = 0; j < k; ++j) {
        const double h = 1e-4 * std::max(1.0, std::abs(x[j]));
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        grad_at(xp, gp);
        grad_at(xm, gm);
        for (Eigen::Index i = 0; i < k; ++i) H(i, j) = (gp[i] - gm[i]) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

inline TobitFit fit_tobit_design(const TobitDesign& d, const TobitSpec& spec, const FitOptions& opt = {}) {
    const std::size_t n = d.n();
    std::size_t n_cens = 0;
    for (char c : d.censored) n_cens += c ? 1 : 0;
    if (n == 0) throw EstimationError("empty dataset");
    if (n_cens == n) throw EstimationError("all observations are censored");

    detail::Packing pk;
    pk.p = d.p;
    pk.q = d.q;
    pk.family = spec.family;
    pk.free_nu = spec.family == Family::student_t && !opt.fixed_nu;
    pk.fixed_nu = opt.fixed_nu;
    if (n <= pk.size()) throw EstimationError("need more observations than parameters");

    const double inv_n = 1.0 / static_cast<double>(n);
    Objective obj = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
        const auto prm = pk.unpack(v);
        std::vector<double> nat;
        const double ll = tobit_loglik_range(d, prm, spec.family, 0, n, &nat);
        g.resize(v.size());
        if (!std::isfinite(ll)) {
            g.setZero();
            return std::numeric_limits<double>::infinity();
        }
        for (std::size_t j = 0; j < pk.p + pk.q; ++j) g[j] = -nat[j] * inv_n;
        if (pk.free_nu) g[pk.p + pk.q] = -nat[pk.p + pk.q] * (*prm.nu - kNuMin) * inv_n;
        return -ll * inv_n;
    };

    TobitParams base = opt.init ? *opt.init : detail::moment_start(d, spec.family);
    if (spec.family == Family::student_t) {
        if (opt.fixed_nu)
            base.nu = *opt.fixed_nu;
        else if (!base.nu)
            base.nu = 3.0;
    }
    std::vector<Eigen::VectorXd> starts{pk.pack(base)};
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const double nu_grid[] = {1.5, 8.0, 1.0, 20.0};
    for (int s = 1; s < opt.starts; ++s) {
        TobitParams j = base;
        for (auto& t : j.theta) t += 0.25 * (std::abs(t) + 0.1) * nd(rng);
        j.gamma[0] += 0.5 * nd(rng);
        for (std::size_t k = 1; k < j.gamma.size(); ++k) j.gamma[k] += 0.1 * nd(rng);
        if (pk.free_nu) j.nu = nu_grid[(s - 1) % 4];
        starts.push_back(pk.pack(j));
    }

    BfgsOptions bo;
    bo.max_iter = opt.max_iter;
    bo.grad_tol = opt.tol;
    std::optional<BfgsResult> best;
    for (const auto& x0 : starts) {
        Eigen::VectorXd g0;
        if (!std::isfinite(obj(x0, g0))) continue;
        auto r = bfgs_minimize(obj, x0, bo);
        if (!std::isfinite(r.f)) continue;
        if (!best || r.f < best->f - 1e-12 || (r.f <= best->f + 1e-12 && r.converged && !best->converged))
            best = std::move(r);
    }
    if (!best) throw EstimationError("likelihood not finite at any starting point");

    TobitFit fit;
    fit.spec = spec;
    fit.params = pk.unpack(best->x);
    fit.loglik = -best->f * static_cast<double>(n);
    fit.n_obs = n;
    fit.n_censored = n_cens;
    fit.n_params = pk.size();
    fit.nu_fixed = spec.family == Family::student_t && opt.fixed_nu.has_value();
    fit.converged = best->converged;
    fit.iterations = best->iterations;
    fit.grad_norm = best->grad.lpNorm<Eigen::Infinity>();
    // recompute on the exact optimum rather than trusting the scaled objective
    fit.loglik = tobit_loglik_range(d, fit.params, spec.family, 0, n);
    fit.aic = aic(fit.loglik, fit.n_params);
    fit.bic = bic(fit.loglik, fit.n_params, n);

    const auto k = static_cast<Eigen::Index>(pk.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fit.std_errors.theta.assign(pk.p, nan);
    fit.std_errors.gamma.assign(pk.q, nan);
    if (spec.family == Family::student_t) fit.std_errors.nu = nan;
    fit.covariance = Eigen::MatrixXd::Constant(k, k, nan);

    const Eigen::MatrixXd H = tobit_hessian(d, spec.family, pk, best->x);
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (H.allFinite() && llt.info() == Eigen::Success) {
        Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
        if (pk.free_nu) {
            // delta method from eta to nu
            const double jac = *fit.params.nu - kNuMin;
            cov.row(k - 1) *= jac;
            cov.col(k - 1) *= jac;
        }
        if (cov.allFinite() && (cov.diagonal().array() > 0.0).all()) {
            fit.covariance = cov;
            fit.se_available = true;
            for (std::size_t j = 0; j < pk.p; ++j) fit.std_errors.theta[j] = std::sqrt(cov(j, j));
            for (std::size_t j = 0; j < pk.q; ++j) fit.std_errors.gamma[j] = std::sqrt(cov(pk.p + j, pk.p + j));
            if (pk.free_nu) fit.std_errors.nu = std::sqrt(cov(k - 1, k - 1));
        }
    }
    return fit;
}

inline TobitFit fit_tobit(const RoundDataset& data, const TobitSpec& spec, const FitOptions& opt = {}) {
    return fit_tobit_design(make_design(data, spec), spec, opt);
}

// ---------------------------------------------------------------------------
// Model comparison

struct LrTest {
    double chi2 = 0.0;
    std::size_t df = 0;
    double p_value = 1.0;
};

/// Upper tail of the chi-square distribution.
inline double chi2_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

inline LrTest lr_test_values(double ll_full, double ll_reduced, std::size_t df) {
    if (df == 0) throw ArgumentError("LR test needs at least one restriction");
    LrTest t;
    t.chi2 = 2.0 * (ll_full - ll_reduced);
    t.df = df;
    t.p_value = chi2_sf(t.chi2, static_cast<double>(df));
    return t;
}

inline LrTest lr_test(const TobitFit& full, const TobitFit& reduced) {
    const auto& f = full.spec;
    const auto& r = reduced.spec;
    const bool nested = f.form == r.form && f.family == r.family && full.n_obs == reduced.n_obs &&
                        full.nu_fixed == reduced.nu_fixed && r.n_location() <= f.n_location() &&
                        r.n_scale() <= f.n_scale() && full.n_params > reduced.n_params &&
                        (r.homoskedastic || r.intercept_only || !f.homoskedastic);
    if (!nested) throw ArgumentError("reduced model is not nested in the full model");
    return lr_test_values(full.loglik, reduced.loglik, full.n_params - reduced.n_params);
}

inline double mcfadden_r2(double ll_fit, double ll_null) {
    if (ll_null == 0.0) throw DomainError("McFadden R^2 undefined for a null log-likelihood of 0");
    return 1.0 - ll_fit / ll_null;
}

inline double mcfadden_r2(const TobitFit& fit, const TobitFit& null_fit) {
    if (fit.n_obs != null_fit.n_obs) throw ArgumentError("null model fitted on different data");
    return mcfadden_r2(fit.loglik, null_fit.loglik);
}

}  // namespace ela
