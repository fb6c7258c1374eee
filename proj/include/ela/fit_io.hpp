#pragma once

// Fit serialization: a (parameter, estimate, std_error) block followed by a (stat, value) block.

#include <istream>
#include <ostream>
#include <string>

#include "ela/censored_mle.hpp"
#include "ela/csv.hpp"

namespace ela {

inline void write_fit(std::ostream& out, const TobitFit& fit) {
    out << "parameter,estimate,std_error\n";
    const auto names = param_names(fit.spec);
    std::size_t i = 0;
    auto row = [&](double est, double se) {
        out << names[i++] << ',' << csv::format_double(est) << ',' << (std::isfinite(se) ? csv::format_double(se) : "NA")
            << '\n';
    };
    for (std::size_t j = 0; j < fit.params.theta.size(); ++j) row(fit.params.theta[j], fit.std_errors.theta[j]);
    for (std::size_t j = 0; j < fit.params.gamma.size(); ++j) row(fit.params.gamma[j], fit.std_errors.gamma[j]);
    if (fit.params.nu) row(*fit.params.nu, fit.std_errors.nu.value_or(std::nan("")));
    out << "\nstat,value\n";
    out << "loglik," << csv::format_double(fit.loglik) << '\n';
    out << "aic," << csv::format_double(fit.aic) << '\n';
    out << "bic," << csv::format_double(fit.bic) << '\n';
    out << "mcfadden_r2," << (std::isfinite(fit.mcfadden_r2) ? csv::format_double(fit.mcfadden_r2) : "NA") << '\n';
    out << "nu," << (fit.params.nu ? csv::format_double(*fit.params.nu) : "NA") << '\n';
    out << "n_obs," << fit.n_obs << '\n';
    out << "n_censored," << fit.n_censored << '\n';
    out << "n_params," << fit.n_params << '\n';
    out << "converged," << (fit.converged ? "true" : "false") << '\n';
    out << "form," << to_string(fit.spec.form) << '\n';
    out << "family," << to_string(fit.spec.family) << '\n';
    out << "model," << (fit.spec.intercept_only ? "null" : fit.spec.include_var_iv ? "full" : "reduced") << '\n';
}

namespace detail {

inline double parse_num_or_nan(std::string_view s) {
    double v = 0.0;
    if (s == "NA" || !csv::parse_double(s, v)) return std::nan("");
    return v;
}

}  // namespace detail

/// Reads what write_fit produced. Covariance is not serialized and comes back empty.
inline TobitFit read_fit(std::istream& in) {
    TobitFit fit;
    std::string line;
    if (!std::getline(in, line) || csv::trim(line) != "parameter,estimate,std_error")
        throw ParseError(1, "fit: missing parameter header");
    std::size_t lineno = 1;
    std::vector<std::tuple<std::string, double, double>> params;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) break;
        const auto f = csv::split(line);
        if (f.size() != 3) throw ParseError(lineno, "fit: expected 3 fields");
        params.emplace_back(std::string(f[0]), detail::parse_num_or_nan(f[1]), detail::parse_num_or_nan(f[2]));
    }
    if (!std::getline(in, line) || csv::trim(line) != "stat,value") throw ParseError(lineno + 1, "fit: missing stat header");
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 2) throw ParseError(lineno, "fit: expected 2 fields");
        const auto key = f[0];
        const auto val = f[1];
        if (key == "loglik") fit.loglik = detail::parse_num_or_nan(val);
        else if (key == "aic") fit.aic = detail::parse_num_or_nan(val);
        else if (key == "bic") fit.bic = detail::parse_num_or_nan(val);
        else if (key == "mcfadden_r2") fit.mcfadden_r2 = detail::parse_num_or_nan(val);
        else if (key == "n_obs") csv::parse_int(val, fit.n_obs);
        else if (key == "n_censored") csv::parse_int(val, fit.n_censored);
        else if (key == "n_params") csv::parse_int(val, fit.n_params);
        else if (key == "converged") fit.converged = val == "true";
        else if (key == "form") fit.spec.form = val == "loglog" ? Form::loglog : Form::linear;
        else if (key == "family") fit.spec.family = val == "gauss" ? Family::gaussian : Family::student_t;
        else if (key == "model") {
            fit.spec.intercept_only = val == "null";
            fit.spec.include_var_iv = val == "full";
        }
    }
    for (const auto& [name, est, se] : params) {
        if (name.rfind("theta", 0) == 0) {
            fit.params.theta.push_back(est);
            fit.std_errors.theta.push_back(se);
        } else if (name.rfind("gamma", 0) == 0) {
            fit.params.gamma.push_back(est);
            fit.std_errors.gamma.push_back(se);
        } else if (name == "nu") {
            fit.params.nu = est;
            fit.std_errors.nu = se;
        }
    }
    if (fit.spec.n_scale() != fit.params.gamma.size()) fit.spec.homoskedastic = fit.params.gamma.size() == 1;
    fit.se_available = !fit.std_errors.theta.empty() && std::isfinite(fit.std_errors.theta[0]);
    return fit;
}

}  // namespace ela
