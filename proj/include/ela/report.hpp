#pragma once

// Four-panel result tables (location, scale, fit statistics, full-vs-reduced comparison) rendered as
// LaTeX, aligned plain text, and CSV. Stars mark two-sided p < 0.05 / 0.01 / 0.001.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ela/censored_mle.hpp"
#include "ela/csv.hpp"

namespace ela {

struct Coef {
    double estimate = 0.0;
    double se = 0.0;
    double p_value() const { return wald_p_value(estimate, se); }
};

struct ModelColumn {
    std::vector<std::optional<Coef>> location;  // theta0..theta2, absent entries render as "--"
    std::vector<std::optional<Coef>> scale;     // gamma0..gamma2
    std::size_t n_obs = 0;
    std::size_t n_censored = 0;
    std::optional<double> nu;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    double mcfadden_r2 = 0.0;
};

struct Comparison {
    double d_aic = 0.0;  // full - reduced
    double d_bic = 0.0;
    double lr_chi2 = 0.0;
    std::size_t df = 1;
    double p_value() const { return chi2_sf(lr_chi2, static_cast<double>(df)); }
};

struct BidderColumns {
    std::string label;
    std::optional<ModelColumn> reduced;
    std::optional<ModelColumn> full;
    std::optional<Comparison> comparison;
};

struct ReportTable {
    Form form = Form::linear;
    Family family = Family::student_t;
    bool lagged = false;
    std::vector<BidderColumns> bidders;
};

inline std::string stars_for(double p) {
    if (!(p == p)) return "";
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

inline ModelColumn column_from_fit(const TobitFit& fit) {
    ModelColumn c;
    c.location.assign(3, std::nullopt);
    c.scale.assign(3, std::nullopt);
    // reduced fits carry (theta0, theta1); map by position since x2 is always the dropped term
    for (std::size_t j = 0; j < fit.params.theta.size(); ++j)
        c.location[j] = Coef{fit.params.theta[j], fit.std_errors.theta[j]};
    for (std::size_t j = 0; j < fit.params.gamma.size(); ++j)
        c.scale[j] = Coef{fit.params.gamma[j], fit.std_errors.gamma[j]};
    c.n_obs = fit.n_obs;
    c.n_censored = fit.n_censored;
    c.nu = fit.params.nu;
    c.loglik = fit.loglik;
    c.aic = fit.aic;
    c.bic = fit.bic;
    c.mcfadden_r2 = fit.mcfadden_r2;
    return c;
}

inline Comparison compare_fits(const TobitFit& full, const TobitFit& reduced) {
    const auto lr = lr_test(full, reduced);
    Comparison c;
    c.d_aic = full.aic - reduced.aic;
    c.d_bic = full.bic - reduced.bic;
    c.lr_chi2 = lr.chi2;
    c.df = lr.df;
    return c;
}

inline std::string table_caption(const ReportTable& t) {
    std::string s = t.lagged ? "Regression with Lagged IV estimators" : "Heteroskedastic Tobit";
    s += t.form == Form::linear ? " (Linear, " : " (Log-Log, ";
    s += t.family == Family::student_t ? "t-dist Errors)" : "Gaussian Errors)";
    return s;
}

inline std::string table_label(const ReportTable& t) {
    return std::string(t.form == Form::linear ? "tab:linear_" : "tab:log_") + (t.lagged ? "lagged" : "nolag");
}

namespace detail {

struct RowLabels {
    std::string latex;
    std::string text;
};

inline std::vector<RowLabels> location_labels(Form form) {
    if (form == Form::linear)
        return {{"Intercept ($\\theta_0$)", "Intercept (theta0)"},
                {"E[IV]/$\\sqrt{P}$ ($\\theta_1$)", "E[IV]/sqrt(P) (theta1)"},
                {"Var(IV) ($\\theta_2$)", "Var(IV) (theta2)"}};
    return {{"Intercept ($\\theta_0$)", "Intercept (theta0)"},
            {"$\\log$(E[IV]/$\\sqrt{P}$) ($\\theta_1$)", "log(E[IV]/sqrt(P)) (theta1)"},
            {"$\\log$(Var(IV)) ($\\theta_2$)", "log(Var(IV)) (theta2)"}};
}

inline std::vector<RowLabels> scale_labels() {
    return {{"Intercept ($\\gamma_0$)", "Intercept (gamma0)"},
            {"$\\log$(E[IV]/$\\sqrt{P}$) ($\\gamma_1$)", "log(E[IV]/sqrt(P)) (gamma1)"},
            {"$\\log$(Var(IV)) ($\\gamma_2$)", "log(Var(IV)) (gamma2)"}};
}

/// Formatted numbers shared by every renderer so all formats agree digit for digit.
struct Cell {
    std::string value;  // "" when absent
    std::string stars;
    std::string se;
};

inline Cell coef_cell(const std::vector<std::optional<Coef>>& v, std::size_t j) {
    if (j >= v.size() || !v[j]) return {};
    const auto& c = *v[j];
    Cell cell;
    cell.value = csv::format_fixed(c.estimate, 4);
    cell.stars = stars_for(c.p_value());
    cell.se = std::isfinite(c.se) ? csv::format_fixed(c.se, 4) : "NA";
    return cell;
}

inline std::string latex_stars(const std::string& s) { return s.empty() ? "" : "$^{" + s + "}$"; }

template <typename F>
std::vector<std::string> per_model(const ReportTable& t, F f) {
    std::vector<std::string> out;
    for (const auto& b : t.bidders) {
        out.push_back(b.reduced ? f(*b.reduced) : std::string("--"));
        out.push_back(b.full ? f(*b.full) : std::string("--"));
    }
    return out;
}

inline std::string fmt_int(std::size_t v) { return std::to_string(v); }

struct StatRow {
    std::string latex;
    std::string text;
    std::vector<std::string> cells;
};

inline std::vector<StatRow> stat_rows(const ReportTable& t) {
    std::vector<StatRow> rows;
    rows.push_back({"Observations", "Observations", per_model(t, [](const ModelColumn& m) { return fmt_int(m.n_obs); })});
    rows.push_back({"Censored", "Censored", per_model(t, [](const ModelColumn& m) { return fmt_int(m.n_censored); })});
    if (t.family == Family::student_t)
        rows.push_back({"Student $t$ $\\nu$", "Student t nu", per_model(t, [](const ModelColumn& m) {
                            return m.nu ? csv::format_fixed(*m.nu, 2) : std::string("--");
                        })});
    rows.push_back({"Log Likelihood", "Log Likelihood",
                    per_model(t, [](const ModelColumn& m) { return csv::format_fixed(m.loglik, 2); })});
    rows.push_back({"AIC", "AIC", per_model(t, [](const ModelColumn& m) { return csv::format_fixed(m.aic, 2); })});
    rows.push_back({"BIC", "BIC", per_model(t, [](const ModelColumn& m) { return csv::format_fixed(m.bic, 2); })});
    rows.push_back({"McFadden $R^2$", "McFadden R2",
                    per_model(t, [](const ModelColumn& m) { return csv::format_fixed(m.mcfadden_r2, 3); })});
    return rows;
}

struct CompareRow {
    std::string latex;
    std::string text;
    std::vector<std::string> values;  // one per bidder
    std::vector<std::string> stars;
};

inline std::vector<CompareRow> compare_rows(const ReportTable& t) {
    CompareRow a{"$\\Delta$ AIC (Full - Reduced)", "Delta AIC (Full - Reduced)", {}, {}};
    CompareRow b{"$\\Delta$ BIC (Full - Reduced)", "Delta BIC (Full - Reduced)", {}, {}};
    CompareRow c{"LR Test $\\chi^2$ (p-val)", "LR Test chi2 (p-val)", {}, {}};
    for (const auto& bc : t.bidders) {
        if (!bc.comparison) {
            for (auto* r : {&a, &b, &c}) {
                r->values.push_back("--");
                r->stars.push_back("");
            }
            continue;
        }
        const auto& cmp = *bc.comparison;
        a.values.push_back(csv::format_fixed(cmp.d_aic, 2));
        a.stars.push_back("");
        b.values.push_back(csv::format_fixed(cmp.d_bic, 2));
        b.stars.push_back("");
        c.values.push_back(csv::format_fixed(cmp.lr_chi2, 2));
        c.stars.push_back(stars_for(cmp.p_value()));
    }
    return {a, b, c};
}

}  // namespace detail

inline std::string render_latex(const ReportTable& t) {
    using namespace detail;
    const std::size_t k = t.bidders.size();
    const std::string ncol = std::to_string(1 + 2 * k);
    std::ostringstream o;
    o << "\\begin{table}[htbp]\n\\centering\n\\begin{tabular}{l";
    for (std::size_t i = 0; i < k; ++i) o << "cc";
    o << "}\n\\toprule\n";
    for (const auto& b : t.bidders) o << " & \\multicolumn{2}{c}{Bidder " << b.label << "}";
    o << " \\\\\n";
    for (std::size_t i = 0; i < k; ++i)
        o << (i ? " " : "") << "\\cmidrule(lr){" << 2 + 2 * i << "-" << 3 + 2 * i << "}";
    o << "\nVariable";
    for (std::size_t i = 0; i < k; ++i) o << " & Reduced & Full";
    o << " \\\\\n\\midrule\n";

    auto coef_block = [&](const std::vector<RowLabels>& labels, bool location) {
        for (std::size_t j = 0; j < labels.size(); ++j) {
            std::ostringstream est, se;
            est << labels[j].latex;
            se << "";
            for (const auto& b : t.bidders) {
                for (const auto* m : {&b.reduced, &b.full}) {
                    Cell c;
                    if (*m) c = coef_cell(location ? (*m)->location : (*m)->scale, j);
                    if (c.value.empty()) {
                        est << " & --";
                        se << " & --";
                    } else {
                        est << " & " << c.value << latex_stars(c.stars);
                        se << " & (" << c.se << ")";
                    }
                }
            }
            o << est.str() << " \\\\\n" << se.str() << " \\\\\n";
        }
    };

    o << "\\multicolumn{" << ncol << "}{l}{\\textit{Panel A: Location Coefficients}} \\\\\n\\addlinespace[0.5em]\n";
    coef_block(location_labels(t.form), true);
    o << "\\addlinespace[0.5em]\n\\midrule\n";
    o << "\\multicolumn{" << ncol << "}{l}{\\textit{Panel B: Scale Coefficients}} \\\\\n\\addlinespace[0.5em]\n";
    coef_block(scale_labels(), false);
    o << "\\addlinespace[0.5em]\n\\midrule\n\\midrule\n";
    o << "\\multicolumn{" << ncol << "}{l}{\\textit{Panel C: Model Fit Statistics}} \\\\\n\\addlinespace[0.5em]\n";
    for (const auto& r : stat_rows(t)) {
        o << r.latex;
        for (const auto& c : r.cells) o << " & " << c;
        o << " \\\\\n";
    }
    o << "\\addlinespace[0.5em]\n\\midrule\n";
    o << "\\multicolumn{" << ncol << "}{l}{\\textit{Panel D: Full vs Reduced Model Comparison}} \\\\\n\\addlinespace[0.5em]\n";
    const auto cmp = compare_rows(t);
    for (std::size_t r = 0; r < cmp.size(); ++r) {
        o << cmp[r].latex;
        for (std::size_t i = 0; i < k; ++i) {
            const bool lr = r == 2 && cmp[r].values[i] != "--";
            o << " & \\multicolumn{2}{c}{";
            if (lr)
                o << "$" << cmp[r].values[i] << (cmp[r].stars[i].empty() ? "" : "^{" + cmp[r].stars[i] + "}") << "$";
            else
                o << cmp[r].values[i];
            o << "}";
        }
        o << " \\\\\n";
    }
    o << "\\bottomrule\n\\end{tabular}\n";
    o << "\\caption{" << table_caption(t) << ". $^{*}p<0.05$, $^{**}p<0.01$, $^{***}p<0.001$.}\n";
    o << "\\label{" << table_label(t) << "}\n\\end{table}\n";
    return o.str();
}

inline std::string render_text(const ReportTable& t) {
    using namespace detail;
    constexpr int label_w = 30;
    constexpr int cell_w = 14;
    std::ostringstream o;
    auto pad = [](const std::string& s, int w) {
        return s.size() >= static_cast<std::size_t>(w) ? s + " " : s + std::string(w - s.size(), ' ');
    };
    auto line = [&](const std::string& label, const std::vector<std::string>& cells) {
        std::string s = pad(label, label_w);
        for (const auto& c : cells) s += pad(c, cell_w);
        while (!s.empty() && s.back() == ' ') s.pop_back();
        o << s << '\n';
    };

    o << table_caption(t) << "; * p<0.05, ** p<0.01, *** p<0.001\n";
    std::vector<std::string> head, sub;
    for (const auto& b : t.bidders) {
        head.push_back("Bidder " + b.label);
        head.push_back("");
        sub.push_back("Reduced");
        sub.push_back("Full");
    }
    line("", head);
    line("Variable", sub);

    auto coef_block = [&](const std::vector<RowLabels>& labels, bool location) {
        for (std::size_t j = 0; j < labels.size(); ++j) {
            std::vector<std::string> est, se;
            for (const auto& b : t.bidders) {
                for (const auto* m : {&b.reduced, &b.full}) {
                    Cell c;
                    if (*m) c = coef_cell(location ? (*m)->location : (*m)->scale, j);
                    est.push_back(c.value.empty() ? "--" : c.value + c.stars);
                    se.push_back(c.value.empty() ? "--" : "(" + c.se + ")");
                }
            }
            line(labels[j].text, est);
            line("", se);
        }
    };
    o << "Panel A: Location Coefficients\n";
    coef_block(location_labels(t.form), true);
    o << "Panel B: Scale Coefficients\n";
    coef_block(scale_labels(), false);
    o << "Panel C: Model Fit Statistics\n";
    for (const auto& r : stat_rows(t)) line(r.text, r.cells);
    o << "Panel D: Full vs Reduced Model Comparison\n";
    for (const auto& r : compare_rows(t)) {
        std::vector<std::string> cells;
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            cells.push_back(r.values[i] + r.stars[i]);
            cells.push_back("");
        }
        line(r.text, cells);
    }
    return o.str();
}

/// Long-format CSV holding the same formatted numbers as the text and LaTeX renderings.
inline std::string render_csv(const ReportTable& t) {
    using namespace detail;
    std::ostringstream o;
    o << "panel,bidder,model,row,value,std_error,stars\n";
    auto coef_rows = [&](const char* panel, const std::vector<RowLabels>& labels, bool location) {
        for (const auto& b : t.bidders) {
            for (const auto& [name, m] : {std::pair{"reduced", &b.reduced}, std::pair{"full", &b.full}}) {
                if (!*m) continue;
                for (std::size_t j = 0; j < labels.size(); ++j) {
                    const auto c = coef_cell(location ? (*m)->location : (*m)->scale, j);
                    if (c.value.empty()) continue;
                    o << panel << ',' << b.label << ',' << name << ',' << (location ? "theta" : "gamma") << j << ','
                      << c.value << ',' << c.se << ',' << c.stars << '\n';
                }
            }
        }
    };
    coef_rows("A", location_labels(t.form), true);
    coef_rows("B", scale_labels(), false);
    const auto stats = stat_rows(t);
    for (std::size_t i = 0; i < t.bidders.size(); ++i) {
        for (const auto& r : stats) {
            for (int m = 0; m < 2; ++m) {
                const auto& cell = r.cells[2 * i + m];
                if (cell == "--") continue;
                o << "C," << t.bidders[i].label << ',' << (m == 0 ? "reduced" : "full") << ',' << r.text << ',' << cell
                  << ",,\n";
            }
        }
    }
    for (const auto& r : compare_rows(t)) {
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            if (r.values[i] == "--") continue;
            o << "D," << t.bidders[i].label << ",comparison," << r.text << ',' << r.values[i] << ",," << r.stars[i]
              << '\n';
        }
    }
    return o.str();
}

// ---------------------------------------------------------------------------
// Subsample grid

struct SubsampleRow {
    std::string bidder;
    std::string subsample;
    std::size_t n = 0;
    bool ok = false;
    std::string failure;
    double theta1_reduced = 0.0;
    double theta1_full = 0.0;
    double theta2_full = 0.0;
    double theta2_full_se = 0.0;
    double lr = 0.0;
    double lr_p = 1.0;
    double d_aic = 0.0;
    double d_bic = 0.0;
    // regressor magnitude ranges, a conditioning diagnostic
    double x1_min = 0.0, x1_max = 0.0, x2_min = 0.0, x2_max = 0.0;
};

inline std::string render_subsample_csv(const std::vector<SubsampleRow>& rows) {
    std::ostringstream o;
    o << "bidder,subsample,n,status,theta1_reduced,theta1_full,theta2_full,theta2_full_se,lr,lr_p,d_aic,d_bic,"
         "x1_min,x1_max,x2_min,x2_max\n";
    for (const auto& r : rows) {
        o << r.bidder << ',' << r.subsample << ',' << r.n << ',' << (r.ok ? "ok" : "failed");
        if (r.ok) {
            for (double v : {r.theta1_reduced, r.theta1_full, r.theta2_full, r.theta2_full_se, r.lr, r.lr_p, r.d_aic,
                             r.d_bic})
                o << ',' << csv::format_double(v);
        } else {
            o << ",,,,,,,,";
        }
        for (double v : {r.x1_min, r.x1_max, r.x2_min, r.x2_max}) o << ',' << csv::format_double(v);
        o << '\n';
    }
    return o.str();
}

inline std::string render_subsample_text(const std::vector<SubsampleRow>& rows) {
    std::ostringstream o;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-12s %-10s %8s %9s %9s %10s %10s %11s %11s\n", "Bidder", "Subsample", "N",
                  "theta1^R", "theta1^F", "theta2^F", "LR", "dAIC", "dBIC");
    o << buf;
    for (const auto& r : rows) {
        if (!r.ok) {
            std::snprintf(buf, sizeof(buf), "%-12s %-10s %8zu  failed: %s\n", r.bidder.c_str(), r.subsample.c_str(), r.n,
                          r.failure.c_str());
        } else {
            std::snprintf(buf, sizeof(buf), "%-12s %-10s %8zu %9.3f %9.3f %10.3f %10.1f %11.1f %11.1f\n",
                          r.bidder.c_str(), r.subsample.c_str(), r.n, r.theta1_reduced, r.theta1_full, r.theta2_full,
                          r.lr, r.d_aic, r.d_bic);
        }
        o << buf;
    }
    return o.str();
}

}  // namespace ela
