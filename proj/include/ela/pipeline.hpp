#pragma once

// End-to-end orchestration: data (ingested or simulated) -> per-bidder fits over the spec matrix ->
// comparison tables -> subsample grid. Every output is written in a fixed enumeration order so
// repeated runs produce identical bytes.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ela/censored_mle.hpp"
#include "ela/config.hpp"
#include "ela/fit_io.hpp"
#include "ela/log.hpp"
#include "ela/market_data.hpp"
#include "ela/report.hpp"
#include "ela/simulator.hpp"
#include "ela/subsample.hpp"

namespace ela {

struct SpecChoice {
    Form form = Form::linear;
    Family family = Family::student_t;
};

struct RunConfig {
    std::string bids_path;
    std::string candles_path;
    std::string dataset_path;  // skips ingestion when set
    std::string out_dir = "out";
    std::vector<std::string> bidders;  // empty: every bidder in the data
    std::size_t T = kDefaultWindow;
    std::size_t L = kDefaultLag;
    bool lagged = false;
    std::int64_t bar_ms = 1000;
    std::size_t max_fill = 5;
    std::vector<SpecChoice> specs{{Form::linear, Family::student_t}};
    bool monthly = false;
    bool regime = false;
    bool simulate = false;
    SimConfig sim;
    FitOptions fit;
    LogBidBase log_bid_base = LogBidBase::wei;

    void validate() const {
        if (specs.empty()) throw ConfigError("spec matrix is empty");
        if (!simulate && dataset_path.empty() && (bids_path.empty() || candles_path.empty()))
            throw ConfigError("need bids and candles, a dataset, or simulate = true");
        if (out_dir.empty()) throw ConfigError("output directory not set");
    }
};

inline Form parse_form(const std::string& s) {
    if (s == "linear") return Form::linear;
    if (s == "loglog") return Form::loglog;
    throw ConfigError("unknown form '" + s + "'");
}

inline Family parse_family(const std::string& s) {
    if (s == "t" || s == "student_t") return Family::student_t;
    if (s == "gauss" || s == "gaussian") return Family::gaussian;
    throw ConfigError("unknown family '" + s + "'");
}

/// Reads a run configuration. Simulation keys (n_rounds, theta, ...) share the same file.
inline RunConfig run_config_from(const KeyValueConfig& kv, RunConfig c = {}) {
    c.bids_path = kv.get_string("bids", c.bids_path);
    c.candles_path = kv.get_string("candles", c.candles_path);
    c.dataset_path = kv.get_string("dataset", c.dataset_path);
    c.out_dir = kv.get_string("out", c.out_dir);
    c.bidders = kv.get_strings("bidder_filter", c.bidders);
    c.T = kv.get_int<std::size_t>("T", c.T);
    c.L = kv.get_int<std::size_t>("L", c.L);
    c.lagged = kv.get_bool("lagged", c.lagged);
    c.bar_ms = kv.get_int<std::int64_t>("bar_ms", c.bar_ms);
    c.max_fill = kv.get_int<std::size_t>("max_fill", c.max_fill);
    if (kv.has("forms") || kv.has("families")) {
        std::vector<std::string> forms = kv.get_strings("forms", {"linear"});
        std::vector<std::string> fams = kv.get_strings("families", {"t"});
        c.specs.clear();
        for (const auto& f : forms)
            for (const auto& g : fams) c.specs.push_back({parse_form(f), parse_family(g)});
    }
    c.monthly = kv.get_bool("monthly", c.monthly);
    c.regime = kv.get_bool("regime", c.regime);
    c.simulate = kv.get_bool("simulate", c.simulate);
    c.fit.starts = kv.get_int<int>("starts", c.fit.starts);
    c.fit.max_iter = kv.get_int<int>("max_iter", c.fit.max_iter);
    c.fit.tol = kv.get_double("tol", c.fit.tol);
    const auto base = kv.get_string("log_bid_base", "wei");
    if (base != "wei" && base != "eth") throw ConfigError("log_bid_base must be wei or eth");
    c.log_bid_base = base == "wei" ? LogBidBase::wei : LogBidBase::eth;
    if (c.simulate) c.sim = sim_config_from(kv, c.sim);
    c.validate();
    return c;
}

/// Replaces each row's regressors with those of round r - 1 (any bidder); rows without a
/// predecessor are dropped. x1 is re-normalized by the current round's price.
inline RoundDataset lag_features(const RoundDataset& d, std::size_t* dropped = nullptr) {
    std::map<std::int64_t, const DatasetRow*> by_round;
    for (const auto& r : d.rows) by_round.emplace(r.round_id, &r);
    RoundDataset out;
    std::size_t n_drop = 0;
    for (const auto& r : d.rows) {
        auto it = by_round.find(r.round_id - 1);
        if (it == by_round.end()) {
            ++n_drop;
            continue;
        }
        DatasetRow row = r;
        row.x1 = it->second->x1 * std::sqrt(it->second->p_start / r.p_start);
        row.x2 = it->second->x2;
        out.rows.push_back(row);
    }
    if (dropped) *dropped = n_drop;
    return out;
}

struct FailureRecord {
    std::string spec;
    std::string bidder;
    std::string subsample;
    std::string model;
    std::string message;
};

struct ModelTriple {
    std::optional<TobitFit> null_fit, reduced, full;
};

struct PipelineResult {
    std::vector<ReportTable> tables;
    std::vector<SubsampleRow> subsamples;
    std::vector<FailureRecord> failures;
    std::vector<std::string> warnings;
    int exit_code = 0;
};

inline std::string spec_tag(const SpecChoice& s, bool lagged) {
    return to_string(s.form) + "_" + to_string(s.family) + (lagged ? "_lagged" : "");
}

inline TobitSpec make_spec(const SpecChoice& s, const RunConfig& cfg) {
    TobitSpec t;
    t.form = s.form;
    t.family = s.family;
    t.lagged = cfg.lagged;
    t.log_bid_base = cfg.log_bid_base;
    return t;
}

/// Null, reduced and full fits on one dataset; failures are recorded and the model left empty.
inline ModelTriple fit_triple(const RoundDataset& data, const TobitSpec& base, const FitOptions& opt,
                              const std::string& tag, const std::string& bidder, const std::string& subsample,
                              std::vector<FailureRecord>& failures, bool with_null = true) {
    ModelTriple m;
    auto attempt = [&](const TobitSpec& s, const char* name, std::optional<TobitFit>& slot) {
        try {
            slot = fit_tobit(data, s, opt);
            if (!slot->converged)
                log::warn(tag + "/" + bidder + "/" + subsample + "/" + name + ": optimizer did not reach tolerance");
        } catch (const Error& e) {
            failures.push_back({tag, bidder, subsample, name, e.what()});
            log::warn(tag + "/" + bidder + "/" + subsample + "/" + name + ": " + e.what());
        }
    };
    if (with_null) attempt(base.null_model(), "null", m.null_fit);
    attempt(base.reduced(), "reduced", m.reduced);
    attempt(base.full(), "full", m.full);
    if (m.null_fit) {
        for (auto* f : {&m.reduced, &m.full})
            if (*f) (*f)->mcfadden_r2 = mcfadden_r2(**f, *m.null_fit);
    }
    return m;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
}

inline std::string fit_file_name(const std::string& tag, const std::string& bidder, const std::string& model) {
    return tag + "__" + bidder + "__" + model + ".csv";
}

}  // namespace detail

/// Tidy export for external scatter plots: bid against both regressors with the x1 decile.
inline std::string scatter_csv(const RoundDataset& d) {
    std::vector<double> xs;
    for (const auto& r : d.rows) xs.push_back(r.x1);
    std::sort(xs.begin(), xs.end());
    std::ostringstream o;
    o << "bidder,round_id,bid_scaled,censored,x1,x2,x1_decile\n";
    for (const auto& r : d.rows) {
        const auto rank = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), r.x1) - xs.begin());
        const auto decile = std::min<std::size_t>(9, (rank == 0 ? 0 : rank - 1) * 10 / std::max<std::size_t>(1, xs.size()));
        o << r.bidder << ',' << r.round_id << ',' << csv::format_double(r.bid_scaled) << ',' << (r.censored ? 1 : 0)
          << ',' << csv::format_double(r.x1) << ',' << csv::format_double(r.x2) << ',' << decile + 1 << '\n';
    }
    return o.str();
}

inline RoundDataset acquire_dataset(const RunConfig& cfg, std::vector<std::string>& warnings) {
    if (cfg.simulate) {
        log::info("simulating " + std::to_string(cfg.sim.n_rounds) + " rounds");
        auto sim = simulate_rounds(cfg.sim);
        if (!cfg.lagged) return std::move(sim.data);
        std::size_t dropped = 0;
        auto lagged = lag_features(sim.data, &dropped);
        if (dropped) warnings.push_back("lagged features: dropped " + std::to_string(dropped) + " rows without a predecessor round");
        return lagged;
    }
    if (!cfg.dataset_path.empty()) {
        auto d = load_dataset(cfg.dataset_path);
        if (!cfg.lagged) return d;
        std::size_t dropped = 0;
        auto lagged = lag_features(d, &dropped);
        if (dropped) warnings.push_back("lagged features: dropped " + std::to_string(dropped) + " rows without a predecessor round");
        return lagged;
    }
    const auto candles = load_candles(cfg.candles_path, cfg.bar_ms);
    const auto bids = load_bids(cfg.bids_path);
    if (candles.duplicate_count) warnings.push_back(std::to_string(candles.duplicate_count) + " duplicate candle rows dropped");
    if (bids.duplicate_count) warnings.push_back(std::to_string(bids.duplicate_count) + " duplicate bids collapsed to their maximum");
    if (bids.rejected_count)
        warnings.push_back(std::to_string(bids.rejected_count) + " bids at or above 2^53 wei rejected");
    BuildOptions bo;
    bo.T = cfg.T;
    bo.L = cfg.L;
    bo.lagged = cfg.lagged;
    bo.max_fill = cfg.max_fill;
    auto built = build_dataset(bids.records, candles, bo);
    for (auto& w : built.warnings) warnings.push_back(std::move(w));
    if (built.dropped_count())
        warnings.push_back("dropped " + std::to_string(built.dropped_count()) + " rows (" +
                           std::to_string(built.dropped_no_predecessor) + " without predecessor, " +
                           std::to_string(built.dropped_coverage) + " without coverage)");
    if (built.floored_rounds)
        warnings.push_back(std::to_string(built.floored_rounds) + " rounds had a negative Newey-West estimate floored at 0");
    return std::move(built.data);
}

inline PipelineResult run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    const fs::path out(cfg.out_dir);
    fs::create_directories(out / "fits");

    PipelineResult res;
    const RoundDataset data = acquire_dataset(cfg, res.warnings);
    detail::write_file(out / "dataset.csv", dataset_to_string(data));
    detail::write_file(out / "scatter.csv", scatter_csv(data));

    std::vector<std::string> bidders = cfg.bidders.empty() ? bidders_of(data) : cfg.bidders;
    std::map<std::string, RoundDataset> per_bidder;
    for (const auto& b : bidders) {
        per_bidder[b] = filter_bidder(data, b);
        if (per_bidder[b].empty()) res.warnings.push_back("bidder " + b + " has no rows; panel left empty");
    }

    for (const auto& sc : cfg.specs) {
        const auto spec = make_spec(sc, cfg);
        const auto tag = spec_tag(sc, cfg.lagged);
        ReportTable table;
        table.form = sc.form;
        table.family = sc.family;
        table.lagged = cfg.lagged;
        for (const auto& b : bidders) {
            BidderColumns col;
            col.label = b;
            const auto& d = per_bidder[b];
            if (!d.empty()) {
                log::info("fitting " + tag + " for " + b + " (" + std::to_string(d.size()) + " rows)");
                auto m = fit_triple(d, spec, cfg.fit, tag, b, "all", res.failures);
                for (const auto& [name, f] : {std::pair{"null", &m.null_fit}, std::pair{"reduced", &m.reduced},
                                              std::pair{"full", &m.full}}) {
                    if (!*f) continue;
                    std::ostringstream os;
                    write_fit(os, **f);
                    detail::write_file(out / "fits" / detail::fit_file_name(tag, b, name), os.str());
                }
                if (m.reduced) col.reduced = column_from_fit(*m.reduced);
                if (m.full) col.full = column_from_fit(*m.full);
                if (m.reduced && m.full) col.comparison = compare_fits(*m.full, *m.reduced);
            }
            table.bidders.push_back(std::move(col));
        }
        detail::write_file(out / ("table_" + tag + ".tex"), render_latex(table));
        detail::write_file(out / ("table_" + tag + ".txt"), render_text(table));
        detail::write_file(out / ("table_" + tag + ".csv"), render_csv(table));
        res.tables.push_back(std::move(table));
    }

    if (cfg.monthly || cfg.regime) {
        const auto& sc = cfg.specs.front();
        const auto spec = make_spec(sc, cfg);
        const auto tag = spec_tag(sc, cfg.lagged);
        const double threshold = data.empty() ? 0.0 : median_x1(data);
        for (const auto& b : bidders) {
            const auto& d = per_bidder[b];
            if (d.empty()) continue;
            std::vector<Subsample> parts;
            if (cfg.monthly) {
                try {
                    parts = split_monthly(d);
                } catch (const Error& e) {
                    res.failures.push_back({tag, b, "monthly", "-", e.what()});
                }
            }
            if (cfg.regime) {
                auto rs = split_regime(d, threshold);
                parts.push_back({"high", std::move(rs.high)});
                parts.push_back({"low", std::move(rs.low)});
            }
            for (const auto& part : parts) {
                SubsampleRow row;
                row.bidder = b;
                row.subsample = part.name;
                row.n = part.data.size();
                if (!part.data.empty()) {
                    auto [x1lo, x1hi] = std::minmax_element(part.data.rows.begin(), part.data.rows.end(),
                                                            [](const auto& a, const auto& c) { return a.x1 < c.x1; });
                    auto [x2lo, x2hi] = std::minmax_element(part.data.rows.begin(), part.data.rows.end(),
                                                            [](const auto& a, const auto& c) { return a.x2 < c.x2; });
                    row.x1_min = x1lo->x1;
                    row.x1_max = x1hi->x1;
                    row.x2_min = x2lo->x2;
                    row.x2_max = x2hi->x2;
                }
                log::info("subsample " + b + "/" + part.name + " (" + std::to_string(row.n) + " rows)");
                auto m = fit_triple(part.data, spec, cfg.fit, tag, b, part.name, res.failures, false);
                if (m.reduced && m.full) {
                    try {
                        const auto cmp = compare_fits(*m.full, *m.reduced);
                        row.ok = true;
                        row.theta1_reduced = m.reduced->params.theta[1];
                        row.theta1_full = m.full->params.theta[1];
                        row.theta2_full = m.full->params.theta[2];
                        row.theta2_full_se = m.full->std_errors.theta[2];
                        row.lr = cmp.lr_chi2;
                        row.lr_p = cmp.p_value();
                        row.d_aic = cmp.d_aic;
                        row.d_bic = cmp.d_bic;
                    } catch (const Error& e) {
                        res.failures.push_back({tag, b, part.name, "comparison", e.what()});
                    }
                }
                if (!row.ok) row.failure = "fit failed";
                res.subsamples.push_back(std::move(row));
            }
        }
        detail::write_file(out / ("subsamples_" + tag + ".csv"), render_subsample_csv(res.subsamples));
        detail::write_file(out / ("subsamples_" + tag + ".txt"), render_subsample_text(res.subsamples));
    }

    std::ostringstream summary;
    for (const auto& w : res.warnings) {
        log::warn(w);
        summary << "warning: " << w << '\n';
    }
    summary << "rows: " << data.size() << "\ncensored: " << data.censored_count() << "\nfailures: " << res.failures.size()
            << '\n';
    detail::write_file(out / "summary.txt", summary.str());
    if (!res.failures.empty()) {
        std::ostringstream man;
        man << "spec,bidder,subsample,model,message\n";
        for (const auto& f : res.failures) {
            std::string msg = f.message;
            std::replace(msg.begin(), msg.end(), ',', ';');
            man << f.spec << ',' << f.bidder << ',' << f.subsample << ',' << f.model << ',' << msg << '\n';
        }
        detail::write_file(out / "failures.csv", man.str());
        res.exit_code = 2;
    }
    return res;
}

/// Rebuilds report tables from the fit files a previous pipeline run wrote under `dir`/fits.
inline std::vector<ReportTable> tables_from_fit_dir(const std::string& dir, const std::vector<std::string>& bidders,
                                                    const std::vector<SpecChoice>& specs, bool lagged) {
    namespace fs = std::filesystem;
    std::vector<ReportTable> out;
    auto read = [&](const std::string& tag, const std::string& b, const char* model) -> std::optional<TobitFit> {
        const auto p = fs::path(dir) / "fits" / detail::fit_file_name(tag, b, model);
        std::ifstream in(p);
        if (!in) return std::nullopt;
        return read_fit(in);
    };
    for (const auto& sc : specs) {
        const auto tag = spec_tag(sc, lagged);
        ReportTable t;
        t.form = sc.form;
        t.family = sc.family;
        t.lagged = lagged;
        for (const auto& b : bidders) {
            BidderColumns col;
            col.label = b;
            auto red = read(tag, b, "reduced");
            auto full = read(tag, b, "full");
            if (red) col.reduced = column_from_fit(*red);
            if (full) col.full = column_from_fit(*full);
            if (red && full) col.comparison = compare_fits(*full, *red);
            t.bidders.push_back(std::move(col));
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace ela
