#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "ela/ela.hpp"

namespace {

using namespace ela;

struct Common {
    std::string bids, candles, dataset, out, config, form = "linear", family = "t";
    std::vector<std::string> bidders;
    std::size_t T = kDefaultWindow, L = kDefaultLag;
    bool reduced = false, lagged = false;
    std::uint64_t seed = 42;
};

std::ofstream open_out(const std::string& path) {
    if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    return out;
}

KeyValueConfig load_config(const std::string& path) { return path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path); }

void warn_unused(const KeyValueConfig& kv) {
    for (const auto& k : kv.unused_keys()) log::warn("config key '" + k + "' is not recognized");
}

int cmd_ingest(const Common& c, std::int64_t bar_ms, std::size_t max_fill) {
    const auto candles = load_candles(c.candles, bar_ms);
    const auto bids = load_bids(c.bids);
    BuildOptions bo{c.T, c.L, c.lagged, max_fill};
    auto built = build_dataset(bids.records, candles, bo);
    for (const auto& w : built.warnings) log::warn(w);
    if (bids.rejected_count) log::warn(std::to_string(bids.rejected_count) + " bids at or above 2^53 wei rejected");
    auto out = open_out(c.out);
    write_dataset(out, built.data);
    std::cout << "rows " << built.data.size() << ", censored " << built.data.censored_count() << ", dropped "
              << built.dropped_count() << ", floored rounds " << built.floored_rounds << ", duplicate bids "
              << bids.duplicate_count << ", rejected bids " << bids.rejected_count << ", duplicate candles " << candles.duplicate_count << '\n';
    return 0;
}

int cmd_moments(const Common& c, std::int64_t bar_ms, std::size_t max_fill) {
    const auto candles = load_candles(c.candles, bar_ms);
    const auto bids = load_bids(c.bids);
    std::map<std::int64_t, std::int64_t> rounds;
    for (const auto& b : bids.records) rounds.emplace(b.round_id, b.round_start);
    auto out = open_out(c.out);
    out << "round_id,round_start_ms,p_start,e_iv,var_iv,floored,filled_bars\n";
    std::size_t skipped = 0;
    for (const auto& [id, start] : rounds) {
        try {
            const auto w = round_returns(candles, start, c.T, max_fill, id);
            const auto m = round_moments(w, c.L);
            out << id << ',' << start << ',' << csv::format_double(w.p_start) << ',' << csv::format_double(m.e_iv) << ','
                << csv::format_double(m.var_iv) << ',' << (m.floored ? 1 : 0) << ',' << w.fill_count << '\n';
        } catch (const CoverageError& e) {
            ++skipped;
            log::warn(e.what());
        }
    }
    std::cout << "rounds " << rounds.size() - skipped << ", skipped " << skipped << '\n';
    return 0;
}

int cmd_fit(const Common& c, int starts) {
    auto kv = load_config(c.config);
    auto data = load_dataset(c.dataset);
    if (c.lagged) data = lag_features(data);
    if (c.bidders.size() > 1) throw ArgumentError("fit takes a single --bidder");
    if (!c.bidders.empty()) data = filter_bidder(data, c.bidders.front());
    TobitSpec spec;
    spec.form = parse_form(c.form);
    spec.family = parse_family(c.family);
    spec.lagged = c.lagged;
    spec = c.reduced ? spec.reduced() : spec.full();
    FitOptions opt;
    opt.starts = kv.get_int<int>("starts", starts);
    opt.seed = c.seed;
    warn_unused(kv);
    auto fit = fit_tobit(data, spec, opt);
    try {
        const auto null_fit = fit_tobit(data, spec.null_model(), opt);
        fit.mcfadden_r2 = mcfadden_r2(fit, null_fit);
    } catch (const Error& e) {
        log::warn(std::string("null model: ") + e.what());
    }
    if (c.out.empty()) {
        write_fit(std::cout, fit);
    } else {
        auto out = open_out(c.out);
        write_fit(out, fit);
    }
    if (!fit.converged) log::warn("optimizer did not reach tolerance");
    return 0;
}

int cmd_simulate(const Common& c, bool emit_market, bool seed_set) {
    auto kv = load_config(c.config);
    auto cfg = sim_config_from(kv);
    if (seed_set) cfg.seed = c.seed;
    warn_unused(kv);
    const std::filesystem::path dir(c.out.empty() ? "sim" : c.out);
    std::filesystem::create_directories(dir);
    const auto res = simulate_rounds(cfg, emit_market);
    {
        auto f = open_out((dir / "dataset.csv").string());
        write_dataset(f, res.data);
    }
    {
        auto f = open_out((dir / "truth.csv").string());
        write_truth(f, res.truth);
    }
    {
        auto f = open_out((dir / "rounds.csv").string());
        write_sim_rounds(f, res.truth);
    }
    if (!res.truth.outcomes.empty()) {
        auto f = open_out((dir / "outcomes.csv").string());
        write_outcomes(f, res.truth.outcomes);
    }
    if (res.candles) {
        auto f = open_out((dir / "candles.csv").string());
        write_candles(f, *res.candles);
        auto b = open_out((dir / "bids.csv").string());
        write_bids(b, res.bids);
    }
    std::cout << "rows " << res.data.size() << ", censored " << res.data.censored_count() << '\n';
    return 0;
}

int cmd_report(const Common& c) {
    if (c.out.empty()) throw ArgumentError("report needs --out pointing at a pipeline output directory");
    std::vector<std::string> bidders = c.bidders;
    if (bidders.empty()) {
        std::set<std::string> seen;
        for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(c.out) / "fits")) {
            const auto name = e.path().filename().string();
            const auto a = name.find("__");
            const auto b = name.rfind("__");
            if (a != std::string::npos && b > a) seen.insert(name.substr(a + 2, b - a - 2));
        }
        bidders.assign(seen.begin(), seen.end());
    }
    const SpecChoice sc{parse_form(c.form), parse_family(c.family)};
    for (const auto& t : tables_from_fit_dir(c.out, bidders, {sc}, c.lagged)) {
        const auto stem = (std::filesystem::path(c.out) / ("table_" + spec_tag(sc, c.lagged))).string();
        open_out(stem + ".tex") << render_latex(t);
        open_out(stem + ".txt") << render_text(t);
        open_out(stem + ".csv") << render_csv(t);
        std::cout << render_text(t);
    }
    return 0;
}

int cmd_pipeline(const Common& c, const CLI::App& sub) {
    auto kv = load_config(c.config);
    RunConfig base;
    if (sub.count("--bids")) kv.set("bids", c.bids);
    if (sub.count("--candles")) kv.set("candles", c.candles);
    if (sub.count("--dataset")) kv.set("dataset", c.dataset);
    if (sub.count("--out")) kv.set("out", c.out);
    if (sub.count("--T")) kv.set("T", std::to_string(c.T));
    if (sub.count("--L")) kv.set("L", std::to_string(c.L));
    if (sub.count("--lagged")) kv.set("lagged", "true");
    if (sub.count("--seed")) kv.set("seed", std::to_string(c.seed));
    if (sub.count("--form")) kv.set("forms", c.form);
    if (sub.count("--family")) kv.set("families", c.family);
    if (sub.count("--bidder")) {
        std::string joined;
        for (const auto& b : c.bidders) joined += (joined.empty() ? "" : ",") + b;
        kv.set("bidder_filter", joined);
    }
    auto cfg = run_config_from(kv, base);
    warn_unused(kv);
    const auto res = run_pipeline(cfg);
    for (const auto& t : res.tables) std::cout << render_text(t) << '\n';
    if (!res.failures.empty())
        std::cerr << res.failures.size() << " fit(s) failed; see " << cfg.out_dir << "/failures.csv\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Express lane auction valuation and censored regression toolkit"};
    app.require_subcommand(1);
    Common c;
    std::int64_t bar_ms = 1000;
    std::size_t max_fill = 5;
    int starts = 5;
    bool emit_market = false;

    auto add_io = [&](CLI::App* s) {
        s->add_option("--bids", c.bids, "bids CSV (round_id,bidder,bid_wei,round_start_ms)");
        s->add_option("--candles", c.candles, "candles CSV (open_time,open,high,low,close,volume)");
        s->add_option("--out", c.out, "output path");
        s->add_option("--T", c.T, "returns per window");
        s->add_option("--L", c.L, "Newey-West lag truncation");
        s->add_option("--bar-ms", bar_ms, "candle interval in ms");
        s->add_option("--max-fill", max_fill, "forward-filled bars allowed per window");
    };
    auto add_spec = [&](CLI::App* s) {
        s->add_option("--form", c.form, "linear or loglog")->check(CLI::IsMember({"linear", "loglog"}));
        s->add_option("--family", c.family, "t or gauss")->check(CLI::IsMember({"t", "gauss"}));
        s->add_flag("--lagged", c.lagged, "use round r-1 moments");
        s->add_option("--bidder", c.bidders, "bidder filter")->delimiter(',');
    };

    auto* ingest = app.add_subcommand("ingest", "join bids with per-round moments into a dataset CSV");
    add_io(ingest);
    ingest->add_flag("--lagged", c.lagged, "use round r-1 moments");
    auto* moments = app.add_subcommand("moments", "per-round E[IV] and Var(IV)");
    add_io(moments);
    auto* fit = app.add_subcommand("fit", "fit one Tobit specification");
    fit->add_option("--dataset", c.dataset, "dataset CSV")->required();
    fit->add_option("--out", c.out, "fit output CSV (stdout when omitted)");
    fit->add_flag("--reduced", c.reduced, "drop Var(IV) from both equations");
    fit->add_option("--seed", c.seed, "start jitter seed");
    fit->add_option("--starts", starts, "optimizer starts");
    fit->add_option("--config", c.config, "key = value file");
    add_spec(fit);
    auto* sim = app.add_subcommand("simulate", "generate synthetic rounds");
    sim->add_option("--config", c.config, "key = value file");
    sim->add_option("--seed", c.seed, "RNG seed");
    sim->add_option("--out", c.out, "output directory");
    sim->add_flag("--emit-market", emit_market, "also write candles.csv and bids.csv");
    auto* report = app.add_subcommand("report", "re-render tables from a pipeline output directory");
    report->add_option("--out", c.out, "pipeline output directory")->required();
    add_spec(report);
    auto* pipe = app.add_subcommand("pipeline", "ingest, fit, compare and split");
    add_io(pipe);
    add_spec(pipe);
    pipe->add_option("--dataset", c.dataset, "prebuilt dataset CSV");
    pipe->add_option("--config", c.config, "key = value file");
    pipe->add_option("--seed", c.seed, "simulation seed");

    CLI11_PARSE(app, argc, argv);
    try {
        if (ingest->parsed()) {
            if (c.bids.empty() || c.candles.empty() || c.out.empty())
                throw ArgumentError("ingest needs --bids, --candles and --out");
            return cmd_ingest(c, bar_ms, max_fill);
        }
        if (moments->parsed()) {
            if (c.bids.empty() || c.candles.empty() || c.out.empty())
                throw ArgumentError("moments needs --bids, --candles and --out");
            return cmd_moments(c, bar_ms, max_fill);
        }
        if (fit->parsed()) return cmd_fit(c, starts);
        if (sim->parsed()) return cmd_simulate(c, emit_market, sim->count("--seed") > 0);
        if (report->parsed()) return cmd_report(c);
        if (pipe->parsed()) return cmd_pipeline(c, *pipe);
    } catch (const std::exception& e) {
        log::error(e.what());
        return 1;
    }
    return 0;
}
